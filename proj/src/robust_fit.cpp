#include "robroc/robust_fit.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "robroc/errors.hpp"
#include "robroc/stats.hpp"

namespace robroc {

namespace {

constexpr double kMadConstant = 1.4826;

void check_shapes(const Eigen::MatrixXd& z, const Eigen::VectorXd& y) {
    if (z.rows() != y.size()) {
        throw DataError("design has " + std::to_string(z.rows()) + " rows but outcome has " +
                        std::to_string(y.size()) + " entries");
    }
    if (z.rows() <= z.cols()) {
        throw DataError("underdetermined: n = " + std::to_string(z.rows()) +
                        " observations for Q = " + std::to_string(z.cols()) + " coefficients");
    }
    if (!y.allFinite() || !z.allFinite()) {
        throw DataError("non-finite values in design or outcome");
    }
}

Eigen::VectorXd solve_least_squares(const Eigen::MatrixXd& z, const Eigen::VectorXd& y, const char* what) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(z);
    if (qr.rank() < z.cols()) {
        throw NumericalError(std::string(what) + ": rank " + std::to_string(qr.rank()) + " < " +
                             std::to_string(z.cols()));
    }
    return qr.solve(y);
}

double checked_scale(const Eigen::VectorXd& residuals) {
    const double s = mad_scale(residuals);
    if (!(s > 0.0) || !std::isfinite(s)) {
        throw NumericalError("degenerate scale: MAD of residuals is zero");
    }
    return s;
}

} // namespace

void FitConfig::validate() const {
    if (!(b > 0.0)) throw UsageError("Huber threshold b must be positive");
    if (!(v > 0.0)) throw UsageError("truncation constant v must be positive");
    if (!(tolerance > 0.0)) throw UsageError("convergence tolerance must be positive");
    if (max_iterations < 1) throw UsageError("max_iterations must be at least 1");
}

double huber_rho(double u, double b) {
    const double a = std::abs(u);
    return a <= b ? 0.5 * u * u : b * a - 0.5 * b * b;
}

double huber_psi(double u, double b) {
    if (std::abs(u) <= b) return u;
    return u > 0.0 ? b : -b;
}

double huber_weight(double u, double b) {
    const double a = std::abs(u);
    return a <= b ? 1.0 : b / a;
}

double mad_scale(std::span<const double> residuals) {
    std::vector<double> abs_r;
    abs_r.reserve(residuals.size());
    for (double r : residuals) {
        abs_r.push_back(std::abs(r));
    }
    return kMadConstant * stats::median(abs_r);
}

double mad_scale(const Eigen::VectorXd& residuals) {
    return mad_scale(std::span<const double>(residuals.data(), static_cast<std::size_t>(residuals.size())));
}

OlsFit ols_fit(const Eigen::MatrixXd& z, const Eigen::VectorXd& y) {
    check_shapes(z, y);
    OlsFit out;
    out.beta = solve_least_squares(z, y, "singular design");
    const Eigen::VectorXd r = y - z * out.beta;
    out.sigma = std::sqrt(r.squaredNorm() / static_cast<double>(z.rows() - z.cols()));
    return out;
}

RobustFit irls_fit(const Eigen::MatrixXd& z, const Eigen::VectorXd& y, const FitConfig& cfg) {
    cfg.validate();
    check_shapes(z, y);

    RobustFit fit;
    fit.config = cfg;

    // Step 1: least-squares start, MAD scale and initial weights.
    Eigen::VectorXd beta = solve_least_squares(z, y, "singular design");
    Eigen::VectorXd resid = y - z * beta;
    double sigma = checked_scale(resid);
    Eigen::VectorXd w = (resid / sigma).unaryExpr([&](double u) { return huber_weight(u, cfg.b); });

    // Step 2: weighted least squares on the row-scaled design.
    fit.converged = false;
    int k = 0;
    while (k < cfg.max_iterations) {
        ++k;
        const Eigen::VectorXd sw = w.cwiseSqrt();
        const Eigen::MatrixXd zw = sw.asDiagonal() * z;
        const Eigen::VectorXd yw = sw.cwiseProduct(y);
        const Eigen::VectorXd next = solve_least_squares(zw, yw, "singular weighted normal equations");
        const double change = (next - beta).cwiseAbs().maxCoeff();
        beta = next;
        resid = y - z * beta;
        sigma = checked_scale(resid);
        w = (resid / sigma).unaryExpr([&](double u) { return huber_weight(u, cfg.b); });
        if (change < cfg.tolerance) {
            fit.converged = true;
            break;
        }
    }
    fit.iterations = k;

    fit.beta = beta;
    fit.sigma = sigma;
    fit.std_residuals = resid / sigma;
    fit.huber_weights = w;
    fit.truncated_weights = fit.std_residuals.binaryExpr(
        w, [&](double e, double wj) { return std::abs(e) <= cfg.v ? 1.0 : wj; });
    return fit;
}

RobustFit ols_as_fit(const Eigen::MatrixXd& z, const Eigen::VectorXd& y, const FitConfig& cfg) {
    const OlsFit ols = ols_fit(z, y);
    if (!(ols.sigma > 0.0)) {
        throw NumericalError("degenerate scale: least-squares residuals are all zero");
    }
    RobustFit fit;
    fit.config = cfg;
    fit.beta = ols.beta;
    fit.sigma = ols.sigma;
    fit.std_residuals = (y - z * ols.beta) / ols.sigma;
    fit.huber_weights = Eigen::VectorXd::Ones(y.size());
    fit.truncated_weights = Eigen::VectorXd::Ones(y.size());
    fit.iterations = 0;
    fit.converged = true;
    return fit;
}

Eigen::VectorXd estimating_equations(const Eigen::MatrixXd& z, const RobustFit& fit) {
    const Eigen::VectorXd psi =
        fit.std_residuals.unaryExpr([&](double u) { return huber_psi(u, fit.config.b); });
    return z.transpose() * psi;
}

} // namespace robroc
