#include "robroc/model_select.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "robroc/errors.hpp"

namespace robroc {

RaicValue raic(const RobustFit& fit, const Eigen::MatrixXd& z, const Eigen::VectorXd& y) {
    if (z.rows() != y.size() || z.cols() != fit.beta.size()) {
        throw DataError("rAIC: design, outcome and coefficients disagree in shape");
    }
    if (!(fit.sigma > 0.0)) {
        throw NumericalError("rAIC: degenerate scale");
    }
    const double b = fit.config.b;
    const auto n = static_cast<double>(z.rows());
    const double s2 = fit.sigma * fit.sigma;
    const Eigen::VectorXd u = (y - z * fit.beta) / fit.sigma;

    Eigen::VectorXd dpsi(u.size());
    Eigen::VectorXd psi2(u.size());
    for (Eigen::Index j = 0; j < u.size(); ++j) {
        dpsi(j) = std::abs(u(j)) <= b ? 1.0 : 0.0;
        const double p = huber_psi(u(j), b);
        psi2(j) = p * p;
    }
    const Eigen::MatrixXd j_mat = z.transpose() * dpsi.asDiagonal() * z / (n * s2);
    const Eigen::MatrixXd u_mat = z.transpose() * psi2.asDiagonal() * z / (n * s2);

    const Eigen::LDLT<Eigen::MatrixXd> ldlt(j_mat);
    const Eigen::VectorXd pivots = ldlt.vectorD().cwiseAbs();
    const double scale = pivots.maxCoeff();
    if (ldlt.info() != Eigen::Success || !(scale > 0.0) || pivots.minCoeff() < 1e-10 * scale) {
        throw NumericalError("information matrix singular");
    }
    RaicValue out;
    out.trace = ldlt.solve(u_mat).trace();
    out.raic = 2.0 * n * std::log(fit.sigma) + 4.0 * out.trace;
    return out;
}

std::vector<std::vector<int>> knot_grid(const std::vector<std::vector<int>>& per_covariate) {
    std::vector<std::vector<int>> out{{}};
    for (const auto& options : per_covariate) {
        if (options.empty()) {
            throw UsageError("empty knot candidate set");
        }
        std::vector<std::vector<int>> next;
        next.reserve(out.size() * options.size());
        for (const auto& prefix : out) {
            for (int k : options) {
                auto v = prefix;
                v.push_back(k);
                next.push_back(std::move(v));
            }
        }
        out = std::move(next);
    }
    return out;
}

RaicReport select_knots(const GroupSample& sample, const std::vector<std::vector<int>>& candidates,
                        const FitConfig& cfg, std::span<const TermKind> kinds, bool keep_fits) {
    if (static_cast<Eigen::Index>(candidates.size()) != sample.covariates.cols()) {
        throw UsageError("knot candidates given for " + std::to_string(candidates.size()) + " covariates, sample has " +
                         std::to_string(sample.covariates.cols()));
    }
    auto per_cov = candidates;
    for (std::size_t h = 0; h < per_cov.size(); ++h) {
        if (!kinds.empty() && kinds[h] == TermKind::linear) {
            per_cov[h] = {0};
        }
        // Ascending sets make the grid lexicographic, so ties keep the smallest vector.
        std::sort(per_cov[h].begin(), per_cov[h].end());
        per_cov[h].erase(std::unique(per_cov[h].begin(), per_cov[h].end()), per_cov[h].end());
    }
    return select_knots_among(sample, knot_grid(per_cov), cfg, kinds, keep_fits);
}

RaicReport select_knots_among(const GroupSample& sample, std::vector<std::vector<int>> configurations,
                              const FitConfig& cfg, std::span<const TermKind> kinds, bool keep_fits) {
    if (configurations.empty()) {
        throw UsageError("no knot configurations to compare");
    }
    for (const auto& k : configurations) {
        if (static_cast<Eigen::Index>(k.size()) != sample.covariates.cols()) {
            throw UsageError("knot configuration length does not match the covariate count");
        }
    }
    std::sort(configurations.begin(), configurations.end());
    configurations.erase(std::unique(configurations.begin(), configurations.end()), configurations.end());

    RaicReport report;
    std::optional<std::size_t> best;
    for (auto& knots : configurations) {
        RaicCandidate cand;
        cand.knots = std::move(knots);
        try {
            const SplineSpec spec = make_spec(sample.covariates, cand.knots, kinds);
            const Eigen::MatrixXd z = build_design(sample.covariates, spec);
            RobustFit fit = irls_fit(z, sample.outcome, cfg);
            cand.value = raic(fit, z, sample.outcome);
            if (keep_fits) {
                cand.fit = PopulationFit(spec, std::move(fit));
            }
        } catch (const Error& e) {
            cand.error = e.what();
        }
        if (cand.value && (!best || cand.value->raic < report.candidates[*best].value->raic)) {
            best = report.candidates.size();
        }
        report.candidates.push_back(std::move(cand));
    }
    if (!best) {
        std::ostringstream msg;
        msg << "knot selection failed for every candidate:";
        for (const auto& c : report.candidates) {
            msg << " [";
            for (std::size_t i = 0; i < c.knots.size(); ++i) {
                msg << (i ? "," : "") << c.knots[i];
            }
            msg << "] " << c.error << ";";
        }
        throw NumericalError(msg.str());
    }
    report.selected = *best;
    return report;
}

} // namespace robroc
