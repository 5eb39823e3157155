#pragma once

#include <span>

#include <Eigen/Dense>

namespace robroc {

/// Tuning of the Huber M-estimator and its IRLS solver.
struct FitConfig {
    double b = 1.345;         ///< Huber threshold
    double v = 3.0;           ///< truncation point for the ECDF weights
    int max_iterations = 50;
    double tolerance = 1e-8;  ///< on max |beta^(k) - beta^(k-1)|

    /// Throws UsageError on non-positive tuning values.
    void validate() const;
};

/// Result of a location-scale fit in one population.
struct RobustFit {
    Eigen::VectorXd beta;
    double sigma = 0.0;
    Eigen::VectorXd huber_weights;      ///< omega_j = min(1, b / |eps_j|)
    Eigen::VectorXd truncated_weights;  ///< 1 where |eps_j| <= v, omega_j otherwise
    Eigen::VectorXd std_residuals;      ///< (y_j - z_j' beta) / sigma
    int iterations = 0;
    bool converged = true;
    FitConfig config;

    [[nodiscard]] Eigen::Index size() const { return std_residuals.size(); }
};

struct OlsFit {
    Eigen::VectorXd beta;
    double sigma = 0.0;  ///< residual SD with divisor n - Q
};

double huber_rho(double u, double b);
double huber_psi(double u, double b);
double huber_weight(double u, double b);

/// 1.4826 * median |r_j| (uncentered). Returns 0 when more than half of the
/// residuals vanish; callers treat that as a degenerate scale.
double mad_scale(std::span<const double> residuals);
double mad_scale(const Eigen::VectorXd& residuals);

/// Least squares via column-pivoted QR.
OlsFit ols_fit(const Eigen::MatrixXd& z, const Eigen::VectorXd& y);

/// Huber M-estimate by iteratively reweighted least squares with the MAD
/// scale re-estimated at every iteration, started from least squares.
///
/// Throws NumericalError for singular designs or when the scale collapses to
/// zero. Hitting `max_iterations` is not an error: the last iterate is
/// returned with `converged == false`.
RobustFit irls_fit(const Eigen::MatrixXd& z, const Eigen::VectorXd& y, const FitConfig& cfg = {});

/// Packs a least-squares fit into the RobustFit shape with unit weights and
/// residuals standardized by the OLS scale.
RobustFit ols_as_fit(const Eigen::MatrixXd& z, const Eigen::VectorXd& y, const FitConfig& cfg = {});

/// Sum_j psi(eps_j) z_j: the M-estimating equations at the fitted point.
Eigen::VectorXd estimating_equations(const Eigen::MatrixXd& z, const RobustFit& fit);

} // namespace robroc
