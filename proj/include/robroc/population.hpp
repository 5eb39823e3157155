#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "robroc/error_distribution.hpp"
#include "robroc/robust_fit.hpp"
#include "robroc/spline_basis.hpp"

namespace robroc {

/// Outcomes and covariates (n x p) of one population.
struct GroupSample {
    Eigen::VectorXd outcome;
    Eigen::MatrixXd covariates;

    [[nodiscard]] Eigen::Index size() const { return outcome.size(); }
};

enum class Estimator {
    robust,  ///< Huber M-estimation with weighted residual ECDF
    ols,     ///< least squares with unit weights
};

/// A fitted location-scale model of one population: basis, coefficients,
/// scale and the weighted ECDF of its standardized residuals.
struct PopulationFit {
    SplineSpec spec;
    RobustFit fit;
    WeightedEcdf residual_ecdf;

    PopulationFit() = default;
    PopulationFit(SplineSpec s, RobustFit f);

    /// mu(x) = z(x)' beta. Throws ExtrapolationError outside the boundary knots.
    [[nodiscard]] double predict_mean(std::span<const double> x) const;

    /// mu(x) + sigma * eps_j for every residual, i.e. the residuals placed at x.
    [[nodiscard]] Eigen::VectorXd adjusted_values(std::span<const double> x) const;

    /// Weighted ECDF of adjusted_values(x); equals F(c | x) of the model.
    [[nodiscard]] WeightedEcdf conditional_distribution(std::span<const double> x) const;

    /// Fitted values z_j' beta on the training design.
    [[nodiscard]] Eigen::VectorXd fitted(const Eigen::MatrixXd& design) const { return design * fit.beta; }
};

/// Nondiseased and diseased fits sharing one covariate schema.
struct PopulationPair {
    PopulationFit nondiseased;
    PopulationFit diseased;

    /// Throws DataError when the two fits disagree on covariate count.
    void validate() const;
};

/// Fits one population with a fixed basis specification.
PopulationFit fit_population(const GroupSample& sample, const SplineSpec& spec, const FitConfig& cfg = {},
                             Estimator estimator = Estimator::robust);

/// Builds the basis from the sample (knots per covariate) and fits it.
PopulationFit fit_population(const GroupSample& sample, std::span<const int> knots, const FitConfig& cfg = {},
                             Estimator estimator = Estimator::robust, std::span<const TermKind> kinds = {});

} // namespace robroc
