#include "robroc/population.hpp"

#include "robroc/errors.hpp"

namespace robroc {

PopulationFit::PopulationFit(SplineSpec s, RobustFit f)
    : spec(std::move(s)), fit(std::move(f)), residual_ecdf(fit.std_residuals, fit.truncated_weights) {
    if (static_cast<std::size_t>(fit.beta.size()) != spec.dimension()) {
        throw DataError("coefficient vector does not match basis dimension");
    }
    if (!(fit.sigma > 0.0)) {
        throw NumericalError("degenerate scale: sigma must be positive");
    }
}

double PopulationFit::predict_mean(std::span<const double> x) const { return design_row(x, spec).dot(fit.beta); }

Eigen::VectorXd PopulationFit::adjusted_values(std::span<const double> x) const {
    const double mu = predict_mean(x);
    return (fit.sigma * fit.std_residuals).array() + mu;
}

WeightedEcdf PopulationFit::conditional_distribution(std::span<const double> x) const {
    return WeightedEcdf(adjusted_values(x), fit.truncated_weights);
}

void PopulationPair::validate() const {
    if (nondiseased.spec.covariate_count() != diseased.spec.covariate_count()) {
        throw DataError("nondiseased and diseased fits use different covariate counts");
    }
}

PopulationFit fit_population(const GroupSample& sample, const SplineSpec& spec, const FitConfig& cfg,
                             Estimator estimator) {
    const Eigen::MatrixXd z = build_design(sample.covariates, spec);
    RobustFit fit = estimator == Estimator::robust ? irls_fit(z, sample.outcome, cfg) : ols_as_fit(z, sample.outcome, cfg);
    return PopulationFit(spec, std::move(fit));
}

PopulationFit fit_population(const GroupSample& sample, std::span<const int> knots, const FitConfig& cfg,
                             Estimator estimator, std::span<const TermKind> kinds) {
    return fit_population(sample, make_spec(sample.covariates, knots, kinds), cfg, estimator);
}

} // namespace robroc
