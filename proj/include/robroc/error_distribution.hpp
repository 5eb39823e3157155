#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace robroc {

/// Weighted empirical distribution of a sample.
///
/// Tied values are merged into a single support point carrying the summed
/// weight. The CDF is right-continuous; the quantile is the generalized
/// left-continuous inverse, with quantile(0) defined as the minimum.
class WeightedEcdf {
public:
    WeightedEcdf() = default;
    WeightedEcdf(std::span<const double> values, std::span<const double> weights);
    WeightedEcdf(const Eigen::VectorXd& values, const Eigen::VectorXd& weights);

    /// sum_j w_j 1{value_j <= y} / sum_l w_l
    [[nodiscard]] double cdf(double y) const;

    /// Smallest support point whose CDF reaches t (t in [0, 1]).
    [[nodiscard]] double quantile(double t) const;

    [[nodiscard]] const std::vector<double>& support() const { return support_; }
    [[nodiscard]] const std::vector<double>& weights() const { return weights_; }
    /// Running sums of `weights()`; the last entry equals total_weight().
    [[nodiscard]] const std::vector<double>& cumulative() const { return cumulative_; }
    [[nodiscard]] double total_weight() const { return total_; }
    [[nodiscard]] bool empty() const { return support_.empty(); }

    /// Weighted mean of the support; a diagnostic for centred residuals.
    [[nodiscard]] double weighted_mean() const;

private:
    std::vector<double> support_;
    std::vector<double> weights_;
    std::vector<double> cumulative_;
    double total_ = 0.0;
};

} // namespace robroc
