#pragma once

#include <span>
#include <vector>

namespace robroc::stats {

/// Median; even lengths average the two middle order statistics.
double median(std::span<const double> values);

/// Sample quantile by linear interpolation between order statistics
/// (Hyndman-Fan type 7). `sorted` must be ascending and nonempty.
double quantile_type7(std::span<const double> sorted, double p);

/// Nearest-rank percentile: the ceil(p * n)-th order statistic (1-based),
/// clamped to [1, n]. `sorted` must be ascending and nonempty.
double quantile_nearest_rank(std::span<const double> sorted, double p);

/// Standard normal CDF.
double normal_cdf(double z);

double mean(std::span<const double> values);
double variance(std::span<const double> values);

} // namespace robroc::stats
