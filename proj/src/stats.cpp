#include "robroc/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "robroc/errors.hpp"

namespace robroc::stats {

double median(std::span<const double> values) {
    if (values.empty()) {
        throw DataError("median of an empty sample");
    }
    std::vector<double> v(values.begin(), values.end());
    const std::size_t n = v.size();
    const std::size_t mid = n / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    const double upper = v[mid];
    if (n % 2 == 1) {
        return upper;
    }
    const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lower + upper);
}

double quantile_type7(std::span<const double> sorted, double p) {
    if (sorted.empty()) {
        throw DataError("quantile of an empty sample");
    }
    const double h = static_cast<double>(sorted.size() - 1) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= sorted.size()) {
        return sorted.back();
    }
    const double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

double quantile_nearest_rank(std::span<const double> sorted, double p) {
    if (sorted.empty()) {
        throw DataError("quantile of an empty sample");
    }
    const auto n = static_cast<double>(sorted.size());
    // 1e-9 absorbs representation error in p (e.g. 0.975 * 1000).
    auto rank = static_cast<std::ptrdiff_t>(std::ceil(p * n - 1e-9));
    rank = std::clamp<std::ptrdiff_t>(rank, 1, static_cast<std::ptrdiff_t>(sorted.size()));
    return sorted[static_cast<std::size_t>(rank - 1)];
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double mean(std::span<const double> values) {
    if (values.empty()) {
        throw DataError("mean of an empty sample");
    }
    return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double variance(std::span<const double> values) {
    if (values.size() < 2) {
        throw DataError("variance needs at least two values");
    }
    const double m = mean(values);
    double ss = 0.0;
    for (double v : values) {
        ss += (v - m) * (v - m);
    }
    return ss / static_cast<double>(values.size() - 1);
}

} // namespace robroc::stats
