#include "robroc/error_distribution.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "robroc/errors.hpp"

namespace robroc {

WeightedEcdf::WeightedEcdf(std::span<const double> values, std::span<const double> weights) {
    if (values.size() != weights.size()) {
        throw DataError("weighted ECDF: values and weights differ in length");
    }
    if (values.empty()) {
        throw DataError("weighted ECDF: empty sample");
    }
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

    for (std::size_t idx : order) {
        const double v = values[idx];
        const double w = weights[idx];
        if (!std::isfinite(v) || !std::isfinite(w) || !(w > 0.0)) {
            throw DataError("weighted ECDF: values must be finite and weights positive");
        }
        if (!support_.empty() && support_.back() == v) {
            weights_.back() += w;
        } else {
            support_.push_back(v);
            weights_.push_back(w);
        }
    }
    cumulative_.resize(weights_.size());
    std::partial_sum(weights_.begin(), weights_.end(), cumulative_.begin());
    total_ = cumulative_.back();
}

WeightedEcdf::WeightedEcdf(const Eigen::VectorXd& values, const Eigen::VectorXd& weights)
    : WeightedEcdf(std::span<const double>(values.data(), static_cast<std::size_t>(values.size())),
                   std::span<const double>(weights.data(), static_cast<std::size_t>(weights.size()))) {}

double WeightedEcdf::cdf(double y) const {
    const auto it = std::upper_bound(support_.begin(), support_.end(), y);
    if (it == support_.begin()) {
        return 0.0;
    }
    if (it == support_.end()) {
        return 1.0;
    }
    const auto k = static_cast<std::size_t>(it - support_.begin()) - 1;
    return cumulative_[k] / total_;
}

double WeightedEcdf::quantile(double t) const {
    if (support_.empty()) {
        throw DataError("quantile of an empty distribution");
    }
    if (!(t >= 0.0 && t <= 1.0)) {
        throw DataError("quantile level outside [0, 1]");
    }
    if (t <= 0.0) {
        return support_.front();
    }
    // First k with cumulative_[k] / total_ >= t, using the same expression
    // as cdf() so that cdf(quantile(t)) >= t holds exactly.
    const auto it = std::partition_point(cumulative_.begin(), cumulative_.end(),
                                         [&](double c) { return c / total_ < t; });
    if (it == cumulative_.end()) {
        return support_.back();
    }
    return support_[static_cast<std::size_t>(it - cumulative_.begin())];
}

double WeightedEcdf::weighted_mean() const {
    double s = 0.0;
    for (std::size_t k = 0; k < support_.size(); ++k) {
        s += support_[k] * weights_[k];
    }
    return s / total_;
}

} // namespace robroc
