#pragma once

#include <algorithm>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "robroc/population.hpp"
#include "robroc/random.hpp"

namespace robroc::testing {

inline Eigen::VectorXd vec(std::initializer_list<double> v) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
    std::copy(v.begin(), v.end(), out.data());
    return out;
}

inline Eigen::VectorXd vec(const std::vector<double>& v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

// Intercept-only population whose adjusted values at any x are exactly `values`.
inline PopulationFit point_mass_fit(const std::vector<double>& values, std::vector<double> weights = {}) {
    if (weights.empty()) weights.assign(values.size(), 1.0);
    RobustFit f;
    f.beta = Eigen::VectorXd::Zero(1);
    f.sigma = 1.0;
    f.std_residuals = vec(values);
    f.huber_weights = vec(weights);
    f.truncated_weights = vec(weights);
    return PopulationFit(SplineSpec{}, f);
}

inline PopulationPair point_mass_pair(const std::vector<double>& nd, const std::vector<double>& d,
                                      const std::vector<double>& w_nd = {}, const std::vector<double>& w_d = {}) {
    return PopulationPair{point_mass_fit(nd, w_nd), point_mass_fit(d, w_d)};
}

// n rows of one U(lo, hi) covariate with y = mean(x) + sd * N(0, 1).
template <typename Mean>
GroupSample normal_sample(Rng& rng, int n, Mean mean, double sd, double lo = 0.0, double hi = 1.0) {
    GroupSample s;
    s.outcome.resize(n);
    s.covariates.resize(n, 1);
    for (int j = 0; j < n; ++j) {
        const double x = rng.uniform(lo, hi);
        s.covariates(j, 0) = x;
        s.outcome(j) = mean(x) + sd * rng.normal();
    }
    return s;
}

inline std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

} // namespace robroc::testing
