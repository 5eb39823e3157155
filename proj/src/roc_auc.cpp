#include "robroc/roc_auc.hpp"

#include <algorithm>
#include <cmath>

#include "robroc/errors.hpp"

namespace robroc {

std::vector<double> uniform_grid(int count) { return linspace(0.0, 1.0, count); }

std::vector<double> linspace(double lo, double hi, int count) {
    if (count < 1) {
        throw UsageError("grid needs at least one point");
    }
    if (count == 1) {
        return {lo};
    }
    std::vector<double> out(static_cast<std::size_t>(count));
    const double step = (hi - lo) / static_cast<double>(count - 1);
    for (int i = 0; i < count; ++i) {
        out[static_cast<std::size_t>(i)] = lo + step * static_cast<double>(i);
    }
    out.back() = hi;
    return out;
}

std::vector<double> roc_values(const PopulationPair& pair, std::span<const double> x, std::span<const double> t_grid) {
    pair.validate();
    const auto& nd = pair.nondiseased;
    const auto& d = pair.diseased;
    const double shift = (nd.predict_mean(x) - d.predict_mean(x)) / d.fit.sigma;
    const double ratio = nd.fit.sigma / d.fit.sigma;
    std::vector<double> out;
    out.reserve(t_grid.size());
    for (double t : t_grid) {
        if (!(t >= 0.0 && t <= 1.0)) {
            throw DataError("ROC evaluation point outside [0, 1]");
        }
        const double q = nd.residual_ecdf.quantile(1.0 - t);
        out.push_back(1.0 - d.residual_ecdf.cdf(shift + ratio * q));
    }
    return out;
}

double simpson_unit_interval(std::span<const double> values) {
    const std::size_t m = values.size() - 1;
    if (values.size() < 3 || m % 2 != 0) {
        throw UsageError("Simpson's rule needs an even number of intervals (>= 2)");
    }
    double s = values.front() + values.back();
    for (std::size_t i = 1; i < m; ++i) {
        s += (i % 2 == 1 ? 4.0 : 2.0) * values[i];
    }
    return s / (3.0 * static_cast<double>(m));
}

double simpson_unit_interval(const std::function<double(double)>& f, int intervals) {
    if (intervals < 2 || intervals % 2 != 0) {
        throw UsageError("Simpson's rule needs an even number of intervals (>= 2)");
    }
    const auto nodes = uniform_grid(intervals + 1);
    std::vector<double> values;
    values.reserve(nodes.size());
    for (double t : nodes) {
        values.push_back(f(t));
    }
    return simpson_unit_interval(values);
}

RocResult roc_curve(const PopulationPair& pair, std::span<const double> x, std::span<const double> t_grid,
                    int simpson_intervals) {
    RocResult out;
    out.x.assign(x.begin(), x.end());
    out.t_grid.assign(t_grid.begin(), t_grid.end());
    out.roc_values = roc_values(pair, x, t_grid);
    out.auc_closed_form = auc_closed_form(pair, x);
    out.auc_simpson = auc_simpson(pair, x, simpson_intervals);
    return out;
}

double auc_closed_form(const PopulationPair& pair, std::span<const double> x) {
    pair.validate();
    const WeightedEcdf nd = pair.nondiseased.conditional_distribution(x);
    const Eigen::VectorXd d_values = pair.diseased.adjusted_values(x);
    const Eigen::VectorXd& d_weights = pair.diseased.fit.truncated_weights;

    // For each diseased value, the nondiseased weight at or below it.
    double num = 0.0;
    const auto& support = nd.support();
    const auto& cum = nd.cumulative();
    for (Eigen::Index j = 0; j < d_values.size(); ++j) {
        const auto it = std::upper_bound(support.begin(), support.end(), d_values(j));
        if (it != support.begin()) {
            num += d_weights(j) * cum[static_cast<std::size_t>(it - support.begin()) - 1];
        }
    }
    return num / (nd.total_weight() * d_weights.sum());
}

double auc_simpson(const PopulationPair& pair, std::span<const double> x, int intervals) {
    if (intervals < 2 || intervals % 2 != 0) {
        throw UsageError("Simpson's rule needs an even number of intervals (>= 2)");
    }
    const auto nodes = uniform_grid(intervals + 1);
    return simpson_unit_interval(roc_values(pair, x, nodes));
}

double unconditional_auc(std::span<const double> y_nd, std::span<const double> y_d, std::span<const double> w_nd,
                         std::span<const double> w_d) {
    if (y_nd.empty() || y_d.empty()) {
        throw DataError("unconditional AUC needs both samples nonempty");
    }
    if (y_d.size() != w_d.size()) {
        throw DataError("diseased outcomes and weights differ in length");
    }
    const WeightedEcdf nd(y_nd, w_nd);
    const auto& support = nd.support();
    const auto& weights = nd.weights();
    const auto& cum = nd.cumulative();
    double num = 0.0;
    double total_d = 0.0;
    for (std::size_t j = 0; j < y_d.size(); ++j) {
        const auto lo = std::lower_bound(support.begin(), support.end(), y_d[j]);
        const auto k = static_cast<std::size_t>(lo - support.begin());
        double below = k > 0 ? cum[k - 1] : 0.0;
        if (lo != support.end() && *lo == y_d[j]) {
            below += 0.5 * weights[k];
        }
        num += w_d[j] * below;
        total_d += w_d[j];
    }
    return num / (nd.total_weight() * total_d);
}

UnconditionalAuc robust_unconditional_auc(const Eigen::VectorXd& y_nd, const Eigen::VectorXd& y_d,
                                          const FitConfig& cfg) {
    UnconditionalAuc out;
    out.nondiseased = irls_fit(Eigen::MatrixXd::Ones(y_nd.size(), 1), y_nd, cfg);
    out.diseased = irls_fit(Eigen::MatrixXd::Ones(y_d.size(), 1), y_d, cfg);
    const auto view = [](const Eigen::VectorXd& v) {
        return std::span<const double>(v.data(), static_cast<std::size_t>(v.size()));
    };
    out.auc = unconditional_auc(view(y_nd), view(y_d), view(out.nondiseased.truncated_weights),
                                view(out.diseased.truncated_weights));
    return out;
}

YoudenResult youden(const PopulationPair& pair, std::span<const double> x,
                    std::optional<std::span<const double>> candidates) {
    pair.validate();
    const WeightedEcdf nd = pair.nondiseased.conditional_distribution(x);
    const WeightedEcdf d = pair.diseased.conditional_distribution(x);

    std::vector<double> cs;
    if (candidates) {
        cs.assign(candidates->begin(), candidates->end());
    } else {
        cs = nd.support();
        cs.insert(cs.end(), d.support().begin(), d.support().end());
    }
    if (cs.empty()) {
        throw DataError("Youden index needs at least one candidate threshold");
    }
    std::sort(cs.begin(), cs.end());

    YoudenResult best{-2.0, cs.front()};
    for (double c : cs) {
        const double value = nd.cdf(c) - d.cdf(c);
        // Ascending scan with a strict comparison keeps the smallest maximizer;
        // the slack ignores rounding differences between equal step heights.
        if (value > best.index + 1e-12) {
            best = {value, c};
        }
    }
    return best;
}

std::vector<double> default_covariate_grid(const PopulationPair& pair, int count) {
    pair.validate();
    if (pair.nondiseased.spec.covariate_count() != 1) {
        throw UsageError("a default covariate grid needs exactly one covariate; supply the grid explicitly");
    }
    const auto& a = pair.nondiseased.spec.terms.front();
    const auto& b = pair.diseased.spec.terms.front();
    const double lo = std::max(a.lower, b.lower);
    const double hi = std::min(a.upper, b.upper);
    if (!(lo <= hi)) {
        throw DataError("covariate ranges of the two groups do not overlap");
    }
    return linspace(lo, hi, count);
}

} // namespace robroc
