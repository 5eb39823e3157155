#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "robroc/population.hpp"
#include "robroc/random.hpp"

namespace robroc {

/// One evaluation request: a covariate point and the t-grid of its ROC band.
/// An empty t-grid requests the AUC and Youden index only.
struct BootstrapTarget {
    std::vector<double> x;
    std::vector<double> t_grid;
};

struct BootstrapConfig {
    int replicates = 1000;
    double alpha = 0.05;
    std::uint64_t seed = 1;
    std::vector<BootstrapTarget> targets;
    FitConfig fit;
    Estimator estimator = Estimator::robust;
    bool keep_replicates = false;
    unsigned threads = 1;  ///< 0 = hardware concurrency

    void validate() const;
};

struct PercentileInterval {
    double estimate = 0.0;
    double lower = 0.0;
    double upper = 0.0;
};

struct BootstrapTargetResult {
    std::vector<double> x;
    std::vector<double> t_grid;
    PercentileInterval auc;
    PercentileInterval youden_index;
    PercentileInterval youden_threshold;
    std::vector<PercentileInterval> roc;  ///< one per t-grid point
    std::vector<double> auc_replicates;   ///< filled when keep_replicates is set
};

struct BootstrapResult {
    std::vector<BootstrapTargetResult> targets;
    std::vector<bool> replicate_ok;  ///< false where the refit failed
    std::vector<bool> replicate_converged;
    int failed = 0;
    bool reliability_warning = false;  ///< more than 5% of replicates failed
};

/// Draws `count` indices with replacement, index j with probability
/// weights[j] / sum(weights), by inversion of the cumulative weights.
std::vector<std::size_t> draw_weighted_indices(std::span<const double> weights, std::size_t count, Rng& rng);

/// Weighted residual bootstrap with the knot configuration of `pair` frozen.
///
/// Replicate b uses its own stream derived from (seed, b): standardized
/// residuals are resampled proportionally to omega*, outcomes are rebuilt on
/// the original covariate rows as mu(x_j) + sigma * eps*, both groups are
/// refitted and every target is re-evaluated. Intervals are nearest-rank
/// percentiles at alpha/2 and 1 - alpha/2 over the successful replicates.
BootstrapResult residual_bootstrap(const PopulationPair& pair, const GroupSample& nondiseased,
                                   const GroupSample& diseased, const BootstrapConfig& cfg);

} // namespace robroc
