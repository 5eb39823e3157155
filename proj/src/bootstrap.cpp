#include "robroc/bootstrap.hpp"

#include <algorithm>
#include <numeric>

#include "robroc/errors.hpp"
#include "robroc/parallel.hpp"
#include "robroc/roc_auc.hpp"
#include "robroc/stats.hpp"

namespace robroc {

namespace {

struct TargetSample {
    double auc = 0.0;
    double youden_index = 0.0;
    double youden_threshold = 0.0;
    std::vector<double> roc;
};

struct Replicate {
    bool ok = false;
    bool converged = false;
    std::vector<TargetSample> targets;
};

std::vector<TargetSample> evaluate(const PopulationPair& pair, const std::vector<BootstrapTarget>& targets) {
    std::vector<TargetSample> out;
    out.reserve(targets.size());
    for (const auto& target : targets) {
        TargetSample s;
        s.auc = auc_closed_form(pair, target.x);
        const YoudenResult yi = youden(pair, target.x);
        s.youden_index = yi.index;
        s.youden_threshold = yi.threshold;
        if (!target.t_grid.empty()) {
            s.roc = roc_values(pair, target.x, target.t_grid);
        }
        out.push_back(std::move(s));
    }
    return out;
}

PercentileInterval interval(double estimate, std::vector<double> values, double alpha) {
    std::sort(values.begin(), values.end());
    return {estimate, stats::quantile_nearest_rank(values, alpha / 2.0),
            stats::quantile_nearest_rank(values, 1.0 - alpha / 2.0)};
}

RobustFit refit(const Eigen::MatrixXd& z, const Eigen::VectorXd& y, const BootstrapConfig& cfg) {
    return cfg.estimator == Estimator::robust ? irls_fit(z, y, cfg.fit) : ols_as_fit(z, y, cfg.fit);
}

} // namespace

void BootstrapConfig::validate() const {
    if (replicates < 1) throw UsageError("bootstrap needs at least one replicate");
    if (!(alpha > 0.0 && alpha < 1.0)) throw UsageError("alpha must lie in (0, 1)");
    fit.validate();
}

std::vector<std::size_t> draw_weighted_indices(std::span<const double> weights, std::size_t count, Rng& rng) {
    if (weights.empty()) {
        throw DataError("cannot resample from an empty residual set");
    }
    std::vector<double> cum(weights.size());
    std::partial_sum(weights.begin(), weights.end(), cum.begin());
    const double total = cum.back();
    std::vector<std::size_t> out(count);
    for (auto& idx : out) {
        const double u = rng.uniform() * total;
        const auto it = std::upper_bound(cum.begin(), cum.end(), u);
        idx = std::min(static_cast<std::size_t>(it - cum.begin()), weights.size() - 1);
    }
    return out;
}

BootstrapResult residual_bootstrap(const PopulationPair& pair, const GroupSample& nondiseased,
                                   const GroupSample& diseased, const BootstrapConfig& cfg) {
    cfg.validate();
    pair.validate();
    if (nondiseased.size() != pair.nondiseased.fit.size() || diseased.size() != pair.diseased.fit.size()) {
        throw DataError("bootstrap samples do not match the fitted pair");
    }

    const Eigen::MatrixXd z_nd = build_design(nondiseased.covariates, pair.nondiseased.spec);
    const Eigen::MatrixXd z_d = build_design(diseased.covariates, pair.diseased.spec);
    const Eigen::VectorXd mu_nd = pair.nondiseased.fitted(z_nd);
    const Eigen::VectorXd mu_d = pair.diseased.fitted(z_d);

    const auto& fit_nd = pair.nondiseased.fit;
    const auto& fit_d = pair.diseased.fit;
    const std::span<const double> w_nd(fit_nd.truncated_weights.data(), static_cast<std::size_t>(fit_nd.size()));
    const std::span<const double> w_d(fit_d.truncated_weights.data(), static_cast<std::size_t>(fit_d.size()));

    const auto observed = evaluate(pair, cfg.targets);

    const auto reps = static_cast<std::size_t>(cfg.replicates);
    std::vector<Replicate> replicates(reps);
    parallel_for(reps, cfg.threads, [&](std::size_t b) {
        Rng rng(stream_seed(cfg.seed, b));
        // Step 1: weighted draws of standardized residuals in each group.
        const auto idx_nd = draw_weighted_indices(w_nd, w_nd.size(), rng);
        const auto idx_d = draw_weighted_indices(w_d, w_d.size(), rng);
        // Step 2: rebuild outcomes on the original covariate rows.
        Eigen::VectorXd y_nd(mu_nd.size());
        Eigen::VectorXd y_d(mu_d.size());
        for (std::size_t i = 0; i < idx_nd.size(); ++i) {
            y_nd(static_cast<Eigen::Index>(i)) =
                mu_nd(static_cast<Eigen::Index>(i)) +
                fit_nd.sigma * fit_nd.std_residuals(static_cast<Eigen::Index>(idx_nd[i]));
        }
        for (std::size_t j = 0; j < idx_d.size(); ++j) {
            y_d(static_cast<Eigen::Index>(j)) = mu_d(static_cast<Eigen::Index>(j)) +
                                                fit_d.sigma * fit_d.std_residuals(static_cast<Eigen::Index>(idx_d[j]));
        }
        // Step 3: refit with the frozen knots and re-evaluate.
        Replicate& rep = replicates[b];
        try {
            PopulationPair boot{PopulationFit(pair.nondiseased.spec, refit(z_nd, y_nd, cfg)),
                                PopulationFit(pair.diseased.spec, refit(z_d, y_d, cfg))};
            rep.converged = boot.nondiseased.fit.converged && boot.diseased.fit.converged;
            rep.targets = evaluate(boot, cfg.targets);
            rep.ok = true;
        } catch (const Error&) {
            rep.ok = false;
        }
    });

    BootstrapResult result;
    result.replicate_ok.reserve(reps);
    result.replicate_converged.reserve(reps);
    std::vector<const Replicate*> good;
    for (const auto& rep : replicates) {
        result.replicate_ok.push_back(rep.ok);
        result.replicate_converged.push_back(rep.converged);
        if (rep.ok) {
            good.push_back(&rep);
        } else {
            ++result.failed;
        }
    }
    if (good.empty()) {
        throw NumericalError("every bootstrap replicate failed to fit");
    }
    result.reliability_warning = static_cast<double>(result.failed) > 0.05 * static_cast<double>(reps);

    for (std::size_t k = 0; k < cfg.targets.size(); ++k) {
        BootstrapTargetResult tr;
        tr.x = cfg.targets[k].x;
        tr.t_grid = cfg.targets[k].t_grid;
        std::vector<double> auc, yi, yc;
        for (const auto* rep : good) {
            auc.push_back(rep->targets[k].auc);
            yi.push_back(rep->targets[k].youden_index);
            yc.push_back(rep->targets[k].youden_threshold);
        }
        tr.auc = interval(observed[k].auc, auc, cfg.alpha);
        tr.youden_index = interval(observed[k].youden_index, yi, cfg.alpha);
        tr.youden_threshold = interval(observed[k].youden_threshold, yc, cfg.alpha);
        for (std::size_t t = 0; t < tr.t_grid.size(); ++t) {
            std::vector<double> col;
            col.reserve(good.size());
            for (const auto* rep : good) {
                col.push_back(rep->targets[k].roc[t]);
            }
            tr.roc.push_back(interval(observed[k].roc[t], std::move(col), cfg.alpha));
        }
        if (cfg.keep_replicates) {
            tr.auc_replicates = std::move(auc);
        }
        result.targets.push_back(std::move(tr));
    }
    return result;
}

} // namespace robroc
