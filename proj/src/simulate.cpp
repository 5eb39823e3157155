#include "robroc/simulate.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "robroc/errors.hpp"
#include "robroc/parallel.hpp"
#include "robroc/random.hpp"
#include "robroc/roc_auc.hpp"
#include "robroc/stats.hpp"

namespace robroc {

namespace {

using std::numbers::pi;

CovariateFunction constant(double c) {
    return [c](std::span<const double>) { return c; };
}

double error_draw(const Scenario& scn, Rng& rng) {
    if (scn.error_law == ErrorLaw::normal) {
        return rng.normal();
    }
    const int df = scn.student_df;
    double chi2 = 0.0;
    for (int k = 0; k < df; ++k) {
        const double g = rng.normal();
        chi2 += g * g;
    }
    const double t = rng.normal() / std::sqrt(chi2 / df);
    return t * std::sqrt(static_cast<double>(df - 2) / df);
}

GroupSample draw_group(const Scenario& scn, const GroupLaw& law, std::size_t n, double fraction, double kappa,
                       Rng& rng, std::vector<std::size_t>& contaminated) {
    const std::size_t p = scn.covariate_count();
    GroupSample g;
    g.covariates.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
    g.outcome.resize(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t h = 0; h < p; ++h) {
            const auto [lo, hi] = scn.covariate_ranges[h];
            g.covariates(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(h)) = rng.uniform(lo, hi);
        }
    }
    std::vector<double> x(p);
    const auto row = [&](std::size_t i) {
        for (std::size_t h = 0; h < p; ++h) {
            x[h] = g.covariates(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(h));
        }
        return std::span<const double>(x);
    };
    for (std::size_t i = 0; i < n; ++i) {
        const auto xi = row(i);
        g.outcome(static_cast<Eigen::Index>(i)) = law.mean(xi) + law.sd(xi) * error_draw(scn, rng);
    }

    // Uniform choice without replacement: partial Fisher-Yates shuffle.
    const std::size_t m = contaminated_count(fraction, n);
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    for (std::size_t k = 0; k < m; ++k) {
        const std::size_t j = k + rng.index(n - k);
        std::swap(perm[k], perm[j]);
    }
    contaminated.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(m));
    std::sort(contaminated.begin(), contaminated.end());
    for (std::size_t i : contaminated) {
        const auto xi = row(i);
        const double mu = law.mean(xi);
        const double sd = law.sd(xi);
        g.outcome(static_cast<Eigen::Index>(i)) = scn.contamination_kind == ContaminationKind::location
                                                      ? rng.normal(mu + kappa * sd, sd)
                                                      : rng.normal(mu, scn.radial_factor * sd);
    }
    return g;
}

std::string upper(std::string s) {
    for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return s;
}

} // namespace

void Scenario::validate() const {
    if (covariate_ranges.empty()) throw UsageError("scenario needs at least one covariate");
    for (const auto& [lo, hi] : covariate_ranges) {
        if (!(lo < hi)) throw UsageError("scenario covariate range must have lo < hi");
    }
    if (!nondiseased.mean || !nondiseased.sd || !diseased.mean || !diseased.sd) {
        throw UsageError("scenario group laws are incomplete");
    }
    for (double f : {contamination_nd, contamination_d}) {
        if (!(f >= 0.0 && f < 1.0)) throw UsageError("contamination fraction must lie in [0, 1)");
    }
    if (error_law == ErrorLaw::student_t && student_df <= 2) {
        throw UsageError("Student-t errors need more than 2 degrees of freedom");
    }
    if (!(radial_factor > 0.0)) throw UsageError("radial factor must be positive");
}

Scenario Scenario::preset(const std::string& id) {
    Scenario s;
    const std::string key = upper(id);
    s.name = key;
    if (key == "I") {
        s.covariate_ranges = {{0.0, 1.0}};
        s.nondiseased = {[](std::span<const double> x) { return 0.5 + x[0]; }, constant(1.5)};
        s.diseased = {[](std::span<const double> x) { return 2.0 + 4.0 * x[0]; }, constant(2.0)};
    } else if (key == "II") {
        s.covariate_ranges = {{0.0, 1.0}};
        s.nondiseased = {[](std::span<const double> x) { return std::sin(pi * x[0]); }, constant(0.5)};
        s.diseased = {[](std::span<const double> x) { return 1.0 + x[0] * x[0]; }, constant(1.0)};
    } else if (key == "III") {
        s.covariate_ranges = {{0.0, 1.0}};
        s.nondiseased = {[](std::span<const double> x) { return 0.5 * std::sin(2.0 * pi * x[0]); },
                         [](std::span<const double> x) { return 1.0 + 0.75 * x[0]; }};
        s.diseased = {[](std::span<const double> x) { return 0.5 + std::sin(pi * x[0]); },
                      [](std::span<const double> x) { return 1.0 + x[0]; }};
    } else if (key == "IV") {
        s.covariate_ranges = {{0.0, 1.0}, {0.0, 2.0}};
        s.nondiseased = {[](std::span<const double> x) { return 0.5 + x[0] + x[1] * x[1]; }, constant(1.5)};
        s.diseased = {[](std::span<const double> x) { return 2.0 + 4.0 * x[0] * x[0] * x[0] + 1.5 * x[1]; },
                      constant(2.0)};
    } else {
        throw UsageError("unknown scenario '" + id + "' (expected I, II, III or IV)");
    }
    return s;
}

GroupLaw PolynomialLaw::to_law() const {
    auto coefs = coefficients;
    const double a0 = intercept;
    GroupLaw law;
    law.mean = [coefs, a0](std::span<const double> x) {
        double m = a0;
        for (std::size_t h = 0; h < coefs.size() && h < x.size(); ++h) {
            m += x[h] * (coefs[h][0] + x[h] * (coefs[h][1] + x[h] * coefs[h][2]));
        }
        return m;
    };
    law.sd = constant(sd);
    return law;
}

Scenario custom_scenario(const std::string& name, std::vector<std::pair<double, double>> ranges,
                         const PolynomialLaw& nondiseased, const PolynomialLaw& diseased, ErrorLaw law) {
    if (!(nondiseased.sd > 0.0) || !(diseased.sd > 0.0)) {
        throw UsageError("custom scenario standard deviations must be positive");
    }
    Scenario s;
    s.name = name;
    s.covariate_ranges = std::move(ranges);
    s.nondiseased = nondiseased.to_law();
    s.diseased = diseased.to_law();
    s.error_law = law;
    return s;
}

std::size_t contaminated_count(double fraction, std::size_t n) {
    const double m = std::floor(fraction * static_cast<double>(n) + 0.5);
    return std::min(n, static_cast<std::size_t>(std::max(0.0, m)));
}

SimulatedData generate(const Scenario& scn, std::size_t n_nd, std::size_t n_d, std::uint64_t seed) {
    scn.validate();
    if (n_nd == 0 || n_d == 0) {
        throw UsageError("sample sizes must be positive");
    }
    Rng rng(seed);
    SimulatedData out;
    out.nondiseased = draw_group(scn, scn.nondiseased, n_nd, scn.contamination_nd, scn.kappa_nd, rng, out.contaminated_nd);
    out.diseased = draw_group(scn, scn.diseased, n_d, scn.contamination_d, scn.kappa_d, rng, out.contaminated_d);
    return out;
}

double true_auc(const Scenario& scn, std::span<const double> x) {
    if (scn.error_law != ErrorLaw::normal) {
        throw UsageError("no closed-form oracle for non-normal scenario '" + scn.name + "'");
    }
    const double diff = scn.diseased.mean(x) - scn.nondiseased.mean(x);
    const double sd_d = scn.diseased.sd(x);
    const double sd_nd = scn.nondiseased.sd(x);
    return stats::normal_cdf(diff / std::sqrt(sd_d * sd_d + sd_nd * sd_nd));
}

PopulationFit comparator_fit(ComparatorKind kind, const GroupSample& sample, std::span<const int> knots) {
    const auto p = static_cast<std::size_t>(sample.covariates.cols());
    std::vector<int> k(p, 0);
    if (!knots.empty()) {
        if (knots.size() != p) throw UsageError("comparator knots do not match covariate count");
        k.assign(knots.begin(), knots.end());
    }
    std::vector<TermKind> kinds(p, kind == ComparatorKind::ols_linear ? TermKind::linear : TermKind::spline);
    return fit_population(sample, k, FitConfig{}, Estimator::ols, kinds);
}

std::string to_string(StudyEstimator e) {
    switch (e) {
        case StudyEstimator::robust: return "robust";
        case StudyEstimator::ols_linear: return "ols_linear";
        case StudyEstimator::ols_bspline: return "ols_bspline";
    }
    return "unknown";
}

StudyEstimator parse_estimator(const std::string& name) {
    if (name == "robust") return StudyEstimator::robust;
    if (name == "ols_linear") return StudyEstimator::ols_linear;
    if (name == "ols_bspline") return StudyEstimator::ols_bspline;
    throw UsageError("unknown estimator '" + name + "' (expected robust, ols_linear or ols_bspline)");
}

double EstimatorReport::max_abs_bias() const {
    double worst = 0.0;
    for (const auto& pt : points) {
        worst = std::max(worst, std::abs(pt.mean - pt.truth));
    }
    return worst;
}

double KnotSelectionTable::percent(bool diseased_group, const std::vector<int>& knots) const {
    const auto& table = diseased_group ? diseased : nondiseased;
    int total = 0;
    for (const auto& [k, count] : table) total += count;
    if (total == 0) return std::numeric_limits<double>::quiet_NaN();
    const auto it = table.find(knots);
    return 100.0 * (it == table.end() ? 0.0 : it->second) / total;
}

const EstimatorReport& McReport::report(StudyEstimator e) const {
    for (const auto& r : estimators) {
        if (r.estimator == e) return r;
    }
    throw UsageError("estimator " + to_string(e) + " was not part of the study");
}

std::vector<std::vector<double>> default_study_grid(const Scenario& scn, int count) {
    std::vector<std::vector<double>> grid;
    const auto [lo, hi] = scn.covariate_ranges.front();
    const double span = hi - lo;
    for (double v : linspace(lo + 0.05 * span, hi - 0.05 * span, count)) {
        std::vector<double> x{v};
        for (std::size_t h = 1; h < scn.covariate_count(); ++h) {
            x.push_back(0.5 * (scn.covariate_ranges[h].first + scn.covariate_ranges[h].second));
        }
        grid.push_back(std::move(x));
    }
    return grid;
}

namespace {

struct ReplicateOutcome {
    std::vector<std::vector<double>> auc;  ///< [estimator][grid], NaN when skipped
    std::vector<bool> failed;              ///< per estimator
    std::optional<std::vector<int>> knots_nd;
    std::optional<std::vector<int>> knots_d;
};

PopulationFit fit_estimator(StudyEstimator e, const GroupSample& s, const std::vector<int>& robust_knots,
                            const std::vector<int>& bspline_knots, const FitConfig& cfg) {
    switch (e) {
        case StudyEstimator::robust: return fit_population(s, robust_knots, cfg, Estimator::robust);
        case StudyEstimator::ols_linear: return comparator_fit(ComparatorKind::ols_linear, s);
        case StudyEstimator::ols_bspline: return comparator_fit(ComparatorKind::ols_bspline, s, bspline_knots);
    }
    throw UsageError("unknown estimator");
}

} // namespace

McReport run_study(const StudyConfig& cfg) {
    cfg.scenario.validate();
    cfg.fit.validate();
    if (cfg.replicates < 1) throw UsageError("study needs at least one replicate");
    const std::size_t p = cfg.scenario.covariate_count();
    const auto grid = cfg.grid.empty() ? default_study_grid(cfg.scenario) : cfg.grid;
    for (const auto& x : grid) {
        if (x.size() != p) throw UsageError("study grid point dimension does not match the scenario");
    }
    const auto robust_knots = cfg.robust_knots.empty() ? std::vector<int>(p, 0) : cfg.robust_knots;
    const auto bspline_knots = cfg.bspline_knots.empty() ? std::vector<int>(p, 0) : cfg.bspline_knots;
    if (robust_knots.size() != p || bspline_knots.size() != p) {
        throw UsageError("knot vector does not match the scenario's covariate count");
    }
    if (!cfg.knot_contest.empty() && cfg.knot_contest.size() != p) {
        throw UsageError("knot contest candidates do not match the scenario's covariate count");
    }
    const bool contest = !cfg.knot_contest.empty() || !cfg.knot_configurations.empty();
    const auto contest_winner = [&](const GroupSample& s) {
        if (!cfg.knot_configurations.empty()) {
            return select_knots_among(s, cfg.knot_configurations, cfg.fit, {}, false).best().knots;
        }
        return select_knots(s, cfg.knot_contest, cfg.fit, {}, false).best().knots;
    };

    const std::size_t n_est = cfg.estimators.size();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<ReplicateOutcome> outcomes(static_cast<std::size_t>(cfg.replicates));

    parallel_for(outcomes.size(), cfg.threads, [&](std::size_t r) {
        const SimulatedData data = generate(cfg.scenario, cfg.n_nd, cfg.n_d, stream_seed(cfg.seed, r));
        ReplicateOutcome& out = outcomes[r];
        out.auc.assign(n_est, std::vector<double>(grid.size(), nan));
        out.failed.assign(n_est, false);
        for (std::size_t e = 0; e < n_est; ++e) {
            try {
                const PopulationPair pair{
                    fit_estimator(cfg.estimators[e], data.nondiseased, robust_knots, bspline_knots, cfg.fit),
                    fit_estimator(cfg.estimators[e], data.diseased, robust_knots, bspline_knots, cfg.fit)};
                for (std::size_t g = 0; g < grid.size(); ++g) {
                    try {
                        out.auc[e][g] = auc_closed_form(pair, grid[g]);
                    } catch (const ExtrapolationError&) {
                        // outside this replicate's covariate range
                    }
                }
            } catch (const Error&) {
                out.failed[e] = true;
            }
        }
        if (contest) {
            try {
                out.knots_nd = contest_winner(data.nondiseased);
            } catch (const Error&) {
            }
            try {
                out.knots_d = contest_winner(data.diseased);
            } catch (const Error&) {
            }
        }
    });

    McReport report;
    report.scenario = cfg.scenario.name;
    report.n_nd = cfg.n_nd;
    report.n_d = cfg.n_d;
    report.contamination_nd = cfg.scenario.contamination_nd;
    report.contamination_d = cfg.scenario.contamination_d;
    report.replicates = cfg.replicates;

    for (std::size_t e = 0; e < n_est; ++e) {
        EstimatorReport er;
        er.estimator = cfg.estimators[e];
        for (const auto& out : outcomes) {
            if (out.failed[e]) ++er.failed_replicates;
        }
        for (std::size_t g = 0; g < grid.size(); ++g) {
            GridSummary pt;
            pt.x = grid[g];
            try {
                pt.truth = true_auc(cfg.scenario, grid[g]);
            } catch (const UsageError&) {
                pt.truth = nan;
            }
            std::vector<double> values;
            for (const auto& out : outcomes) {
                if (!out.failed[e] && !std::isnan(out.auc[e][g])) values.push_back(out.auc[e][g]);
            }
            pt.used = static_cast<int>(values.size());
            if (values.empty()) {
                pt.mean = pt.lower = pt.upper = nan;
            } else {
                pt.mean = stats::mean(values);
                std::sort(values.begin(), values.end());
                pt.lower = stats::quantile_type7(values, 0.025);
                pt.upper = stats::quantile_type7(values, 0.975);
            }
            er.points.push_back(std::move(pt));
        }
        if (cfg.keep_replicates) {
            for (const auto& out : outcomes) er.replicate_auc.push_back(out.auc[e]);
        }
        report.estimators.push_back(std::move(er));
    }

    if (contest) {
        KnotSelectionTable table;
        table.replicates = cfg.replicates;
        for (const auto& out : outcomes) {
            if (out.knots_nd) ++table.nondiseased[*out.knots_nd];
            if (out.knots_d) ++table.diseased[*out.knots_d];
            if (!out.knots_nd || !out.knots_d) ++table.failed;
        }
        report.knot_selection = std::move(table);
    }
    return report;
}

} // namespace robroc
