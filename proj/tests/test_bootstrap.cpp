#include <doctest.h>

#include <cmath>
#include <map>

#include "robroc/bootstrap.hpp"
#include "robroc/errors.hpp"
#include "robroc/roc_auc.hpp"
#include "robroc/simulate.hpp"
#include "robroc/stats.hpp"
#include "support.hpp"

using namespace robroc;
using namespace robroc::testing;

namespace {

struct Fixture {
    GroupSample nd;
    GroupSample d;
    PopulationPair pair;
};

Fixture scenario_one(std::uint64_t seed, std::size_t n_nd, std::size_t n_d, double contamination = 0.0) {
    Scenario scn = Scenario::preset("I");
    scn.set_contamination(contamination);
    const SimulatedData data = generate(scn, n_nd, n_d, seed);
    const std::vector<int> k{0};
    return {data.nondiseased, data.diseased,
            PopulationPair{fit_population(data.nondiseased, k), fit_population(data.diseased, k)}};
}

} // namespace

TEST_SUITE("bootstrap") {

TEST_CASE("unit weights reduce to uniform index draws") {
    const std::vector<double> ones(37, 1.0);
    Rng a(99), b(99);
    const auto drawn = draw_weighted_indices(ones, 500, a);
    for (std::size_t i = 0; i < drawn.size(); ++i) CHECK(drawn[i] == b.index(37));
}

TEST_CASE("weighted draws follow the weights") {
    const std::vector<double> w{1.0, 0.0001, 2.0, 1.0};
    Rng rng(5);
    std::map<std::size_t, int> counts;
    const int n = 200000;
    for (auto i : draw_weighted_indices(w, n, rng)) ++counts[i];
    const double total = 4.0001;
    for (std::size_t j = 0; j < w.size(); ++j) {
        const double p = w[j] / total;
        const double sd = std::sqrt(n * p * (1 - p));
        CHECK(std::abs(counts[j] - n * p) < 5 * sd + 1);
    }
    CHECK_THROWS_AS(draw_weighted_indices(std::vector<double>{}, 3, rng), DataError);
}

TEST_CASE("same seed and configuration give identical results on any thread count") {
    const auto f = scenario_one(3, 80, 60, 0.05);
    BootstrapConfig cfg;
    cfg.replicates = 60;
    cfg.seed = 1234;
    cfg.keep_replicates = true;
    cfg.targets = {{{0.3}, uniform_grid(11)}, {{0.7}, {}}};
    const auto a = residual_bootstrap(f.pair, f.nd, f.d, cfg);
    cfg.threads = 3;
    const auto b = residual_bootstrap(f.pair, f.nd, f.d, cfg);
    REQUIRE(a.targets.size() == 2);
    for (std::size_t k = 0; k < 2; ++k) {
        CHECK(a.targets[k].auc_replicates == b.targets[k].auc_replicates);
        CHECK(a.targets[k].auc.lower == b.targets[k].auc.lower);
        CHECK(a.targets[k].auc.upper == b.targets[k].auc.upper);
        CHECK(a.targets[k].youden_threshold.upper == b.targets[k].youden_threshold.upper);
    }
    CHECK(a.targets[0].roc.size() == 11);
    CHECK(a.targets[1].roc.empty());
    cfg.seed = 1235;
    const auto c = residual_bootstrap(f.pair, f.nd, f.d, cfg);
    CHECK(c.targets[0].auc_replicates != a.targets[0].auc_replicates);
}

TEST_CASE("percentile bounds are nearest-rank order statistics") {
    const auto f = scenario_one(4, 100, 80);
    BootstrapConfig cfg;
    cfg.replicates = 101;
    cfg.alpha = 0.1;
    cfg.keep_replicates = true;
    cfg.targets = {{{0.5}, uniform_grid(5)}};
    const auto r = residual_bootstrap(f.pair, f.nd, f.d, cfg);
    auto v = r.targets[0].auc_replicates;
    REQUIRE(v.size() == 101);
    std::sort(v.begin(), v.end());
    // ceil(0.05 * 101) = 6th and ceil(0.95 * 101) = 96th order statistics.
    CHECK(r.targets[0].auc.lower == v[5]);
    CHECK(r.targets[0].auc.upper == v[95]);
    CHECK(r.targets[0].auc.lower <= v[50]);
    CHECK(r.targets[0].auc.upper >= v[50]);
    CHECK(r.targets[0].auc.estimate == doctest::Approx(auc_closed_form(f.pair, std::vector<double>{0.5})));
    for (const auto& iv : r.targets[0].roc) CHECK(iv.lower <= iv.upper);
    CHECK(r.failed == 0);
    CHECK_FALSE(r.reliability_warning);
}

TEST_CASE("one replicate gives zero-width intervals") {
    const auto f = scenario_one(5, 50, 50);
    BootstrapConfig cfg;
    cfg.replicates = 1;
    cfg.targets = {{{0.5}, {}}};
    const auto r = residual_bootstrap(f.pair, f.nd, f.d, cfg);
    CHECK(r.targets[0].auc.lower == r.targets[0].auc.upper);
    CHECK(r.targets[0].youden_index.lower == r.targets[0].youden_index.upper);
}

TEST_CASE("a single distinct residual per group cannot be refitted") {
    // Every resample is identical, and its MAD scale is zero.
    RobustFit f;
    f.beta = Eigen::VectorXd::Zero(1);
    f.sigma = 1.0;
    f.std_residuals = Eigen::VectorXd::Constant(5, 0.5);
    f.huber_weights = Eigen::VectorXd::Ones(5);
    f.truncated_weights = Eigen::VectorXd::Ones(5);
    const PopulationPair pair{PopulationFit(SplineSpec{}, f), PopulationFit(SplineSpec{}, f)};
    GroupSample s;
    s.outcome = Eigen::VectorXd::Constant(5, 0.5);
    s.covariates.resize(5, 0);
    BootstrapConfig cfg;
    cfg.replicates = 20;
    cfg.targets = {{{}, {}}};
    CHECK_THROWS_WITH_AS(residual_bootstrap(pair, s, s, cfg), doctest::Contains("every bootstrap replicate failed"),
                         NumericalError);
}

TEST_CASE("failed refits are counted and flagged") {
    // Two residual values in four rows: a resample drawing one value four
    // times has zero MAD, which happens in about 23% of replicates.
    const std::vector<double> eps{0.5, -0.5, 0.5, -0.5};
    const PopulationPair pair = point_mass_pair(eps, eps);
    GroupSample s;
    s.outcome = vec(eps);
    s.covariates.resize(4, 0);
    BootstrapConfig cfg;
    cfg.replicates = 200;
    cfg.targets = {{{}, {}}};
    const auto r = residual_bootstrap(pair, s, s, cfg);
    CHECK(r.failed > 20);
    CHECK(r.failed < 80);
    CHECK(r.reliability_warning);
    int not_ok = 0;
    for (bool ok : r.replicate_ok) not_ok += !ok;
    CHECK(not_ok == r.failed);
    CHECK(r.targets[0].auc.lower <= r.targets[0].auc.upper);
}

TEST_CASE("invalid configurations") {
    const auto f = scenario_one(6, 40, 40);
    BootstrapConfig cfg;
    cfg.targets = {{{0.5}, {}}};
    cfg.replicates = 0;
    CHECK_THROWS_AS(residual_bootstrap(f.pair, f.nd, f.d, cfg), UsageError);
    cfg.replicates = 10;
    cfg.alpha = 1.0;
    CHECK_THROWS_AS(residual_bootstrap(f.pair, f.nd, f.d, cfg), UsageError);
    cfg.alpha = 0.05;
    CHECK_THROWS_AS(residual_bootstrap(f.pair, f.d, f.d, cfg), DataError);
    cfg.targets = {{{7.0}, {}}};
    CHECK_THROWS_AS(residual_bootstrap(f.pair, f.nd, f.d, cfg), ExtrapolationError);
}

TEST_CASE("percentile interval coverage at x = 0.5" * doctest::timeout(600)) {
    const std::vector<double> x{0.5};
    const double truth = true_auc(Scenario::preset("I"), x);
    int covered = 0;
    const int studies = 200;
    for (int s = 0; s < studies; ++s) {
        const auto f = scenario_one(stream_seed(2024, s), 100, 100);
        BootstrapConfig cfg;
        cfg.replicates = 200;
        cfg.seed = stream_seed(77, s);
        cfg.targets = {{x, {}}};
        const auto r = residual_bootstrap(f.pair, f.nd, f.d, cfg);
        covered += r.targets[0].auc.lower <= truth && truth <= r.targets[0].auc.upper;
    }
    const double coverage = static_cast<double>(covered) / studies;
    MESSAGE("coverage = " << coverage);
    CHECK(coverage >= 0.88);
    CHECK(coverage <= 0.99);
}

}
