#include <doctest.h>

#include <cmath>

#include "robroc/errors.hpp"
#include "robroc/model_select.hpp"
#include "robroc/random.hpp"
#include "support.hpp"

using namespace robroc;
using namespace robroc::testing;

namespace {

// Fit handle with prescribed standardized residuals (sigma = 1, beta = 0).
RobustFit residual_fit(const Eigen::VectorXd& u, Eigen::Index q) {
    RobustFit f;
    f.beta = Eigen::VectorXd::Zero(q);
    f.sigma = 1.0;
    f.std_residuals = u;
    f.huber_weights = Eigen::VectorXd::Ones(u.size());
    f.truncated_weights = Eigen::VectorXd::Ones(u.size());
    return f;
}

} // namespace

TEST_SUITE("model_select") {

TEST_CASE("rAIC on hand-computed cases") {
    // Zero residuals: U = 0 and log(1) = 0.
    Rng rng(41);
    Eigen::MatrixXd z(10, 4);
    for (Eigen::Index i = 0; i < 10; ++i) {
        z(i, 0) = 1.0;
        for (Eigen::Index h = 1; h < 4; ++h) z(i, h) = rng.uniform();
    }
    const auto zero = raic(residual_fit(Eigen::VectorXd::Zero(10), 4), z, Eigen::VectorXd::Zero(10));
    CHECK(zero.raic == doctest::Approx(0.0));
    CHECK(zero.trace == doctest::Approx(0.0));

    // Common magnitude c <= b: U = c^2 J, so trace = c^2 Q.
    Eigen::VectorXd y(10);
    for (int i = 0; i < 10; ++i) y(i) = (i % 3 == 0) ? -0.5 : 0.5;
    const auto common = raic(residual_fit(y, 4), z, y);
    CHECK(common.trace == doctest::Approx(0.25 * 4));
    CHECK(common.raic == doctest::Approx(4.0));

    // Intercept only, residuals {0.5, 3}: J = 0.5, U = (0.25 + b^2) / 2.
    const Eigen::MatrixXd one = Eigen::MatrixXd::Ones(2, 1);
    const Eigen::VectorXd u = vec({0.5, 3.0});
    const auto small = raic(residual_fit(u, 1), one, u);
    CHECK(small.trace == doctest::Approx(2.059025));
    CHECK(small.raic == doctest::Approx(8.2361));
}

TEST_CASE("rAIC ignores row order") {
    Rng rng(42);
    const auto s = normal_sample(rng, 80, [](double x) { return std::cos(4 * x); }, 0.5);
    const auto spec = make_spec(s.covariates, std::vector<int>{2});
    const Eigen::MatrixXd z = build_design(s.covariates, spec);
    const auto fit = irls_fit(z, s.outcome);
    const auto a = raic(fit, z, s.outcome);
    Eigen::PermutationMatrix<Eigen::Dynamic> perm(80);
    perm.setIdentity();
    std::shuffle(perm.indices().data(), perm.indices().data() + 80, rng.engine());
    const Eigen::MatrixXd zp = perm * z;
    const Eigen::VectorXd yp = perm * s.outcome;
    const auto b = raic(irls_fit(zp, yp), zp, yp);
    CHECK(a.raic == doctest::Approx(b.raic).epsilon(1e-9));
}

TEST_CASE("singular information matrix") {
    // Every residual beyond b leaves psi' = 0 everywhere.
    const Eigen::MatrixXd one = Eigen::MatrixXd::Ones(3, 1);
    const Eigen::VectorXd u = vec({-5, 4, 6});
    CHECK_THROWS_WITH_AS(raic(residual_fit(u, 1), one, u), doctest::Contains("information matrix singular"),
                         NumericalError);
}

TEST_CASE("knot grid is the lexicographic Cartesian product") {
    const auto g = knot_grid({{0, 3}, {1, 2}});
    const std::vector<std::vector<int>> expect{{0, 1}, {0, 2}, {3, 1}, {3, 2}};
    CHECK(g == expect);
}

TEST_CASE("selection picks the minimum and reports every candidate") {
    Rng rng(43);
    const auto s = normal_sample(rng, 150, [](double x) { return std::sin(6.0 * x); }, 0.3);
    const auto r = select_knots(s, {{4, 0, 2, 2}});
    REQUIRE(r.candidates.size() == 3);
    CHECK(r.candidates[0].knots == std::vector<int>{0});
    CHECK(r.candidates[2].knots == std::vector<int>{4});
    for (const auto& c : r.candidates) {
        REQUIRE(c.value);
        CHECK(r.best().value->raic <= c.value->raic);
        REQUIRE(c.fit);
    }
    CHECK(r.best().knots != std::vector<int>{0});  // strong curvature needs knots

    const auto single = select_knots(s, {{2}});
    CHECK(single.candidates.size() == 1);
    CHECK(single.best().knots == std::vector<int>{2});

    const auto explicit_list = select_knots_among(s, {{3}, {0}}, {}, {}, false);
    CHECK(explicit_list.candidates.front().knots == std::vector<int>{0});
    CHECK_FALSE(explicit_list.candidates.front().fit);
}

TEST_CASE("smaller model usually wins on pure noise") {
    Rng rng(44);
    int small_wins = 0;
    const int reps = 60;
    for (int r = 0; r < reps; ++r) {
        const auto s = normal_sample(rng, 100, [](double) { return 0.0; }, 1.0);
        small_wins += select_knots(s, {{0, 3}}, {}, {}, false).best().knots == std::vector<int>{0};
    }
    CHECK(small_wins > reps / 2);
}

TEST_CASE("all candidates failing is an error with diagnostics") {
    GroupSample s;
    s.outcome = Eigen::VectorXd::Constant(12, 1.0);
    s.covariates = Eigen::VectorXd::LinSpaced(12, 0, 1);
    CHECK_THROWS_WITH_AS(select_knots(s, {{0, 1}}), doctest::Contains("degenerate scale"), NumericalError);
    CHECK_THROWS_AS(select_knots(s, {{0}, {1}}), UsageError);
}

TEST_CASE("linear terms ignore their candidate set") {
    Rng rng(45);
    auto s = normal_sample(rng, 90, [](double x) { return x; }, 1.0);
    Eigen::MatrixXd x(90, 2);
    x.col(0) = s.covariates.col(0);
    for (int i = 0; i < 90; ++i) x(i, 1) = i % 2;
    s.covariates = x;
    const std::vector<TermKind> kinds{TermKind::spline, TermKind::linear};
    const auto r = select_knots(s, {{0, 1}, {0, 5}}, {}, kinds);
    CHECK(r.candidates.size() == 2);
    for (const auto& c : r.candidates) CHECK(c.knots[1] == 0);
}

}
