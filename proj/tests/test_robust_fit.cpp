#include <doctest.h>

#include <cmath>

#include "robroc/errors.hpp"
#include "robroc/random.hpp"
#include "robroc/robust_fit.hpp"
#include "robroc/spline_basis.hpp"
#include "support.hpp"

using namespace robroc;
using robroc::testing::vec;

namespace {

Eigen::MatrixXd linear_design(Rng& rng, int n, int p) {
    Eigen::MatrixXd z(n, p + 1);
    for (int i = 0; i < n; ++i) {
        z(i, 0) = 1.0;
        for (int h = 1; h <= p; ++h) z(i, h) = rng.uniform(-1.0, 2.0);
    }
    return z;
}

Eigen::VectorXd gaussian(Rng& rng, int n, double sd) {
    Eigen::VectorXd e(n);
    for (int i = 0; i < n; ++i) e(i) = sd * rng.normal();
    return e;
}

} // namespace

TEST_SUITE("robust_fit") {

TEST_CASE("Huber rho, psi and weight") {
    const double b = 1.345;
    CHECK(huber_rho(0.0, b) == 0.0);
    CHECK(huber_rho(1.0, b) == doctest::Approx(0.5));
    CHECK(huber_rho(2.0, b) == doctest::Approx(2.0 * b - b * b / 2.0));
    CHECK(huber_rho(2.0, b) == doctest::Approx(1.785488).epsilon(1e-6));
    CHECK(huber_rho(-2.0, b) == huber_rho(2.0, b));
    CHECK(huber_rho(b, b) == doctest::Approx(b * b / 2.0));

    CHECK(huber_psi(0.5, b) == 0.5);
    CHECK(huber_psi(3.0, b) == b);
    CHECK(huber_psi(-3.0, b) == -b);

    CHECK(huber_weight(1.0, b) == 1.0);
    CHECK(huber_weight(0.0, b) == 1.0);
    CHECK(huber_weight(2.69, b) == doctest::Approx(0.5));
    CHECK(huber_weight(-2.69, b) == doctest::Approx(0.5));

    // psi is the derivative of rho and psi(u) = u * weight(u).
    for (double u = -5.0; u <= 5.0; u += 0.37) {
        const double h = 1e-6;
        CHECK(huber_psi(u, b) == doctest::Approx((huber_rho(u + h, b) - huber_rho(u - h, b)) / (2 * h)).epsilon(1e-6));
        CHECK(huber_psi(u, b) == doctest::Approx(u * huber_weight(u, b)));
    }
}

TEST_CASE("MAD scale") {
    CHECK(mad_scale(vec({-2, -1, 0, 1, 2})) == doctest::Approx(1.4826));
    CHECK(mad_scale(vec({0, 0, 0})) == 0.0);
    CHECK(mad_scale(vec({1, -3, 2, 4})) == doctest::Approx(1.4826 * 2.5));
    const Eigen::VectorXd r = vec({0.3, -1.2, 5.0, 0.01, -0.7, 2.2});
    CHECK(mad_scale(Eigen::VectorXd(2.0 * r)) == doctest::Approx(2.0 * mad_scale(r)));
    // Uncentered: a shift changes the value.
    CHECK(mad_scale(Eigen::VectorXd(r.array() + 10.0)) != doctest::Approx(mad_scale(r)));
}

TEST_CASE("least squares") {
    const Eigen::MatrixXd one = Eigen::MatrixXd::Ones(5, 1);
    const auto mean_fit = ols_fit(one, vec({0, 0, 0, 0, 100}));
    CHECK(mean_fit.beta(0) == doctest::Approx(20.0));
    CHECK(mean_fit.sigma == doctest::Approx(std::sqrt((4 * 400.0 + 6400.0) / 4.0)));

    Rng rng(2);
    const Eigen::MatrixXd z = linear_design(rng, 40, 2);
    const Eigen::VectorXd beta = vec({1.0, -2.0, 0.5});
    const auto exact = ols_fit(z, z * beta);
    CHECK((exact.beta - beta).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(exact.sigma < 1e-10);

    const Eigen::VectorXd y = z * beta + gaussian(rng, 40, 1.0);
    const auto f = ols_fit(z, y);
    const Eigen::VectorXd r = y - z * f.beta;
    CHECK((z.transpose() * r).cwiseAbs().maxCoeff() <= 1e-8 * y.norm());

    Eigen::MatrixXd dup(10, 3);
    dup.col(0).setOnes();
    dup.col(1) = Eigen::VectorXd::LinSpaced(10, 0, 1);
    dup.col(2) = 2.0 * dup.col(1);
    CHECK_THROWS_WITH_AS(ols_fit(dup, Eigen::VectorXd::Ones(10)), doctest::Contains("singular design"),
                         NumericalError);
    CHECK_THROWS_WITH_AS(ols_fit(Eigen::MatrixXd::Ones(2, 2), vec({1, 2})), doctest::Contains("underdetermined"),
                         DataError);
}

TEST_CASE("IRLS equals OLS when no residual exceeds the threshold") {
    Rng rng(4);
    const int n = 60;
    const Eigen::MatrixXd z = linear_design(rng, n, 1);
    Eigen::VectorXd e(n);
    for (int i = 0; i < n; ++i) e(i) = (i % 2 == 0) ? 1.0 : -1.0;
    // Make the noise orthogonal to the design so OLS residuals stay at +-1.
    const Eigen::VectorXd e_perp = e - z * ols_fit(z, e).beta;
    const Eigen::VectorXd y = z * vec({2.0, 3.0}) + e_perp;
    const auto fit = irls_fit(z, y);
    const auto ols = ols_fit(z, y);
    REQUIRE(fit.std_residuals.cwiseAbs().maxCoeff() <= 1.345);
    CHECK((fit.beta - ols.beta).cwiseAbs().maxCoeff() < 1e-8);
    CHECK((fit.huber_weights.array() == 1.0).all());
    CHECK(fit.converged);
}

TEST_CASE("a gross outlier barely moves the robust fit") {
    Rng rng(7);
    const int n = 200;
    const double sd = 1.0;
    const Eigen::MatrixXd z = linear_design(rng, n, 1);
    const Eigen::VectorXd beta = vec({1.0, 2.0});
    const Eigen::VectorXd clean = z * beta + gaussian(rng, n, sd);
    Eigen::VectorXd dirty = clean;
    dirty(17) += 50.0 * sd;

    const auto clean_ols = ols_fit(z, clean);
    const auto robust = irls_fit(z, dirty);
    const auto dirty_ols = ols_fit(z, dirty);
    CHECK((robust.beta - clean_ols.beta).cwiseAbs().maxCoeff() < 0.05);
    CHECK(robust.truncated_weights(17) < 0.1);
    CHECK((dirty_ols.beta - clean_ols.beta).cwiseAbs().maxCoeff() > 0.2);
}

TEST_CASE("fit invariants") {
    Rng rng(8);
    const int n = 150;
    const Eigen::MatrixXd z = linear_design(rng, n, 2);
    Eigen::VectorXd y = z * vec({0.5, 1.0, -1.0}) + gaussian(rng, n, 1.0);
    for (int i = 0; i < 8; ++i) y(i * 11) += 12.0;
    const FitConfig cfg;
    const auto fit = irls_fit(z, y, cfg);
    REQUIRE(fit.converged);

    SUBCASE("weights follow the final standardized residuals") {
        const Eigen::VectorXd eps = (y - z * fit.beta) / fit.sigma;
        CHECK((eps - fit.std_residuals).cwiseAbs().maxCoeff() < 1e-12);
        for (int j = 0; j < n; ++j) {
            const double u = fit.std_residuals(j);
            CHECK(fit.huber_weights(j) == doctest::Approx(std::min(1.0, cfg.b / std::abs(u))));
            CHECK(fit.truncated_weights(j) == (std::abs(u) <= cfg.v ? 1.0 : fit.huber_weights(j)));
        }
        CHECK(fit.sigma == doctest::Approx(mad_scale(Eigen::VectorXd(y - z * fit.beta))));
    }

    SUBCASE("estimating equations hold at the solution") {
        const Eigen::VectorXd g = estimating_equations(z, fit);
        CHECK(g.cwiseAbs().maxCoeff() < 1e-6 * n);
    }

    SUBCASE("regression equivariance") {
        const Eigen::VectorXd gamma = vec({3.0, -0.25, 7.0});
        const auto shifted = irls_fit(z, Eigen::VectorXd(y + z * gamma), cfg);
        CHECK((shifted.beta - (fit.beta + gamma)).cwiseAbs().maxCoeff() < 1e-8);
        CHECK(shifted.sigma == doctest::Approx(fit.sigma).epsilon(1e-10));
    }

    SUBCASE("scale equivariance") {
        const double c = 3.7;
        const auto scaled = irls_fit(z, Eigen::VectorXd(c * y), cfg);
        CHECK((scaled.beta - c * fit.beta).cwiseAbs().maxCoeff() < 1e-8);
        CHECK(scaled.sigma == doctest::Approx(c * fit.sigma).epsilon(1e-7));
    }
}

TEST_CASE("degenerate and non-converging fits") {
    const Eigen::MatrixXd one = Eigen::MatrixXd::Ones(6, 1);
    CHECK_THROWS_WITH_AS(irls_fit(one, Eigen::VectorXd::Zero(6)), doctest::Contains("degenerate scale"),
                         NumericalError);

    Rng rng(9);
    const Eigen::MatrixXd z = linear_design(rng, 50, 1);
    Eigen::VectorXd y = z * vec({0.0, 1.0}) + gaussian(rng, 50, 1.0);
    y(3) += 30.0;
    FitConfig tight;
    tight.max_iterations = 1;
    tight.tolerance = 1e-300;
    const auto f = irls_fit(z, y, tight);
    CHECK_FALSE(f.converged);
    CHECK(f.iterations == 1);

    FitConfig bad;
    bad.b = 0.0;
    CHECK_THROWS_AS(bad.validate(), UsageError);
}

}
