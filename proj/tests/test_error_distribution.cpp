#include <doctest.h>

#include <cmath>

#include "robroc/error_distribution.hpp"
#include "robroc/errors.hpp"
#include "robroc/random.hpp"
#include "support.hpp"

using namespace robroc;
using robroc::testing::vec;

TEST_SUITE("error_distribution") {

TEST_CASE("weighted ECDF values") {
    const WeightedEcdf u(vec({1, 2, 3}), vec({1, 1, 1}));
    CHECK(u.cdf(2.0) == doctest::Approx(2.0 / 3.0));
    CHECK(u.cdf(0.999) == 0.0);
    CHECK(u.cdf(3.0) == 1.0);
    CHECK(u.cdf(1e9) == 1.0);

    const WeightedEcdf w(vec({-1, 0, 3.5}), vec({1, 1, 0.4}));
    CHECK(w.cdf(0.0) == doctest::Approx(2.0 / 2.4));
    CHECK(w.cdf(-1.0) == doctest::Approx(1.0 / 2.4));
    CHECK(w.total_weight() == doctest::Approx(2.4));
}

TEST_CASE("quantile conventions") {
    const WeightedEcdf u(vec({3, 1, 2}), vec({1, 1, 1}));
    CHECK(u.quantile(0.5) == 2.0);
    CHECK(u.quantile(1.0) == 3.0);
    CHECK(u.quantile(0.0) == 1.0);
    CHECK(u.quantile(1.0 / 3.0) == 1.0);
    CHECK(u.quantile(std::nextafter(1.0 / 3.0, 1.0)) == 2.0);
}

TEST_CASE("ties merge into one support point") {
    const WeightedEcdf w(vec({2, 1, 2, 2}), vec({0.5, 1, 0.25, 0.25}));
    CHECK(w.support() == std::vector<double>{1.0, 2.0});
    CHECK(w.weights()[1] == doctest::Approx(1.0));
    CHECK(w.cdf(1.5) == doctest::Approx(0.5));
}

TEST_CASE("Galois property and monotone quantiles") {
    Rng rng(21);
    for (int rep = 0; rep < 20; ++rep) {
        const int n = 1 + static_cast<int>(rng.index(40));
        Eigen::VectorXd v(n), w(n);
        for (int i = 0; i < n; ++i) {
            v(i) = std::round(rng.normal() * 4.0) / 4.0;  // force some ties
            w(i) = rng.uniform(0.01, 1.0);
        }
        const WeightedEcdf e(v, w);
        double prev = -INFINITY;
        for (int k = 0; k <= 1000; ++k) {
            const double t = k / 1000.0;
            const double q = e.quantile(t);
            if (t > 0.0) CHECK(e.cdf(q) >= t);
            // Smallest such value: the next-lower support point has cdf < t.
            const auto& s = e.support();
            const auto it = std::lower_bound(s.begin(), s.end(), q);
            if (t > 0.0 && it != s.begin()) CHECK(e.cdf(*(it - 1)) < t);
            CHECK(q >= prev);
            prev = q;
        }
    }
}

TEST_CASE("invalid inputs") {
    CHECK_THROWS_AS(WeightedEcdf(vec({1, 2}), vec({1})), Error);
    CHECK_THROWS_AS(WeightedEcdf(vec({1, 2}), vec({1, 0})), Error);
    CHECK_THROWS_AS(WeightedEcdf(vec({1, NAN}), vec({1, 1})), Error);
    const WeightedEcdf empty;
    CHECK(empty.empty());
    CHECK_THROWS_AS(static_cast<void>(empty.quantile(0.5)), Error);
}

TEST_CASE("weighted mean") {
    const WeightedEcdf w(vec({-1, 1, 4}), vec({1, 1, 0.5}));
    CHECK(w.weighted_mean() == doctest::Approx((-1 + 1 + 2.0) / 2.5));
}

}
