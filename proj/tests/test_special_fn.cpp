#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "pdpent/special_fn.hpp"
#include "support/digamma_reference.hpp"

namespace {

double oracle(double x) { return pdpent_test::digamma_reference(x); }

}  // namespace

TEST_CASE("digamma matches classical values") {
    // -EulerGamma
    CHECK(pdpent::digamma(1.0) == Catch::Approx(-0.5772156649015329).margin(1e-13));
    // 1 - EulerGamma, forced by psi(2) = psi(1) + 1
    CHECK(pdpent::digamma(2.0) == Catch::Approx(0.4227843350984671).margin(1e-13));
    // -EulerGamma - 2 ln 2
    CHECK(pdpent::digamma(0.5) == Catch::Approx(-1.9635100260214235).margin(1e-13));
}

TEST_CASE("digamma agrees with the high-precision oracle on [1e-3, 1e6]") {
    std::mt19937_64 gen(20240901);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        // log-uniform spread over the full range
        const double x = std::pow(10.0, -3.0 + 9.0 * unif(gen));
        const double err = std::abs(pdpent::digamma(x) - oracle(x));
        worst = std::max(worst, err);
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("digamma recurrence psi(x+1) = psi(x) + 1/x") {
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        const double x = std::pow(10.0, -3.0 + 7.0 * unif(gen));  // (1e-3, 1e4)
        const double lhs = pdpent::digamma(x + 1.0);
        const double rhs = pdpent::digamma(x) + 1.0 / x;
        REQUIRE(std::abs(lhs - rhs) <= 1e-12);
    }
}

TEST_CASE("digamma is strictly increasing") {
    std::vector<double> grid;
    for (double x = 1e-3; x < 1e6; x *= 1.37) grid.push_back(x);
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        REQUIRE(pdpent::digamma(grid[i]) < pdpent::digamma(grid[i + 1]));
    }
}

TEST_CASE("digamma stays inside its log bounds") {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int i = 0; i < 2000; ++i) {
        const double x = std::pow(10.0, -3.0 + 9.0 * unif(gen));
        const auto [lo, hi] = pdpent::digamma_log_bounds(x);
        const double psi = pdpent::digamma(x);
        REQUIRE(psi >= lo);
        REQUIRE(psi <= hi);
    }
}

TEST_CASE("digamma_log_bounds values") {
    const auto [lo1, hi1] = pdpent::digamma_log_bounds(1.0);
    CHECK(lo1 == Catch::Approx(-1.0).margin(1e-15));
    CHECK(hi1 == Catch::Approx(-0.5).margin(1e-15));

    const auto [lo10, hi10] = pdpent::digamma_log_bounds(10.0);
    CHECK(lo10 == Catch::Approx(std::log(10.0) - 0.1).margin(1e-15));
    CHECK(hi10 == Catch::Approx(std::log(10.0) - 0.05).margin(1e-15));

    const auto [lo5, hi5] = pdpent::digamma_log_bounds(1e5);
    CHECK(hi5 - lo5 == Catch::Approx(5e-6).margin(1e-16));
    const double psi5 = pdpent::digamma(1e5);
    CHECK((psi5 >= lo5 && psi5 <= hi5));
    // consistent with the large-x approximation psi(x) ~ log x - 1/(2x)
    CHECK(psi5 == Catch::Approx(std::log(1e5) - 0.5e-5).margin(1e-9));
}

TEST_CASE("digamma_weighted_step equals psi(x) + 1") {
    CHECK(pdpent::digamma_weighted_step(1.0) ==
          Catch::Approx(0.4227843350984671).margin(1e-12));
    CHECK(pdpent::digamma_weighted_step(2.0) ==
          Catch::Approx(oracle(2.0) + 1.0).margin(1e-12));
    // raw difference obeys the identity
    CHECK(pdpent::digamma_weighted_step_raw(3.7) ==
          Catch::Approx(oracle(3.7) + 1.0).margin(1e-10));

    std::mt19937_64 gen(13);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int i = 0; i < 500; ++i) {
        const double x = std::pow(10.0, -3.0 + 6.0 * unif(gen));
        REQUIRE(std::abs(pdpent::digamma_weighted_step_raw(x) -
                         pdpent::digamma_weighted_step(x)) <= 1e-10);
    }
}

TEST_CASE("digamma_weighted_step is increasing") {
    double prev = pdpent::digamma_weighted_step(1e-3);
    for (double x = 2e-3; x < 1e4; x *= 1.29) {
        const double cur = pdpent::digamma_weighted_step(x);
        REQUIRE(cur > prev);
        prev = cur;
    }
}

TEST_CASE("digamma rejects non-positive and non-finite arguments") {
    CHECK_THROWS_AS(pdpent::digamma(0.0), std::domain_error);
    CHECK_THROWS_AS(pdpent::digamma(-1.5), std::domain_error);
    CHECK_THROWS_AS(pdpent::digamma(std::nan("")), std::domain_error);
    CHECK_THROWS_AS(pdpent::digamma(std::numeric_limits<double>::infinity()),
                    std::domain_error);
    CHECK_THROWS_AS(pdpent::digamma_weighted_step(0.0), std::domain_error);
    CHECK_THROWS_AS(pdpent::digamma_log_bounds(-2.0), std::domain_error);
}
