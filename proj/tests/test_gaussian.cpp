#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "doctest.h"
#include "support/oracles.hpp"
#include "testroll/dist.hpp"
#include "testroll/gaussian.hpp"

using namespace testroll;

TEST_CASE("gaussian error probability is the scaled normal tail") {
    CHECK(gaussian_error_prob(100.0, GaussianState(0.2, 1.0)) ==
          doctest::Approx(0.158655253931457).epsilon(1e-13));
    CHECK(gaussian_error_prob(400.0, GaussianState(0.2, 1.0)) ==
          doctest::Approx(0.0227501319481792).epsilon(1e-13));
    // Doubling sigma halves the standardized effect.
    CHECK(gaussian_error_prob(400.0, GaussianState(0.2, 2.0)) ==
          doctest::Approx(0.158655253931457).epsilon(1e-13));
    // Sign of the effect is irrelevant.
    CHECK(gaussian_error_prob(100.0, GaussianState(-0.2, 1.0)) ==
          gaussian_error_prob(100.0, GaussianState(0.2, 1.0)));
    CHECK_THROWS_AS(gaussian_error_prob(0.0, GaussianState(0.2, 1.0)),
                    std::domain_error);
}

TEST_CASE("limit curve values match hand evaluation") {
    CHECK(limit_curve_value(0.0, 0.0) == 1.0);
    CHECK(limit_curve_value(5.0, 0.0) == 1.0);
    CHECK(limit_curve_value(2.0, 1.0) ==
          doctest::Approx(0.8012519569012009).epsilon(1e-13));
    // k = 0 leaves only the tail term, which decreases from 1 to 0.
    CHECK(limit_curve_value(0.0, 1.0) ==
          doctest::Approx(2.0 * 0.158655253931457).epsilon(1e-12));
    CHECK_THROWS_AS(limit_curve_value(-1.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(limit_curve_value(2.0, -0.5), std::domain_error);
}

TEST_CASE("limit curve supremum: flat for small ratios, interior bump beyond two") {
    for (double k : {0.0, 0.5, 1.7, 2.0}) {
        const LimitCurveSup sup = limit_curve_sup(k);
        CHECK(sup.argmax == 0.0);
        CHECK(sup.value == 1.0);
    }

    const LimitCurveSup three = limit_curve_sup(3.0);
    CHECK(three.argmax == doctest::Approx(std::sqrt(1.0 / 3.0)).epsilon(1e-15));
    CHECK(three.value == doctest::Approx(1.1486118288189964).epsilon(1e-13));

    // Cross-check against a derivative-free maximizer.
    for (double k : {2.5, 3.0, 5.0, 8.0}) {
        const LimitCurveSup sup = limit_curve_sup(k);
        const oracle::MaxPoint ref = oracle::golden_max(
            [k](double t) { return limit_curve_value(k, t); }, 0.0, 3.0);
        CHECK(sup.value == doctest::Approx(ref.value).epsilon(1e-10));
        CHECK(std::abs(sup.argmax - ref.x) < 1e-5);
        CHECK(sup.value > 1.0);
    }
}

TEST_CASE("limit curve derivative identity") {
    // d/dt f_k(t) = phi(t) (k (1 - t^2) - 2); check by central difference.
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> ks(0.0, 6.0);
    std::uniform_real_distribution<double> ts(0.05, 2.5);
    const double h = 1e-5;
    for (int trial = 0; trial < 100; ++trial) {
        const double k = ks(rng), t = ts(rng);
        const double numeric =
            (limit_curve_value(k, t + h) - limit_curve_value(k, t - h)) / (2.0 * h);
        const double analytic = normal_pdf(t) * (k * (1.0 - t * t) - 2.0);
        CHECK(numeric == doctest::Approx(analytic).epsilon(1e-6));
    }
}

TEST_CASE("marginal ratio reduces to the limit curve") {
    const double n_pop = 1000.0, m = 100.0;
    const GaussianState state(0.2, 1.0);
    const double k = (n_pop - m) / m;
    const double t = std::sqrt(m) * state.tau / (2.0 * state.sigma);
    CHECK(gaussian_marginal_ratio(n_pop, m, state) == limit_curve_value(k, t));
    CHECK_THROWS_AS(gaussian_marginal_ratio(1000.0, 0.0, state), std::domain_error);
    CHECK_THROWS_AS(gaussian_marginal_ratio(1000.0, 1000.0, state), std::domain_error);
}

TEST_CASE("marginal ratio equals the regret derivative ratio") {
    // eta(m) = -R'(m) / C'(m) with R(m) = (N - m) tau Phi(-sqrt(m) tau / 2 sigma)
    // and C(m) = m tau / 2; central differences confirm the closed form.
    const double n_pop = 2000.0;
    const GaussianState state(0.3, 1.0);
    for (double m : {50.0, 200.0, 650.0, 1500.0}) {
        const double h = 1e-3 * m;
        auto risk = [&](double mm) {
            return (n_pop - mm) * state.tau * gaussian_error_prob(mm, state);
        };
        const double slope = (risk(m + h) - risk(m - h)) / (2.0 * h);
        const double numeric = -slope / (state.tau / 2.0);
        CHECK(gaussian_marginal_ratio(n_pop, m, state) ==
              doctest::Approx(numeric).epsilon(1e-4));
    }
}

TEST_CASE("even sample-size threshold rounds a third of the population up") {
    struct Case { long population; long expected; };
    const Case cases[] = {{6, 2}, {12, 4}, {300, 100}, {1000, 334}, {8, 4}, {10, 4}};
    for (const Case& c : cases) {
        const GaussianWmbThreshold th = gaussian_wmb_threshold(c.population);
        CHECK(th.even_m == c.expected);
        CHECK(th.continuous == doctest::Approx(c.population / 3.0).epsilon(1e-15));
        CHECK(th.even_m % 2 == 0);
        CHECK(double(th.even_m) >= th.continuous - 1e-12);
        CHECK(double(th.even_m) < th.continuous + 2.0);
    }
    CHECK_THROWS_AS(gaussian_wmb_threshold(0), std::invalid_argument);
    CHECK_THROWS_AS(gaussian_wmb_threshold(-6), std::invalid_argument);
}

TEST_CASE("threshold splits feasibility of the marginal ratio supremum") {
    // Below a third of the population the adversary can still push the
    // ratio above 1; at and beyond a third it cannot.
    for (long n_pop : {12L, 300L, 1000L}) {
        const GaussianWmbThreshold th = gaussian_wmb_threshold(n_pop);
        auto sup_at = [&](double m) {
            const double k = (double(n_pop) - m) / m;
            return limit_curve_sup(k).value;
        };
        CHECK(sup_at(double(th.even_m)) <= 1.0 + 1e-12);
        if (th.even_m - 2 >= 2) CHECK(sup_at(double(th.even_m - 2)) > 1.0);
    }
}
