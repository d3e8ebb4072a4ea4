#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "doctest.h"
#include "testroll/criteria.hpp"
#include "testroll/gaussian.hpp"
#include "testroll/search.hpp"

using namespace testroll;

TEST_CASE("welfare breakdown matches a hand-computed case") {
    const EvalBreakdown b = evaluate(DesignContext(10, 4), BernoulliState(0.7, 0.3));
    CHECK(b.experiment_size == 4);
    CHECK(b.error_prob == doctest::Approx(0.2160).epsilon(1e-13));
    CHECK(b.experiment_cost == doctest::Approx(0.8).epsilon(1e-14));
    CHECK(b.rollout_risk == doctest::Approx(0.51840).epsilon(1e-12));
    CHECK(b.regret == doctest::Approx(1.31840).epsilon(1e-12));
    CHECK(b.oracle_welfare == doctest::Approx(7.0).epsilon(1e-14));
    REQUIRE(b.relative_regret.has_value());
    CHECK(*b.relative_regret == doctest::Approx(1.3184 / 7.0).epsilon(1e-12));

    // No data, no experiment cost: the rollout is a fair coin.
    const EvalBreakdown none = evaluate(DesignContext(10, 0), BernoulliState(0.7, 0.3));
    CHECK(none.experiment_cost == 0.0);
    CHECK(none.rollout_risk == doctest::Approx(10.0 * 0.4 * 0.5).epsilon(1e-14));

    // Everything spent on the experiment: no rollout risk left.
    const EvalBreakdown all = evaluate(DesignContext(10, 10), BernoulliState(0.7, 0.3));
    CHECK(all.rollout_risk == 0.0);
    CHECK(all.experiment_cost == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("breakdown is mirror symmetric") {
    std::mt19937 rng(60);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 60; ++trial) {
        const double a = unit(rng), b = unit(rng);
        const long m = 2 * long(rng() % 20);
        const DesignContext ctx(60, m);
        const EvalBreakdown x = evaluate(ctx, BernoulliState(a, b));
        const EvalBreakdown y = evaluate(ctx, BernoulliState(b, a));
        CHECK(x.experiment_cost == y.experiment_cost);
        CHECK(x.rollout_risk == y.rollout_risk);
        CHECK(x.regret == y.regret);
        CHECK(x.oracle_welfare == y.oracle_welfare);
    }
}

TEST_CASE("regret decomposes into cost plus rollout share of per-unit regret") {
    std::mt19937 rng(61);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 1000; ++trial) {
        double hi = unit(rng), lo = unit(rng);
        if (hi < lo) std::swap(hi, lo);
        const long m = 2 * long(rng() % 26);
        const DesignContext ctx(100, m);
        const BernoulliState state(hi, lo);
        const EvalBreakdown b = evaluate(ctx, state);
        const double per_unit = superpop_regret(state, error_prob(ctx, state));
        const double recomposed =
            0.5 * double(m) * state.tau() + double(ctx.rollout_size()) * per_unit;
        CHECK(b.regret == doctest::Approx(recomposed).epsilon(1e-12));
    }
    CHECK(superpop_regret(BernoulliState(0.7, 0.3), 0.2160) ==
          doctest::Approx(0.08640).epsilon(1e-13));
    CHECK_THROWS_AS(superpop_regret(BernoulliState(0.7, 0.3), 1.5),
                    std::invalid_argument);
}

TEST_CASE("relative regret anchors and validation") {
    CHECK(relative_regret(DesignContext(10, 4), BernoulliState(0.7, 0.3)) ==
          doctest::Approx(1.3184 / 7.0).epsilon(1e-12));

    // Thin-margin boundary state: closed form
    //   m/(2N) + (1 - m/N) (1 - eps)^(m/2) / 2.
    const double eps = 1e-4;
    const double closed =
        100.0 / 1000.0 + (1.0 - 100.0 / 500.0) * 0.5 * std::pow(1.0 - eps, 50.0);
    CHECK(relative_regret(DesignContext(500, 100), BernoulliState(eps, 0.0)) ==
          doctest::Approx(closed).epsilon(1e-12));
    CHECK(closed == doctest::Approx(0.49800489216920374).epsilon(1e-12));

    CHECK_THROWS_AS(relative_regret(DesignContext(10, 2), BernoulliState(0.0, 0.0)),
                    std::domain_error);
    // One dead arm is fine as long as the other converts.
    CHECK(relative_regret(DesignContext(10, 2), BernoulliState(0.4, 0.0)) > 0.0);
}

TEST_CASE("relative regret flattens to one half as the gap floor shrinks") {
    const long n_pop = 500;
    double previous_dev = 1.0;
    for (double eps : {1e-2, 1e-3, 1e-4}) {
        const BernoulliState probe(eps, 0.0);
        double worst_dev = 0.0;
        for (long m = 0; m <= n_pop; m += 2) {
            const double rr = relative_regret(DesignContext(n_pop, m), probe);
            worst_dev = std::max(worst_dev, std::abs(rr - 0.5));
        }
        CHECK(worst_dev < previous_dev);
        previous_dev = worst_dev;
    }
    CHECK(previous_dev < 0.005);
}

TEST_CASE("marginal ratio matches the hand-computed case and the identity") {
    const DesignContext ctx(10, 4);
    const BernoulliState state(0.7, 0.3);
    const MarginalRatio eta = wmb_ratio(ctx, state);
    CHECK(eta.experiment_size == 4);
    CHECK(eta.value == doctest::Approx(0.64368).epsilon(1e-12));

    const double e4 = error_prob(DesignContext(10, 4), state);
    const double e6 = error_prob(DesignContext(10, 6), state);
    CHECK(eta.value == doctest::Approx(6.0 * e4 - 4.0 * e6).epsilon(1e-14));

    CHECK_THROWS_AS(wmb_ratio(DesignContext(10, 10), state), std::domain_error);
}

TEST_CASE("marginal ratio is exactly one on the diagonal") {
    for (double mu : {0.0, 0.25, 0.5, 1.0})
        for (long m : {0L, 2L, 40L})
            CHECK(wmb_ratio(DesignContext(100, m), BernoulliState(mu, mu)).value == 1.0);
}

TEST_CASE("small effects keep the ratio above one at small experiments") {
    CHECK(wmb_ratio(DesignContext(500, 2), BernoulliState(0.51, 0.50)).value > 1.0);
    CHECK(wmb_ratio(DesignContext(500, 0), BernoulliState(0.51, 0.50)).value > 1.0);
}

TEST_CASE("marginal ratio never exceeds the rollout-scaled hoeffding cap") {
    std::mt19937 rng(62);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 400; ++trial) {
        double hi = unit(rng), lo = unit(rng);
        if (hi < lo) std::swap(hi, lo);
        if (hi == lo) continue;
        const long n_pop = 2 * (20 + long(rng() % 200));
        const long m = 2 * long(rng() % (size_t(n_pop) / 2 - 1));
        const DesignContext ctx(n_pop, m);
        const BernoulliState state(hi, lo);
        const double cap =
            double(ctx.rollout_size()) * hoeffding_error_bound(ctx, state);
        CHECK(wmb_ratio(ctx, state).value <= cap + 1e-12);
    }
}

TEST_CASE("normal-approximation ratio agrees with the exact one near the diagonal") {
    const long n_pop = 2000;
    const long m = 1000;
    const DesignContext ctx(n_pop, m);
    const LocalRegion region(0.1, 1.0, n_pop);
    double worst = 0.0;
    for (const BernoulliState& state : region.grid(10, 10)) {
        const double exact = wmb_ratio(ctx, state).value;
        const double approx = wmb_ratio_na(ctx, state).value;
        worst = std::max(worst, std::abs(exact - approx));
    }
    CHECK(worst <= 0.05);
}

TEST_CASE("normal-approximation ratio validation and degenerate cases") {
    CHECK_THROWS_AS(wmb_ratio_na(DesignContext(100, 0), BernoulliState(0.6, 0.4)),
                    std::domain_error);
    CHECK_THROWS_AS(wmb_ratio_na(DesignContext(100, 10), BernoulliState(0.0, 0.0)),
                    std::domain_error);
    CHECK(wmb_ratio_na(DesignContext(100, 10), BernoulliState(0.5, 0.5)).value == 1.0);
}

TEST_CASE("boundary pathology ratio crosses one at half the population") {
    const long n_pop = 1000000;
    const double c = 0.1;
    for (double share : {0.30, 0.40, 0.45})
        CHECK(boundary_pathology_ratio(n_pop, long(share * n_pop), c) > 1.0);
    for (double share : {0.55, 0.60})
        CHECK(boundary_pathology_ratio(n_pop, long(share * n_pop), c) < 1.0);

    // At exactly half the population the ratio is 1 - c^2/32 + O(c^3).
    for (double cc : {0.1, 0.05, 0.01}) {
        const double at_half = boundary_pathology_ratio(n_pop, n_pop / 2, cc);
        CHECK(std::abs(at_half - 1.0) <= cc * cc / 8.0);
        CHECK(at_half < 1.0);
    }

    CHECK_THROWS_AS(boundary_pathology_ratio(1000, 200, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(boundary_pathology_ratio(1000, 200, -0.5), std::invalid_argument);
    CHECK_THROWS_AS(boundary_pathology_ratio(1000, 1200, 0.1), std::invalid_argument);
}
