#ifndef TESTROLL_MONTECARLO_HPP
#define TESTROLL_MONTECARLO_HPP

#include <cstdint>
#include <variant>

#include "testroll/bernoulli.hpp"
#include "testroll/gaussian.hpp"

namespace testroll {

/// A simulation request: the design, the outcome model, the number of
/// replications and the seed.  Identical configs produce bitwise
/// identical estimates regardless of the worker count: replications are
/// processed in fixed-size batches with per-batch counter-derived
/// streams, and batch results are merged in batch order.
struct SimConfig {
    DesignContext ctx;
    std::variant<BernoulliState, GaussianState> model;
    long replications = 100000;
    std::uint64_t seed = 1;

    SimConfig() = default;
    SimConfig(const DesignContext& design, BernoulliState state,
              long reps, std::uint64_t rng_seed);
    SimConfig(const DesignContext& design, GaussianState state,
              long reps, std::uint64_t rng_seed);
};

struct SimEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    long replications = 0;
};

/// Simulates matched-pair experiments and estimates the error
/// probability of the empirical success rule, ties counted as half an
/// error (a certain tie therefore estimates exactly 1/2 with zero
/// standard error).
SimEstimate simulate_error_prob(const SimConfig& config, int workers = 0);

/// Simulates the full test-then-roll cycle and estimates the expected
/// regret against the oracle welfare.  Tied experiments roll out each
/// remaining unit to a uniformly chosen arm.  Under the Gaussian model
/// arm means (tau, 0) are used; regret is location invariant.
SimEstimate simulate_regret(const SimConfig& config, int workers = 0);

}  // namespace testroll

#endif  // TESTROLL_MONTECARLO_HPP
