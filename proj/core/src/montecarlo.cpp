#include "testroll/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "parallel.hpp"
#include "summation.hpp"

namespace testroll {

namespace {

constexpr long kBatch = 8192;
constexpr double kTwoPi = 6.283185307179586476925286766559;

// splitmix64: cheap, seedable, and stable across platforms, which keeps
// estimates bitwise reproducible for a given (seed, config).
struct SplitMix {
    std::uint64_t s;
    std::uint64_t next() {
        std::uint64_t z = (s += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }
    // Uniform in the open interval (0, 1); never exactly 0 or 1, so it
    // is safe inside logs.
    double uniform() { return (double(next() >> 11) + 0.5) * 0x1.0p-53; }
};

// One independent stream per batch, derived from the seed and the batch
// counter; batch results are merged in batch order, so the partition of
// batches over workers cannot influence the estimate.
SplitMix stream_for(std::uint64_t seed, long batch) {
    SplitMix warm{seed};
    std::uint64_t a = warm.next();
    warm.s = a ^ (0x9E3779B97F4A7C15ull * std::uint64_t(batch + 1));
    warm.next();
    return warm;
}

struct NormalSource {
    SplitMix gen;
    double spare = 0.0;
    bool has_spare = false;
    double draw() {
        if (has_spare) {
            has_spare = false;
            return spare;
        }
        const double r = std::sqrt(-2.0 * std::log(gen.uniform()));
        const double a = kTwoPi * gen.uniform();
        spare = r * std::sin(a);
        has_spare = true;
        return r * std::cos(a);
    }
};

struct BatchMoments {
    double sum = 0.0;
    double sumsq = 0.0;
    long count = 0;
};

long bernoulli_count(SplitMix& gen, long n, double p) {
    long successes = 0;
    for (long i = 0; i < n; ++i)
        if (gen.uniform() < p) ++successes;
    return successes;
}

SimEstimate merge_batches(const std::vector<BatchMoments>& batches) {
    detail::CompensatedSum sum, sumsq;
    long count = 0;
    for (const BatchMoments& b : batches) {
        sum.add(b.sum);
        sumsq.add(b.sumsq);
        count += b.count;
    }
    SimEstimate est;
    est.replications = count;
    est.mean = sum.value() / double(count);
    if (count > 1) {
        const double var =
            std::max(0.0, (sumsq.value() - double(count) * est.mean * est.mean) /
                              double(count - 1));
        est.std_error = std::sqrt(var / double(count));
    }
    return est;
}

template <typename PerRep>
SimEstimate run_batches(const SimConfig& config, int workers, PerRep per_rep) {
    const long reps = config.replications;
    const long n_batches = (reps + kBatch - 1) / kBatch;
    std::vector<BatchMoments> batches(static_cast<size_t>(n_batches));
    detail::parallel_blocks(n_batches, detail::resolve_workers(workers),
                            [&](long lo, long hi, int) {
        for (long b = lo; b < hi; ++b) {
            // One stream per batch, shared by uniform and normal draws.
            NormalSource normals{stream_for(config.seed, b)};
            const long first = b * kBatch;
            const long last = std::min(reps, first + kBatch);
            BatchMoments bm;
            for (long r = first; r < last; ++r) {
                const double x = per_rep(normals);
                bm.sum += x;
                bm.sumsq += x * x;
                ++bm.count;
            }
            batches[size_t(b)] = bm;
        }
    });
    return merge_batches(batches);
}

// Decides the experiment outcome and returns {winner_is_treated, tied}.
struct RuleOutcome {
    bool pick_treated = true;
    bool tied = false;
};

}  // namespace

SimConfig::SimConfig(const DesignContext& design, BernoulliState state, long reps,
                     std::uint64_t rng_seed)
    : ctx(design), model(state), replications(reps), seed(rng_seed) {
    if (replications < 1) throw std::invalid_argument("replications must be >= 1");
}

SimConfig::SimConfig(const DesignContext& design, GaussianState state, long reps,
                     std::uint64_t rng_seed)
    : ctx(design), model(state), replications(reps), seed(rng_seed) {
    if (replications < 1) throw std::invalid_argument("replications must be >= 1");
}

SimEstimate simulate_error_prob(const SimConfig& config, int workers) {
    if (config.replications < 1) throw std::invalid_argument("replications must be >= 1");
    const long n = config.ctx.arm_size();
    if (n == 0) {
        // No data: the rule always ties, matching the e(0) = 1/2 convention.
        return {0.5, 0.0, config.replications};
    }

    if (std::holds_alternative<BernoulliState>(config.model)) {
        const BernoulliState s = std::get<BernoulliState>(config.model);
        // With equal means the treated arm is designated "better"; by
        // symmetry the estimator then concentrates on exactly 1/2.
        const bool treated_better = s.mu1 >= s.mu0;
        return run_batches(config, workers, [&](NormalSource& src) -> double {
            const long t = bernoulli_count(src.gen, n, s.mu1);
            const long c = bernoulli_count(src.gen, n, s.mu0);
            if (t == c) return 0.5;
            const bool picked_treated = t > c;
            return picked_treated == treated_better ? 0.0 : 1.0;
        });
    }

    const GaussianState g = std::get<GaussianState>(config.model);
    const double sd = g.sigma * std::sqrt(2.0 / double(config.ctx.experiment_size));
    const bool treated_better = g.tau >= 0.0;
    return run_batches(config, workers, [&](NormalSource& src) -> double {
        const double m1 = g.tau + sd * src.draw();
        const double m0 = sd * src.draw();
        if (m1 == m0) return 0.5;
        const bool picked_treated = m1 > m0;
        return picked_treated == treated_better ? 0.0 : 1.0;
    });
}

SimEstimate simulate_regret(const SimConfig& config, int workers) {
    if (config.replications < 1) throw std::invalid_argument("replications must be >= 1");
    const long n = config.ctx.arm_size();
    const long rollout = config.ctx.rollout_size();

    if (std::holds_alternative<BernoulliState>(config.model)) {
        const BernoulliState s = std::get<BernoulliState>(config.model);
        const double oracle = double(config.ctx.population) * std::max(s.mu1, s.mu0);
        return run_batches(config, workers, [&](NormalSource& src) -> double {
            const long t = bernoulli_count(src.gen, n, s.mu1);
            const long c = bernoulli_count(src.gen, n, s.mu0);
            long welfare = t + c;
            if (t != c) {
                const double p = t > c ? s.mu1 : s.mu0;
                welfare += bernoulli_count(src.gen, rollout, p);
            } else {
                // Tied experiment: each remaining unit gets a coin-flip arm.
                for (long i = 0; i < rollout; ++i) {
                    const double p = (src.gen.next() & 1u) ? s.mu1 : s.mu0;
                    if (src.gen.uniform() < p) ++welfare;
                }
            }
            return oracle - double(welfare);
        });
    }

    const GaussianState g = std::get<GaussianState>(config.model);
    // Location invariance: arm means (tau, 0) without loss of generality.
    const double oracle = double(config.ctx.population) * std::max(g.tau, 0.0);
    return run_batches(config, workers, [&](NormalSource& src) -> double {
        double welfare = 0.0;
        double m1 = 0.0, m0 = 0.0;
        if (n > 0) {
            // Sufficient statistics: per-arm totals are normal with mean
            // n * mu and variance n * sigma^2.
            const double t_total = double(n) * g.tau + g.sigma * std::sqrt(double(n)) * src.draw();
            const double c_total = g.sigma * std::sqrt(double(n)) * src.draw();
            welfare += t_total + c_total;
            m1 = t_total / double(n);
            m0 = c_total / double(n);
        }
        if (rollout > 0) {
            double roll_total;
            const double roll_sd = g.sigma * std::sqrt(double(rollout));
            if (n == 0 || m1 == m0) {
                long treated_units = 0;
                for (long i = 0; i < rollout; ++i)
                    if (src.gen.next() & 1u) ++treated_units;
                roll_total = double(treated_units) * g.tau + roll_sd * src.draw();
            } else {
                const double mu = m1 > m0 ? g.tau : 0.0;
                roll_total = double(rollout) * mu + roll_sd * src.draw();
            }
            welfare += roll_total;
        }
        return oracle - welfare;
    });
}

}  // namespace testroll
