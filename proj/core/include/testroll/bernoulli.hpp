#ifndef TESTROLL_BERNOULLI_HPP
#define TESTROLL_BERNOULLI_HPP

#include "testroll/dist.hpp"

namespace testroll {

/// A pair of Bernoulli success rates: mu1 for the treated arm, mu0 for
/// the control arm.  Both must lie in [0, 1].
struct BernoulliState {
    double mu1 = 0.0;
    double mu0 = 0.0;

    BernoulliState() = default;
    BernoulliState(double treated, double control);

    double tau() const { return mu1 - mu0; }              // treatment effect
    double mid() const { return 0.5 * (mu1 + mu0); }      // mu
    double half_gap() const { return 0.5 * (mu1 - mu0); } // delta
    double mid_var() const { double m = mid(); return m * (1.0 - m); }
};

/// Sizes of a finite-population experiment: population units, experiment
/// units (split evenly across the two arms), and per-arm size.
/// population and experiment_size must be even with
/// 0 <= experiment_size <= population.
struct DesignContext {
    long population = 0;       // N
    long experiment_size = 0;  // m

    DesignContext() = default;
    DesignContext(long n_total, long m_experiment);

    long arm_size() const { return experiment_size / 2; }
    long rollout_size() const { return population - experiment_size; }
};

/// lhs = e(m) - e(m + 2), rhs = halfGap * P(S_{m/2} = 0).  The two sides
/// agree exactly in real arithmetic; the gap measures floating error.
struct IdentityGap {
    double lhs = 0.0;
    double rhs = 0.0;
    double gap() const { return lhs - rhs; }
};

/// Probability that the empirical success rule rolls out the worse arm
/// after an experiment of ctx.experiment_size units, counting ties as
/// half an error.  Exact: computed from the paired-difference walk's
/// full distribution, not an approximation.  By convention e(0) = 1/2,
/// and states with mu1 == mu0 evaluate to exactly 1/2 at every m.
double error_prob(const DesignContext& ctx, const BernoulliState& state);

/// Probability of an exact tie between the two empirical means.
/// Requires experiment_size >= 2.
double tie_prob(const DesignContext& ctx, const BernoulliState& state);

/// Both sides of the one-step error decrement identity at ctx.experiment_size.
/// Requires experiment_size + 2 <= population.
IdentityGap exact_identity_gap(const DesignContext& ctx, const BernoulliState& state);

/// Hoeffding bound on the error probability: exp(-m tau^2 / 4).
/// A cheap, monotone-in-m cap used by the search pruning rules.
double hoeffding_error_bound(const DesignContext& ctx, const BernoulliState& state);

/// Incremental error-probability evaluator for one state across
/// consecutive experiment sizes m = 0, 2, 4, ...  Each advance() costs
/// O(m) work, so sweeping m up to M costs O(M^2 / 4) total instead of
/// the O(M^3) of independent evaluations.
class ErrorProbEvaluator {
   public:
    explicit ErrorProbEvaluator(const BernoulliState& state, int capacity_hint = 0);

    long experiment_size() const { return 2L * evolver_.steps(); }
    void advance();             // m -> m + 2
    double error_prob() const;  // e(m) at the current m
    double tie_prob() const;    // P(S_{m/2} = 0); 1 at m = 0

   private:
    bool diagonal_;
    // Walk over the arms ordered so the drift is upward; for diagonal
    // states the walk is symmetric and the error stays 1/2 by definition.
    WalkEvolver evolver_;
    double err_ = 0.5;  // cached e at the current m
    void recompute_error();
};

}  // namespace testroll

#endif  // TESTROLL_BERNOULLI_HPP
