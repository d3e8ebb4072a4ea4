#ifndef TESTROLL_CRITERIA_HPP
#define TESTROLL_CRITERIA_HPP

#include <optional>

#include "testroll/bernoulli.hpp"

namespace testroll {

/// Expected-welfare accounting of one design at one state.
///
/// regret = experiment_cost + rollout_risk:
///   experiment_cost = (m / 2) |tau|      (the worse arm gets m/2 units)
///   rollout_risk    = (N - m) |tau| e(m) (the rollout picks the worse arm
///                                         with probability e(m))
/// oracle_welfare = N * max(mu1, mu0); relative_regret is regret divided
/// by oracle welfare, undefined when the oracle welfare is zero.
struct EvalBreakdown {
    long experiment_size = 0;
    double experiment_cost = 0.0;
    double rollout_risk = 0.0;
    double regret = 0.0;
    double error_prob = 0.5;
    double oracle_welfare = 0.0;
    std::optional<double> relative_regret;
};

/// The marginal-value ratio at one experiment size.
/// A value above 1 means growing the experiment by one pair still pays
/// for itself; on the diagonal the ratio is 1 exactly.
struct MarginalRatio {
    long experiment_size = 0;
    double value = 1.0;
};

/// Full welfare-regret breakdown of the design at the given state.
EvalBreakdown evaluate(const DesignContext& ctx, const BernoulliState& state);

/// regret / oracle_welfare.  Throws std::domain_error when the oracle
/// welfare is zero (mu1 == mu0 == 0).
double relative_regret(const DesignContext& ctx, const BernoulliState& state);

/// Exact marginal ratio eta(m) = (N - m) e(m) - (N - m - 2) e(m + 2).
/// Requires experiment_size <= population - 2; throws std::domain_error
/// otherwise.  Diagonal states yield exactly 1 without touching the walk.
MarginalRatio wmb_ratio(const DesignContext& ctx, const BernoulliState& state);

/// Normal-approximation counterpart of wmb_ratio:
///   eta_na = 2 Phi(-t) + ((N - m) / m) t phi(t),
/// with t = sqrt(m) |tau| / sqrt(2 v) and v = mu1 (1 - mu1) + mu0 (1 - mu0).
/// Requires experiment_size >= 2; throws std::domain_error when v == 0.
MarginalRatio wmb_ratio_na(const DesignContext& ctx, const BernoulliState& state);

/// Closed-form boundary behaviour of the marginal ratio for the
/// near-boundary family mu1 = c / N, mu0 = 0:
///   eta(m) = (1 - tau)^(m/2) * (1 - ((N - m) / 2) log(1 - tau)),
/// with tau = c / N.  Shows that for small c the ratio stays above 1
/// until the experiment covers half the population.
double boundary_pathology_ratio(long population, long experiment_size, double c);

/// Per-unit rollout regret |tau| * e, the super-population form that the
/// finite-population rollout term (N - m) |tau| e(m) is built from.
double superpop_regret(const BernoulliState& state, double error_probability);

}  // namespace testroll

#endif  // TESTROLL_CRITERIA_HPP
