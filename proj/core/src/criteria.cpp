#include "testroll/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "testroll/gaussian.hpp"

namespace testroll {

EvalBreakdown evaluate(const DesignContext& ctx, const BernoulliState& state) {
    EvalBreakdown out;
    const double abs_tau = std::abs(state.tau());
    const double e = error_prob(ctx, state);
    out.experiment_size = ctx.experiment_size;
    out.error_prob = e;
    out.experiment_cost = 0.5 * double(ctx.experiment_size) * abs_tau;
    out.rollout_risk = double(ctx.rollout_size()) * abs_tau * e;
    out.regret = out.experiment_cost + out.rollout_risk;
    out.oracle_welfare = double(ctx.population) * std::max(state.mu1, state.mu0);
    if (out.oracle_welfare > 0.0)
        out.relative_regret = out.regret / out.oracle_welfare;
    return out;
}

double relative_regret(const DesignContext& ctx, const BernoulliState& state) {
    const EvalBreakdown b = evaluate(ctx, state);
    if (!b.relative_regret)
        throw std::domain_error("relative regret is undefined when both arms never succeed");
    return *b.relative_regret;
}

MarginalRatio wmb_ratio(const DesignContext& ctx, const BernoulliState& state) {
    if (ctx.experiment_size + 2 > ctx.population)
        throw std::domain_error("marginal ratio needs room for one more pair (m <= N - 2)");
    MarginalRatio out;
    out.experiment_size = ctx.experiment_size;
    if (state.mu1 == state.mu0) {
        // On the diagonal e(m) = 1/2 at every m, so the ratio telescopes
        // to ((N - m) - (N - m - 2)) / 2 = 1 exactly.
        out.value = 1.0;
        return out;
    }
    const long n = ctx.arm_size();
    ErrorProbEvaluator ev(state, int(n) + 1);
    for (long i = 0; i < n; ++i) ev.advance();
    const double e_here = ev.error_prob();
    ev.advance();
    const double e_next = ev.error_prob();
    const double rollout = double(ctx.rollout_size());
    out.value = rollout * e_here - (rollout - 2.0) * e_next;
    return out;
}

MarginalRatio wmb_ratio_na(const DesignContext& ctx, const BernoulliState& state) {
    if (ctx.experiment_size < 2)
        throw std::domain_error("normal-approximation ratio needs m >= 2");
    const double v = state.mu1 * (1.0 - state.mu1) + state.mu0 * (1.0 - state.mu0);
    if (v <= 0.0)
        throw std::domain_error("normal-approximation ratio is undefined at zero variance");
    const double m = double(ctx.experiment_size);
    const double t = std::sqrt(m) * std::abs(state.tau()) / std::sqrt(2.0 * v);
    const double k = double(ctx.rollout_size()) / m;
    MarginalRatio out;
    out.experiment_size = ctx.experiment_size;
    out.value = limit_curve_value(k, t);
    return out;
}

double boundary_pathology_ratio(long population, long experiment_size, double c) {
    if (population < 2) throw std::invalid_argument("population must be >= 2");
    if (experiment_size < 0 || experiment_size > population)
        throw std::invalid_argument("experiment size must lie in [0, N]");
    if (!(c > 0.0)) throw std::invalid_argument("boundary constant c must be positive");
    const double tau = c / double(population);
    if (tau >= 1.0) throw std::invalid_argument("boundary constant gives tau >= 1");
    const double log1m = std::log1p(-tau);
    const double lead = std::exp(0.5 * double(experiment_size) * log1m);
    const double bracket = 1.0 - 0.5 * double(population - experiment_size) * log1m;
    return lead * bracket;
}

double superpop_regret(const BernoulliState& state, double error_probability) {
    if (!(error_probability >= 0.0 && error_probability <= 1.0))
        throw std::invalid_argument("error probability must lie in [0, 1]");
    return std::abs(state.tau()) * error_probability;
}

}  // namespace testroll
