#include "testroll/bernoulli.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "summation.hpp"

namespace testroll {

BernoulliState::BernoulliState(double treated, double control)
    : mu1(treated), mu0(control) {
    if (!(mu1 >= 0.0 && mu1 <= 1.0) || !(mu0 >= 0.0 && mu0 <= 1.0))
        throw std::invalid_argument("Bernoulli success rates must lie in [0, 1]");
}

DesignContext::DesignContext(long n_total, long m_experiment)
    : population(n_total), experiment_size(m_experiment) {
    if (population < 2 || population % 2 != 0)
        throw std::invalid_argument("population must be an even count >= 2");
    if (experiment_size < 0 || experiment_size % 2 != 0)
        throw std::invalid_argument("experiment size must be an even count >= 0");
    if (experiment_size > population)
        throw std::invalid_argument("experiment size cannot exceed the population");
}

ErrorProbEvaluator::ErrorProbEvaluator(const BernoulliState& state, int capacity_hint)
    : diagonal_(state.mu1 == state.mu0),
      evolver_([&] {
          const double hi = std::max(state.mu1, state.mu0);
          const double lo = std::min(state.mu1, state.mu0);
          const TrinomialWalk w = TrinomialWalk::from_rates(hi, lo, 0);
          return WalkEvolver(w.up, w.stay, w.down, capacity_hint);
      }()) {}

void ErrorProbEvaluator::advance() {
    evolver_.step();
    if (!diagonal_) recompute_error();
}

void ErrorProbEvaluator::recompute_error() {
    // e = P(S_n < 0) + P(S_n = 0) / 2 for the upward-drifted walk.
    // Sum the negative tail from the far end, smallest masses first.
    const int n = evolver_.steps();
    auto p = evolver_.pmf();
    detail::CompensatedSum acc;
    for (int i = 0; i < n; ++i) acc.add(p[size_t(i)]);
    acc.add(0.5 * p[size_t(n)]);
    err_ = acc.value();
}

double ErrorProbEvaluator::error_prob() const { return diagonal_ ? 0.5 : err_; }

double ErrorProbEvaluator::tie_prob() const { return evolver_.mass_at(0); }

double error_prob(const DesignContext& ctx, const BernoulliState& state) {
    const long n = ctx.arm_size();
    if (n == 0 || state.mu1 == state.mu0) return 0.5;
    ErrorProbEvaluator ev(state, int(n));
    for (long i = 0; i < n; ++i) ev.advance();
    return ev.error_prob();
}

double tie_prob(const DesignContext& ctx, const BernoulliState& state) {
    if (ctx.experiment_size < 2)
        throw std::domain_error("tie probability needs an experiment of at least one pair");
    ErrorProbEvaluator ev(state, int(ctx.arm_size()));
    for (long i = 0; i < ctx.arm_size(); ++i) ev.advance();
    return ev.tie_prob();
}

IdentityGap exact_identity_gap(const DesignContext& ctx, const BernoulliState& state) {
    if (ctx.experiment_size + 2 > ctx.population)
        throw std::domain_error("identity gap needs room for one more pair in the population");
    const long n = ctx.arm_size();
    ErrorProbEvaluator ev(state, int(n) + 1);
    for (long i = 0; i < n; ++i) ev.advance();
    const double e_here = ev.error_prob();
    const double tie_here = ev.tie_prob();
    ev.advance();
    const double e_next = ev.error_prob();

    IdentityGap gap;
    gap.lhs = e_here - e_next;
    gap.rhs = std::abs(state.half_gap()) * tie_here;
    return gap;
}

double hoeffding_error_bound(const DesignContext& ctx, const BernoulliState& state) {
    const double tau = state.tau();
    return std::exp(-double(ctx.experiment_size) * tau * tau / 4.0);
}

}  // namespace testroll
