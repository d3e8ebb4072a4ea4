#ifndef TESTROLL_GAUSSIAN_HPP
#define TESTROLL_GAUSSIAN_HPP

namespace testroll {

/// Gaussian response model: the treatment effect tau and the common
/// per-unit outcome standard deviation sigma (> 0).
struct GaussianState {
    double tau = 0.0;
    double sigma = 1.0;

    GaussianState() = default;
    GaussianState(double effect, double stddev);
};

/// The limit curve f_k(t) = 2 Phi(-t) + k t phi(t) that governs the
/// marginal value of experimentation in the Gaussian model, where k is
/// the rollout-to-experiment ratio (N - m) / m.
struct LimitCurve {
    double k = 0.0;
    explicit LimitCurve(double ratio);
    double value(double t) const;
};

/// Maximizer and value of the limit curve over t >= 0.
struct LimitCurveSup {
    double argmax = 0.0;
    double value = 1.0;
};

/// Closed-form error probability Phi(-sqrt(m) |tau| / (2 sigma)) of the
/// empirical success rule under the Gaussian model.  m is a positive
/// (not necessarily integer) experiment size; tau == 0 gives 1/2.
double gaussian_error_prob(double m, const GaussianState& state);

/// f_k(t) for t >= 0, k >= 0.
double limit_curve_value(double k, double t);

/// Closed form for sup_{t >= 0} f_k(t): for k <= 2 the sup is 1 at t = 0;
/// for k > 2 the unique interior maximizer is t* = sqrt(1 - 2 / k).
LimitCurveSup limit_curve_sup(double k);

/// Marginal value of one more experiment pair, expressed through the
/// limit curve: f_{(N-m)/m}(sqrt(m) |tau| / (2 sigma)).  Requires
/// 0 < m < N (m real-valued).
double gaussian_marginal_ratio(double n_population, double m, const GaussianState& state);

/// Sample-size threshold of the stop-early rule in the Gaussian model.
struct GaussianWmbThreshold {
    double continuous = 0.0;  // exactly N / 3
    long even_m = 0;          // smallest even integer >= N / 3
};

/// The Gaussian threshold is exactly one third of the population,
/// independent of tau and sigma.  Requires population > 0.
GaussianWmbThreshold gaussian_wmb_threshold(long population);

}  // namespace testroll

#endif  // TESTROLL_GAUSSIAN_HPP
