#include "testroll/gaussian.hpp"

#include <cmath>
#include <stdexcept>

#include "testroll/dist.hpp"

namespace testroll {

GaussianState::GaussianState(double effect, double stddev)
    : tau(effect), sigma(stddev) {
    if (!std::isfinite(tau)) throw std::invalid_argument("tau must be finite");
    if (!(sigma > 0.0) || !std::isfinite(sigma))
        throw std::invalid_argument("sigma must be positive and finite");
}

LimitCurve::LimitCurve(double ratio) : k(ratio) {
    if (!(k >= 0.0)) throw std::invalid_argument("limit curve ratio must be >= 0");
}

double LimitCurve::value(double t) const { return limit_curve_value(k, t); }

double gaussian_error_prob(double m, const GaussianState& state) {
    if (!(m > 0.0)) throw std::domain_error("gaussian error probability needs m > 0");
    return normal_cdf(-std::sqrt(m) * std::abs(state.tau) / (2.0 * state.sigma));
}

double limit_curve_value(double k, double t) {
    if (!(k >= 0.0)) throw std::invalid_argument("limit curve ratio must be >= 0");
    if (!(t >= 0.0)) throw std::domain_error("limit curve argument must be >= 0");
    return 2.0 * normal_cdf(-t) + k * t * normal_pdf(t);
}

LimitCurveSup limit_curve_sup(double k) {
    if (!(k >= 0.0)) throw std::invalid_argument("limit curve ratio must be >= 0");
    LimitCurveSup sup;
    if (k <= 2.0) {
        // f_k'(t) = phi(t) (k (1 - t^2) - 2) < 0 for all t > 0 once k <= 2:
        // the curve only falls away from f_k(0) = 1.
        sup.argmax = 0.0;
        sup.value = 1.0;
        return sup;
    }
    sup.argmax = std::sqrt(1.0 - 2.0 / k);
    sup.value = limit_curve_value(k, sup.argmax);
    return sup;
}

double gaussian_marginal_ratio(double n_population, double m, const GaussianState& state) {
    if (!(m > 0.0) || !(m < n_population))
        throw std::domain_error("marginal ratio needs 0 < m < N");
    const double k = (n_population - m) / m;
    const double t = std::sqrt(m) * std::abs(state.tau) / (2.0 * state.sigma);
    return limit_curve_value(k, t);
}

GaussianWmbThreshold gaussian_wmb_threshold(long population) {
    if (population <= 0) throw std::invalid_argument("population must be positive");
    GaussianWmbThreshold out;
    out.continuous = double(population) / 3.0;
    long m = (population + 2) / 3;  // ceil(N / 3)
    if (m % 2 != 0) ++m;
    out.even_m = m;
    return out;
}

}  // namespace testroll
