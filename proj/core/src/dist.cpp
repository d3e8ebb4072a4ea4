#include "testroll/dist.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace testroll {

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014326779399460599343819;
constexpr double kInvSqrt2 = 0.7071067811865475244008443621048490;

void check_prob(double p, const char* what) {
    if (!(p >= 0.0 && p <= 1.0))
        throw std::invalid_argument(std::string(what) + " must lie in [0, 1]");
}

}  // namespace

TrinomialWalk::TrinomialWalk(double up_prob, double stay_prob, double down_prob, int n)
    : up(up_prob), stay(stay_prob), down(down_prob), steps(n) {
    check_prob(up, "walk up probability");
    check_prob(stay, "walk stay probability");
    check_prob(down, "walk down probability");
    if (std::abs(up + stay + down - 1.0) > 1e-12)
        throw std::invalid_argument("walk step probabilities must sum to 1");
    if (steps < 0) throw std::invalid_argument("walk step count must be >= 0");
}

TrinomialWalk TrinomialWalk::from_rates(double mu_hi, double mu_lo, int n) {
    check_prob(mu_hi, "success rate");
    check_prob(mu_lo, "success rate");
    TrinomialWalk w;
    w.up = mu_hi * (1.0 - mu_lo);
    w.down = (1.0 - mu_hi) * mu_lo;
    w.stay = mu_hi * mu_lo + (1.0 - mu_hi) * (1.0 - mu_lo);
    w.steps = n;
    if (n < 0) throw std::invalid_argument("walk step count must be >= 0");
    return w;
}

TiltedWalk TiltedWalk::from_walk(const TrinomialWalk& walk) {
    if (walk.up <= 0.0 || walk.down <= 0.0)
        throw std::domain_error("tilted representation needs an interior walk (up > 0 and down > 0)");
    TiltedWalk t;
    t.geo_mean = std::sqrt(walk.up * walk.down);
    t.scale = walk.stay + 2.0 * t.geo_mean;
    t.ratio = std::sqrt(walk.up / walk.down);
    t.sym_prob = t.geo_mean / t.scale;
    return t;
}

WalkEvolver::WalkEvolver(double up_prob, double stay_prob, double down_prob,
                         int capacity_hint)
    : up_(up_prob), stay_(stay_prob), down_(down_prob) {
    check_prob(up_, "walk up probability");
    check_prob(stay_, "walk stay probability");
    check_prob(down_, "walk down probability");
    if (std::abs(up_ + stay_ + down_ - 1.0) > 1e-12)
        throw std::invalid_argument("walk step probabilities must sum to 1");
    if (capacity_hint > 0) buf_.reserve(size_t(2 * capacity_hint + 3));
    buf_.assign(1, 1.0);  // S_0 = 0 with certainty
}

void WalkEvolver::step() {
    const int old_size = 2 * n_ + 1;
    buf_.resize(size_t(old_size) + 2);
    // In-place update with two lag registers; entry i of the new buffer
    // is P(S_{n+1} = i - n - 1) = up * old[i-2] + stay * old[i-1] + down * old[i].
    // The grouping (up * left + down * right) + stay * center makes the
    // up/down mirror image of the walk produce the bitwise-reversed pmf.
    double pm2 = 0.0, pm1 = 0.0;
    double* p = buf_.data();
    for (int i = 0; i < old_size + 2; ++i) {
        const double cur = (i < old_size) ? p[i] : 0.0;
        p[i] = (up_ * pm2 + down_ * cur) + stay_ * pm1;
        pm2 = pm1;
        pm1 = cur;
    }
    ++n_;
}

double WalkEvolver::mass_at(int k) const {
    if (k < -n_ || k > n_) return 0.0;
    return buf_[size_t(k + n_)];
}

BinomialPmf binomial_pmf(int n, double p) {
    if (n < 0) throw std::invalid_argument("binomial trial count must be >= 0");
    if (!std::isfinite(p)) throw std::invalid_argument("binomial p must be finite");
    check_prob(p, "binomial p");

    BinomialPmf out;
    out.trials = n;
    out.success_prob = p;
    out.mass.assign(size_t(n) + 1, 0.0);

    if (p == 0.0) {
        out.mass[0] = 1.0;
        return out;
    }
    if (p == 1.0) {
        out.mass[size_t(n)] = 1.0;
        return out;
    }

    const double log_anchor = double(n) * std::log1p(-p);
    const bool extreme = p < 1e-8 || p > 1.0 - 1e-8 || log_anchor < -700.0;
    if (extreme) {
        // Log-space evaluation: immune to anchor underflow and accurate
        // for extreme p at the cost of log-gamma calls.
        const double lg_n = std::lgamma(double(n) + 1.0);
        const double lp = std::log(p);
        const double lq = std::log1p(-p);
        for (int k = 0; k <= n; ++k) {
            double lm = lg_n - std::lgamma(double(k) + 1.0) -
                        std::lgamma(double(n - k) + 1.0) + double(k) * lp +
                        double(n - k) * lq;
            out.mass[size_t(k)] = std::exp(lm);
        }
        return out;
    }

    // Forward recurrence from the k = 0 anchor.
    out.mass[0] = std::exp(log_anchor);
    const double ratio = p / (1.0 - p);
    for (int k = 0; k < n; ++k)
        out.mass[size_t(k) + 1] = out.mass[size_t(k)] * ratio *
                                  (double(n - k) / double(k + 1));
    return out;
}

std::vector<double> walk_pmf(const TrinomialWalk& walk) {
    WalkEvolver ev(walk.up, walk.stay, walk.down, walk.steps);
    for (int i = 0; i < walk.steps; ++i) ev.step();
    auto span = ev.pmf();
    return std::vector<double>(span.begin(), span.end());
}

std::vector<double> walk_pmf_tilted(const TrinomialWalk& walk, const TiltedWalk& tilt) {
    const int n = walk.steps;
    const long double p = static_cast<long double>(tilt.sym_prob);
    const long double s = std::max(0.0L, 1.0L - 2.0L * p);

    // The symmetrized pmf spans thousands of orders of magnitude for
    // drifted walks, so evolve it in extended precision; its double-range
    // tail would flush to zero exactly where the tilt factors are large.
    std::vector<long double> q(size_t(2 * n) + 1, 0.0L);
    std::vector<long double> next(q.size(), 0.0L);
    q[size_t(n)] = 1.0L;
    for (int step = 0; step < n; ++step) {
        for (int j = 0; j <= 2 * n; ++j) {
            long double acc = s * q[size_t(j)];
            if (j > 0) acc += p * q[size_t(j) - 1];
            if (j < 2 * n) acc += p * q[size_t(j) + 1];
            next[size_t(j)] = acc;
        }
        q.swap(next);
    }

    // scale^n and ratio^k can individually leave the double range while
    // the product scale^n ratio^k q_n(k) is a probability; assemble the
    // exponent in extended precision and exponentiate once per entry.
    const long double log_scale = std::log(static_cast<long double>(tilt.scale));
    const long double log_ratio = std::log(static_cast<long double>(tilt.ratio));
    const long double base = static_cast<long double>(n) * log_scale;

    std::vector<double> out(size_t(2 * n) + 1, 0.0);
    for (int k = -n; k <= n; ++k) {
        const long double qk = q[size_t(k + n)];
        if (qk <= 0.0L) continue;
        const long double log_term =
            base + static_cast<long double>(k) * log_ratio + std::log(qk);
        out[size_t(k + n)] = static_cast<double>(std::exp(log_term));
    }
    return out;
}

double lazy_walk_zero_mass(double theta, int n) {
    if (!(theta >= 0.0 && theta <= 0.5))
        throw std::invalid_argument("lazy walk theta must lie in [0, 1/2]");
    if (n < 0) throw std::invalid_argument("lazy walk step count must be >= 0");
    if (theta == 0.0) return 1.0;

    // Symmetric walk: evolve only the k >= 0 half, with p[-1] == p[1].
    const double stay = 1.0 - 2.0 * theta;
    std::vector<double> half(size_t(n) + 2, 0.0);
    half[0] = 1.0;
    for (int s = 0; s < n; ++s) {
        double pm1 = half[1];  // stands in for p[-1] by symmetry
        double* p = half.data();
        for (int k = 0; k <= s + 1; ++k) {
            const double cur = p[k];
            const double right = p[k + 1];
            p[k] = theta * (pm1 + right) + stay * cur;
            pm1 = cur;
        }
    }
    return half[0];
}

double normal_cdf(double x) {
    if (!std::isfinite(x)) throw std::domain_error("normal_cdf needs a finite argument");
    return 0.5 * std::erfc(-x * kInvSqrt2);
}

double normal_pdf(double x) {
    if (!std::isfinite(x)) throw std::domain_error("normal_pdf needs a finite argument");
    return kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

}  // namespace testroll
