#ifndef TESTROLL_DIST_HPP
#define TESTROLL_DIST_HPP

#include <span>
#include <vector>

namespace testroll {

/// Dense binomial probability mass function over k = 0..n.
struct BinomialPmf {
    int trials = 0;
    double success_prob = 0.0;
    std::vector<double> mass;  // mass[k] = P(X = k), size trials + 1
};

/// One step of the paired-difference walk: +1 with probability `up`,
/// 0 with probability `stay`, -1 with probability `down`.
///
/// For a treated arm with success rate muHi and a control arm with rate
/// muLo, a matched pair moves the success-count difference up when the
/// treated unit alone succeeds, down when the control unit alone succeeds,
/// and stays put otherwise.
struct TrinomialWalk {
    double up = 0.0;
    double stay = 1.0;
    double down = 0.0;
    int steps = 0;

    TrinomialWalk() = default;
    TrinomialWalk(double up_prob, double stay_prob, double down_prob, int n);

    /// Builds the n-step walk induced by a matched pair of Bernoulli arms.
    /// The product form keeps boundary cases exact: mu_lo == 0 gives
    /// down == 0 exactly, mu_hi == 1 gives up == 1 - stay exactly.
    static TrinomialWalk from_rates(double mu_hi, double mu_lo, int n);
};

/// Exponentially tilted representation of an interior trinomial walk.
///
/// With u = sqrt(up * down), every n-step probability factors as
///   P(S_n = k) = scale^n * ratio^k * q_n(k)
/// where q_n is the pmf of a symmetric lazy walk with step probability
/// sym_prob for each of +1 and -1.  The symmetric factor is well
/// conditioned even when the original walk is strongly drifted.
struct TiltedWalk {
    double geo_mean = 0.0;  // u = sqrt(up * down)
    double scale = 0.0;     // stay + 2u, the per-step mass factor
    double ratio = 0.0;     // sqrt(up / down), the per-unit tilt
    double sym_prob = 0.0;  // u / scale, symmetric step probability

    /// Throws std::domain_error for boundary walks (up == 0 or down == 0),
    /// whose tilted representation is undefined.
    static TiltedWalk from_walk(const TrinomialWalk& walk);
};

/// Incremental dynamic program over the walk's position distribution.
/// Holds P(S_n = k) for k = -n..n in a single buffer and advances one
/// step at a time, so a sweep over consecutive step counts costs O(n)
/// per step instead of O(n^2).
class WalkEvolver {
   public:
    WalkEvolver(double up_prob, double stay_prob, double down_prob,
                int capacity_hint = 0);

    void step();        // advance n -> n + 1
    int steps() const { return n_; }

    /// pmf()[i] = P(S_n = i - n), with 2n + 1 entries.
    std::span<const double> pmf() const { return {buf_.data(), size_t(2 * n_ + 1)}; }

    /// P(S_n = k); zero outside the support.
    double mass_at(int k) const;

   private:
    double up_, stay_, down_;
    int n_ = 0;
    std::vector<double> buf_;
};

/// Dense pmf of a binomial distribution.  Uses a forward recurrence in
/// the regular regime and log-gamma evaluation when p is extreme or the
/// anchor term would underflow.  Throws std::invalid_argument for n < 0
/// or p outside [0, 1].
BinomialPmf binomial_pmf(int n, double p);

/// Exact pmf of walk.steps steps of the trinomial walk, as a vector of
/// 2 * steps + 1 entries: result[i] = P(S_n = i - n).
///
/// The update is grouped as (up * left + down * right) + stay * center,
/// which makes the mirror relation exact in floating point: swapping up
/// and down reverses the output bitwise.
std::vector<double> walk_pmf(const TrinomialWalk& walk);

/// Same distribution computed through the tilted representation:
/// P(S_n = k) = scale^n * ratio^k * q_n(k).  The per-entry factor is
/// assembled in extended precision because scale^n and ratio^k can
/// individually overflow or underflow while their product stays in range.
std::vector<double> walk_pmf_tilted(const TrinomialWalk& walk, const TiltedWalk& tilt);

/// P(S_n = 0) for the symmetric lazy walk that steps +1 or -1 with
/// probability theta each and stays put otherwise.  For large n this
/// approaches 1 / sqrt(4 pi theta n).
double lazy_walk_zero_mass(double theta, int n);

/// Standard normal cdf via the complementary error function.
/// Absolute error is well below 1e-14 over the whole real line.
double normal_cdf(double x);

/// Standard normal density.
double normal_pdf(double x);

}  // namespace testroll

#endif  // TESTROLL_DIST_HPP
