// Acceptance checks: reference-table reproduction and the analytic
// invariants the engine is built on.  Each criterion prints one
// [PASS]/[FAIL] line with the measured quantities; the process exits 0
// only if every selected criterion passes.  Criteria are selected by
// number on the command line (no arguments runs all of them).
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "testroll/bernoulli.hpp"
#include "testroll/criteria.hpp"
#include "testroll/dist.hpp"
#include "testroll/gaussian.hpp"
#include "testroll/montecarlo.hpp"
#include "testroll/search.hpp"

using namespace testroll;

namespace {

std::string sig6(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

// ---------------------------------------------------------------------------
// Reference values (published tables for the same design problem).

struct WmbReferenceRow {
    double epsilon;
    long population;
    long m_hat;
    double mu0, mu1;  // least favorable state as published
};

const std::vector<WmbReferenceRow> kWmbReference = {
    {0.010, 200, 90, 0.010, 0.000},    {0.010, 500, 188, 0.010, 0.000},
    {0.010, 1000, 332, 0.500, 0.490},  {0.010, 5000, 1608, 0.500, 0.490},
    {0.010, 10000, 3106, 0.500, 0.490},
    {0.005, 200, 96, 0.005, 0.000},    {0.005, 500, 216, 0.005, 0.000},
    {0.005, 1000, 376, 0.005, 0.000},  {0.005, 5000, 1652, 0.495, 0.500},
    {0.005, 10000, 3274, 0.500, 0.505},
};

struct MinimaxReferenceRow {
    long population;
    long m_star;
};

const std::vector<MinimaxReferenceRow> kMinimaxReference = {
    {200, 18}, {500, 32}, {1000, 50}, {5000, 146}, {10000, 230},
};

// The (0.01, 5000) scan is shared between criteria 1 and 7.
const DesignRecommendation& wmb_5000_scan() {
    static const DesignRecommendation rec =
        wmb_sample_size(5000, GridSpec::gap_grid(0.01), SearchConfig{});
    return rec;
}

bool same_state(const BernoulliState& a, double mu1, double mu0) {
    const double tol = 1e-9;
    const bool direct = std::abs(a.mu1 - mu1) < tol && std::abs(a.mu0 - mu0) < tol;
    const bool mirrored = std::abs(a.mu1 - mu0) < tol && std::abs(a.mu0 - mu1) < tol;
    return direct || mirrored;
}

// ---------------------------------------------------------------------------
// 1. Stop-early table, exact integer match per cell.

bool criterion_1(std::string& detail) {
    bool all_match = true;
    std::ostringstream cells;
    for (const WmbReferenceRow& ref : kWmbReference) {
        DesignRecommendation rec;
        if (ref.epsilon == 0.01 && ref.population == 5000) {
            rec = wmb_5000_scan();
        } else {
            rec = wmb_sample_size(ref.population, GridSpec::gap_grid(ref.epsilon),
                                  SearchConfig{});
        }
        const bool m_ok = rec.feasible && rec.m_star == ref.m_hat;
        const bool state_ok = rec.least_favorable &&
                              same_state(*rec.least_favorable, ref.mu1, ref.mu0);
        all_match = all_match && m_ok && state_ok;
        cells << " (" << ref.epsilon << "," << ref.population << "): "
              << (m_ok && state_ok ? "ok" : "DIFF") << " m=" << rec.m_star
              << " ref=" << ref.m_hat;
        if (!state_ok && rec.least_favorable)
            cells << " lf=(" << rec.least_favorable->mu1 << ","
                  << rec.least_favorable->mu0 << ") ref=(" << ref.mu1 << ","
                  << ref.mu0 << ")";
        cells << ";";
    }
    detail = "per-cell (engine vs reference):" + cells.str() +
             " note: a secondary reference lists 182 for (0.01,500); "
             "the tabulated 188 is authoritative here";
    return all_match;
}

// ---------------------------------------------------------------------------
// 2. Minimax table within +-2.

bool criterion_2(std::string& detail) {
    bool ok = true;
    std::ostringstream cells;
    for (const MinimaxReferenceRow& ref : kMinimaxReference) {
        GridSpec grid;
        const DesignRecommendation rec =
            minimax_sample_size(ref.population, grid, SearchConfig{});
        const bool cell_ok =
            rec.feasible && std::labs(rec.m_star - ref.m_star) <= 2;
        ok = ok && cell_ok;
        cells << " N=" << ref.population << ": m=" << rec.m_star
              << " ref=" << ref.m_star << (cell_ok ? "" : " DIFF") << ";";
    }
    detail = "tolerance +-2:" + cells.str();
    return ok;
}

// ---------------------------------------------------------------------------
// 3. Gaussian threshold at one third of the population, exact.

bool criterion_3(std::string& detail) {
    double worst_sup_gap = 0.0;
    long violations = 0, checked = 0;
    for (long n_pop : {6L, 12L, 300L, 1000L}) {
        for (long m = 2; m <= n_pop - 2; m += 2) {
            // Dense geometric grid over the effect size.
            double grid_sup = 0.0;
            for (int i = 0; i <= 4000; ++i) {
                const double tau = 1e-4 * std::pow(3.0e4, i / 4000.0);
                grid_sup = std::max(grid_sup,
                                    gaussian_marginal_ratio(double(n_pop), double(m),
                                                            GaussianState(tau, 1.0)));
            }
            const bool at_or_past_third = 3 * m >= n_pop;
            const bool sup_below = grid_sup <= 1.0 + 1e-12;
            if (sup_below != at_or_past_third) ++violations;
            ++checked;

            // Closed-form sup against direct numeric maximization.
            const double k = double(n_pop - m) / double(m);
            const LimitCurveSup sup = limit_curve_sup(k);
            double a = 0.0, b = 4.0;
            const double inv_phi = 0.6180339887498948;
            double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
            double fc = limit_curve_value(k, c), fd = limit_curve_value(k, d);
            for (int it = 0; it < 120; ++it) {
                if (fc > fd) { b = d; d = c; fd = fc; c = b - inv_phi * (b - a); fc = limit_curve_value(k, c); }
                else { a = c; c = d; fc = fd; d = a + inv_phi * (b - a); fd = limit_curve_value(k, d); }
            }
            const double numeric = std::max(
                {1.0, limit_curve_value(k, 0.5 * (a + b)), fc, fd});
            worst_sup_gap = std::max(worst_sup_gap, std::abs(numeric - sup.value));
        }
    }
    detail = "threshold violations " + std::to_string(violations) + "/" +
             std::to_string(checked) + " sizes; max |closed-form sup - numeric| = " +
             sig6(worst_sup_gap) + " (bound 1e-8)";
    return violations == 0 && worst_sup_gap < 1e-8;
}

// ---------------------------------------------------------------------------
// 4. Bernoulli normal-approximation threshold via the symmetric
//    construction (1 +- Delta) / 2 with Delta = t / sqrt(m + t^2).

double na_value_at(long n_pop, long m, double t) {
    const double delta = t / std::sqrt(double(m) + t * t);
    const BernoulliState state(0.5 * (1.0 + delta), 0.5 * (1.0 - delta));
    return wmb_ratio_na(DesignContext(n_pop, m), state).value;
}

bool criterion_4(std::string& detail) {
    double worst = 0.0;
    // k in {2.5, 3, 5} realized as (N - m) / m with m = 100.
    for (double k : {2.5, 3.0, 5.0}) {
        const long m = 100;
        const long n_pop = m + long(std::lround(k * double(m)));
        const LimitCurveSup sup = limit_curve_sup(k);
        double best = 0.0;
        for (int i = 0; i <= 2000; ++i) {
            const double t = sup.argmax * (0.5 + i / 2000.0);  // bracket the argmax
            best = std::max(best, na_value_at(n_pop, m, t));
        }
        best = std::max(best, na_value_at(n_pop, m, sup.argmax));
        worst = std::max(worst, std::abs(best - sup.value));
    }

    // Threshold direction: crossing one third flips the sup side.
    bool sides_ok = true;
    const long n_pop = 1200;
    for (long m : {398L, 400L, 402L}) {
        const double k = double(n_pop - m) / double(m);
        double best = 0.0;
        for (int i = 0; i <= 3000; ++i)
            best = std::max(best, na_value_at(n_pop, m, 1e-3 + 2.0 * i / 3000.0));
        if (k > 2.0) best = std::max(best, na_value_at(n_pop, m, limit_curve_sup(k).argmax));
        const bool expected_below = 3 * m >= n_pop;
        if ((best <= 1.0 + 1e-12) != expected_below) sides_ok = false;
    }
    detail = "max |constructed sup - closed form| = " + sig6(worst) +
             " (bound 1e-8); threshold sides at N=1200 " +
             (sides_ok ? "consistent" : "INCONSISTENT");
    return worst < 1e-8 && sides_ok;
}

// ---------------------------------------------------------------------------
// 5. One-step error decrement identity.

bool criterion_5(std::string& detail) {
    std::mt19937_64 rng(20260823);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        double hi = unit(rng), lo = unit(rng);
        if (hi < lo) std::swap(hi, lo);
        // Mostly small sizes with a slice of large ones up to 2000.
        const long half =
            trial % 10 == 0 ? 200 + long(rng() % 801) : 1 + long(rng() % 200);
        const long m = 2 * half;
        const IdentityGap gap =
            exact_identity_gap(DesignContext(2 * m + 4, m), BernoulliState(hi, lo));
        worst = std::max(worst, std::abs(gap.gap()));
    }
    detail = "max |lhs - rhs| = " + sig6(worst) +
             " over 1000 random (m <= 2000, state) pairs (bound 1e-12)";
    return worst <= 1e-12;
}

// ---------------------------------------------------------------------------
// 6. Tilted walk representation.

bool criterion_6(std::string& detail) {
    std::mt19937_64 rng(8151623);
    std::uniform_real_distribution<double> unit(0.02, 0.98);
    std::uniform_int_distribution<int> size(1, 500);
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        double hi = unit(rng), lo = unit(rng);
        if (hi < lo) std::swap(hi, lo);
        if (hi == lo) continue;
        const TrinomialWalk walk = TrinomialWalk::from_rates(hi, lo, size(rng));
        const std::vector<double> direct = walk_pmf(walk);
        const std::vector<double> tilted =
            walk_pmf_tilted(walk, TiltedWalk::from_walk(walk));
        for (size_t i = 0; i < direct.size(); ++i)
            worst = std::max(worst, std::abs(tilted[i] - direct[i]));
    }
    detail = "max entrywise |tilted - direct| = " + sig6(worst) +
             " over 200 interior walks, n <= 500 (bound 1e-12)";
    return worst <= 1e-12;
}

// ---------------------------------------------------------------------------
// 7. Near-diagonal localization of the adversary along the scan.

bool criterion_7(std::string& detail) {
    const DesignRecommendation& rec = wmb_5000_scan();
    const double log_n = std::log(5000.0);
    long asserted = 0, held = 0;
    double worst_ratio = 0.0;
    for (const TracePoint& point : rec.trace) {
        if (point.experiment_size < 2 || point.worst_value < 1.0) continue;
        ++asserted;
        const double gap = std::abs(point.argmax.mu1 - point.argmax.mu0);
        const double bound = 2.0 * std::sqrt(log_n / double(point.experiment_size));
        if (gap <= bound + 1e-12) ++held;
        worst_ratio = std::max(worst_ratio, gap / bound);
    }
    detail = std::to_string(held) + "/" + std::to_string(asserted) +
             " scanned sizes with max ratio >= 1 keep the argmax gap within "
             "2 sqrt(log N / m) at N=5000 (max gap/bound = " +
             sig6(worst_ratio) + ")";
    return asserted > 0 && held == asserted;
}

// ---------------------------------------------------------------------------
// 8. Boundary pathology of the marginal ratio.

bool criterion_8(std::string& detail) {
    const long n_pop = 1000000;
    bool ok = true;
    std::ostringstream values;
    for (double share : {0.30, 0.40, 0.45}) {
        const double ratio =
            boundary_pathology_ratio(n_pop, long(share * n_pop), 0.1);
        values << " " << share << ": " << sig6(ratio) << ";";
        ok = ok && ratio > 1.0;
    }
    for (double share : {0.55, 0.60}) {
        const double ratio =
            boundary_pathology_ratio(n_pop, long(share * n_pop), 0.1);
        values << " " << share << ": " << sig6(ratio) << ";";
        ok = ok && ratio < 1.0;
    }
    detail = "ratio above 1 before the half-population mark and below after:" +
             values.str();
    return ok;
}

// ---------------------------------------------------------------------------
// 9. Relative-regret flatness at a thin gap floor.

bool criterion_9(std::string& detail) {
    const long n_pop = 500;
    const double eps = 1e-4;
    ErrorProbEvaluator eval(BernoulliState(eps, 0.0));
    double worst = 0.0;
    long at_m = 0;
    for (long m = 0; m <= n_pop; m += 2) {
        const double share = double(m) / double(n_pop);
        const double rreg = 0.5 * share + (1.0 - share) * eval.error_prob();
        if (std::abs(rreg - 0.5) > worst) {
            worst = std::abs(rreg - 0.5);
            at_m = m;
        }
        if (m < n_pop) eval.advance();
    }
    detail = "max_m |RReg(m) - 1/2| = " + sig6(worst) + " at m=" +
             std::to_string(at_m) + " (required <= 1e-3; the deviation scales "
             "as eps N / 16, which is 3.125e-3 at these settings)";
    return worst <= 1e-3;
}

// ---------------------------------------------------------------------------
// 10. Monte Carlo consistency.

bool criterion_10(std::string& detail) {
    std::mt19937_64 rng(433494437);
    std::uniform_real_distribution<double> unit(0.05, 0.95);
    int within = 0;
    const int total = 20;
    for (int trial = 0; trial < total; ++trial) {
        const long n_pop = 2 * (10 + long(rng() % 90));
        const long m = 2 * (1 + long(rng() % size_t(n_pop / 2 - 1)));
        const DesignContext ctx(n_pop, m);
        const BernoulliState state(unit(rng), unit(rng));
        const SimConfig config(ctx, state, 100000, 5000 + std::uint64_t(trial));
        double simulated, se, exact;
        if (trial % 2 == 0) {
            const SimEstimate est = simulate_error_prob(config);
            simulated = est.mean;
            se = est.std_error;
            exact = error_prob(ctx, state);
        } else {
            const SimEstimate est = simulate_regret(config);
            simulated = est.mean;
            se = est.std_error;
            exact = evaluate(ctx, state).regret;
        }
        if (se == 0.0 ? simulated == exact
                      : std::abs(simulated - exact) <= 4.0 * se)
            ++within;
    }
    detail = std::to_string(within) + "/" + std::to_string(total) +
             " exact values within 4 standard errors at 1e5 replications "
             "(required >= 19)";
    return within >= 19;
}

// ---------------------------------------------------------------------------
// 11. Exact-to-normal-approximation agreement tightens with N.

bool criterion_11(std::string& detail) {
    std::vector<double> gaps;
    for (long n_pop : {2000L, 20000L}) {
        const DesignContext ctx(n_pop, n_pop / 2);
        const LocalRegion region(0.1, 1.0, n_pop);
        double worst = 0.0;
        for (const BernoulliState& state : region.grid(20, 20))
            worst = std::max(worst, std::abs(wmb_ratio(ctx, state).value -
                                             wmb_ratio_na(ctx, state).value));
        gaps.push_back(worst);
    }
    detail = "max |exact - approx| over the 20x20 near-diagonal grid: N=2000: " +
             sig6(gaps[0]) + ", N=20000: " + sig6(gaps[1]) +
             " (must decrease and end <= 0.05)";
    return gaps[1] < gaps[0] && gaps[1] <= 0.05;
}

using CriterionFn = bool (*)(std::string&);

struct Criterion {
    int number;
    CriterionFn run;
};

const std::vector<Criterion> kCriteria = {
    {1, criterion_1},  {2, criterion_2},  {3, criterion_3}, {4, criterion_4},
    {5, criterion_5},  {6, criterion_6},  {7, criterion_7}, {8, criterion_8},
    {9, criterion_9},  {10, criterion_10}, {11, criterion_11},
};

}  // namespace

int main(int argc, char** argv) {
    std::vector<int> selected;
    for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));

    bool all_pass = true;
    for (const Criterion& criterion : kCriteria) {
        if (!selected.empty() &&
            std::find(selected.begin(), selected.end(), criterion.number) ==
                selected.end())
            continue;
        std::string detail;
        bool passed = false;
        try {
            passed = criterion.run(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        std::cout << (passed ? "[PASS]" : "[FAIL]") << " criterion "
                  << criterion.number << ": " << detail << "\n";
        all_pass = all_pass && passed;
    }
    return all_pass ? 0 : 1;
}
