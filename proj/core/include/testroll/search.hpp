#ifndef TESTROLL_SEARCH_HPP
#define TESTROLL_SEARCH_HPP

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "testroll/bernoulli.hpp"
#include "testroll/criteria.hpp"

namespace testroll {

/// Rectangular lattice of Bernoulli states used as the adversary's
/// domain.  Grid points are integer multiples of `step`, clipped to the
/// bounds; `min_gap > 0` restricts the domain to states with
/// |mu1 - mu0| >= min_gap (measured in whole grid steps), and
/// `include_diagonal` controls whether mu1 == mu0 states are enumerated
/// when no gap constraint is set.
struct GridSpec {
    double step = 0.01;
    double min_gap = 0.0;
    bool include_diagonal = true;
    bool diagonal_only = false;
    double mu1_lo = 0.0, mu1_hi = 1.0;
    double mu0_lo = 0.0, mu0_hi = 1.0;

    /// Grid with step and minimum gap both equal to epsilon, diagonal
    /// excluded: the adversary class behind the gap-constrained
    /// stop-early searches.
    static GridSpec gap_grid(double epsilon);
};

/// Knobs shared by the grid searches.  Defaults reproduce the reference
/// tables; everything here affects speed or reporting, never the
/// returned optimum (pruned states are provably dominated).
struct SearchConfig {
    int workers = 0;            // 0 = automatic (hardware, capped at 8)
    bool prune = true;          // analytic dominance/cap pruning
    double prune_margin = 0.999;
    bool refine = true;         // local refinement of minimax grids
    double refine_step = 1e-4;
    double refine_window = 0.02;
    bool bisect = false;        // bisection instead of linear scan (wmb)
    bool verify_pruning = false; // debug: re-evaluate pruned states
    long m_max = -1;            // cap the scanned experiment sizes (< 0: none)
    bool scan_past_crossing = false;  // keep tracing after the first feasible m
    // Optional progress sink, called with (m, worst value) as scans
    // advance; wired to stderr reporting by the command line tool.
    std::function<void(long, double)> on_progress;
};

/// Worst case of a criterion over a state grid at one experiment size.
struct WorstCaseResult {
    long experiment_size = 0;
    double value = 0.0;
    BernoulliState argmax;
    long states_evaluated = 0;
    long states_pruned = 0;
};

/// One point of a per-m scan trace.
struct TracePoint {
    long experiment_size = 0;
    double worst_value = 0.0;
    BernoulliState argmax;
};

/// Result of a sample-size recommendation.
struct DesignRecommendation {
    std::string criterion;  // "minimax-regret", "wmb-grid",
                            // "wmb-normal-approx", "gaussian-wmb",
                            // "relative-regret"
    long population = 0;
    bool feasible = true;
    long m_star = -1;        // recommended experiment size (-1 if infeasible)
    double fraction = 0.0;   // m_star / N
    bool degenerate = false; // set by the relative-regret criterion
    std::optional<BernoulliState> least_favorable;
    std::vector<TracePoint> trace;
};

/// The local neighbourhood of near-diagonal states in which the
/// normal approximation is uniformly accurate: mid value mu in
/// [kappa, 1 - kappa] and half gap delta in (0, K sqrt(log N / N)].
struct LocalRegion {
    double kappa = 0.1;
    double gap_scale = 1.0;  // K
    long population = 0;

    LocalRegion(double kappa_margin, double scale, long n_population);
    double max_half_gap() const;
    bool contains(const BernoulliState& state) const;
    /// Tensor grid of n_mid x n_gap states spanning the region.
    std::vector<BernoulliState> grid(int n_mid, int n_gap) const;
};

/// Per-m row of the localization diagnostic: where the adversarial
/// states live relative to the diagonal.
struct LocalizationRow {
    long experiment_size = 0;
    double worst_value = 0.0;
    BernoulliState argmax;
    double gap = 0.0;       // |mu1 - mu0| of the argmax
    double bound = 0.0;     // 2 sqrt(log N / m)
    bool asserted = false;  // the bound is only claimed where worst_value >= 1
    bool within = false;
};

struct LocalizationReport {
    long population = 0;
    std::vector<LocalizationRow> rows;
    bool all_asserted_hold = true;
};

/// Maximum of the absolute regret over the grid at one experiment size.
/// With config.refine set, the coarse maximum is sharpened by a local
/// window search at refine_step around the coarse argmax (the returned
/// value is never below the coarse one).  Ties prefer the state with the
/// lexicographically smallest (mu1, mu0); mirror-image states evaluate
/// bitwise identically, and the smaller representative is reported.
WorstCaseResult worst_case_regret(const DesignContext& ctx, const GridSpec& grid,
                                  const SearchConfig& config = {});

/// Experiment size minimizing the worst-case regret over the grid,
/// ties broken toward the smaller m.  The trace holds the per-m worst
/// values the decision was made on (refined values where refinement
/// ran, coarse values elsewhere).
DesignRecommendation minimax_sample_size(long population, const GridSpec& grid,
                                         const SearchConfig& config = {});

/// Maximum of the exact marginal ratio eta(m) over the grid at one
/// experiment size.  Requires experiment_size <= population - 2.
WorstCaseResult worst_case_wmb(const DesignContext& ctx, const GridSpec& grid,
                               const SearchConfig& config = {});

/// Smallest experiment size whose worst-case marginal ratio has dropped
/// to 1 or below: scan m = 0, 2, ... until max eta <= 1.  The trace
/// covers the scanned prefix; least_favorable is the maximizer at the
/// deciding step.  If the scanned range is exhausted first (m_max cap),
/// the result is marked infeasible rather than throwing.
DesignRecommendation wmb_sample_size(long population, const GridSpec& grid,
                                     const SearchConfig& config = {});

/// Normal-approximation analogue sharing the Gaussian closed form:
/// the smallest even m >= N / 3.  Requires even population >= 6.
DesignRecommendation wmb_sample_size_na(long population);

/// Argmax location of eta across the grid for each requested m, with
/// the near-diagonal localization bound 2 sqrt(log N / m).  The bound
/// is asserted only where the worst value is still >= 1.
LocalizationReport localization_diagnostic(long population, std::span<const long> sizes,
                                           const GridSpec& grid,
                                           const SearchConfig& config = {});

/// Worst case of the relative-regret criterion over the grid (states
/// with zero oracle welfare are skipped) and its minimizing m.  The
/// criterion is degenerate as the gap floor shrinks -- the worst case
/// flattens toward 1/2 regardless of m -- so recommendations carry
/// degenerate = true.
WorstCaseResult worst_case_relative_regret(const DesignContext& ctx, const GridSpec& grid,
                                           const SearchConfig& config = {});
DesignRecommendation relative_regret_sample_size(long population, const GridSpec& grid,
                                                 const SearchConfig& config = {});

}  // namespace testroll

#endif  // TESTROLL_SEARCH_HPP
