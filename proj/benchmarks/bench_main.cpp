#include <benchmark/benchmark.h>

#include "testroll/bernoulli.hpp"
#include "testroll/criteria.hpp"
#include "testroll/dist.hpp"
#include "testroll/search.hpp"

using namespace testroll;

namespace {

void bench_normal_cdf(benchmark::State& state) {
    double x = -3.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(normal_cdf(x));
        x += 1e-6;
    }
}
BENCHMARK(bench_normal_cdf);

void bench_binomial_pmf(benchmark::State& state) {
    const int trials = int(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(binomial_pmf(trials, 0.37));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(bench_binomial_pmf)->Arg(50)->Arg(200)->Complexity();

void bench_walk_pmf(benchmark::State& state) {
    const TrinomialWalk walk =
        TrinomialWalk::from_rates(0.6, 0.4, int(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(walk_pmf(walk));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(bench_walk_pmf)->Arg(50)->Arg(200)->Arg(800)->Complexity();

void bench_error_prob(benchmark::State& state) {
    const long m = state.range(0);
    const DesignContext ctx(2 * m, m);
    const BernoulliState probe(0.55, 0.45);
    for (auto _ : state)
        benchmark::DoNotOptimize(error_prob(ctx, probe));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(bench_error_prob)->Arg(40)->Arg(160)->Arg(640)->Complexity();

void bench_error_prob_sweep(benchmark::State& state) {
    // Incremental sweep over all even sizes up to the bound; the
    // quantity the scanning searches are built on.
    const long m_max = state.range(0);
    for (auto _ : state) {
        ErrorProbEvaluator eval(BernoulliState(0.52, 0.48), int(m_max / 2) + 1);
        double sink = 0.0;
        for (long m = 0; m < m_max; m += 2) {
            eval.advance();
            sink += eval.error_prob();
        }
        benchmark::DoNotOptimize(sink);
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(bench_error_prob_sweep)->Arg(200)->Arg(800)->Complexity();

void bench_wmb_ratio(benchmark::State& state) {
    const DesignContext ctx(1000, 100);
    const BernoulliState probe(0.51, 0.50);
    for (auto _ : state)
        benchmark::DoNotOptimize(wmb_ratio(ctx, probe).value);
}
BENCHMARK(bench_wmb_ratio);

void bench_worst_case_wmb(benchmark::State& state) {
    const DesignContext ctx(200, 40);
    const GridSpec grid = GridSpec::gap_grid(0.01);
    SearchConfig config;
    config.workers = 1;
    for (auto _ : state)
        benchmark::DoNotOptimize(worst_case_wmb(ctx, grid, config).value);
}
BENCHMARK(bench_worst_case_wmb);

void bench_worst_case_regret(benchmark::State& state) {
    const DesignContext ctx(500, 30);
    GridSpec grid;
    SearchConfig config;
    config.workers = 1;
    config.refine = false;
    for (auto _ : state)
        benchmark::DoNotOptimize(worst_case_regret(ctx, grid, config).value);
}
BENCHMARK(bench_worst_case_regret);

}  // namespace

BENCHMARK_MAIN();
