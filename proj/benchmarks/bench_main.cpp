#include <benchmark/benchmark.h>

#include "cournot/bargaining.hpp"
#include "cournot/experiment.hpp"
#include "cournot/qlearning.hpp"

namespace {

using namespace cournot;

MarketParams asym3() {
  MarketParams m;
  m.c_L = 10;
  m.c_H = 28;
  return m;
}

void BM_FrontierValue(benchmark::State& state) {
  const auto m = asym3();
  double pi = 0;
  for (auto _ : state) {
    pi = pi > 1600 ? 0 : pi + 13.7;
    benchmark::DoNotOptimize(frontier_value(m, pi, 0));
  }
}
BENCHMARK(BM_FrontierValue);

void BM_SolveKs(benchmark::State& state) {
  const auto m = asym3();
  const auto d = minmax_disagreement(m);
  for (auto _ : state) benchmark::DoNotOptimize(solve_ks(m, d));
}
BENCHMARK(BM_SolveKs);

void BM_BenchmarkSuite(benchmark::State& state) {
  const auto sets = builtin_param_sets(CostTable::kMain);
  for (auto _ : state) {
    for (const auto& set : sets) benchmark::DoNotOptimize(benchmark_suite(set.params));
  }
}
BENCHMARK(BM_BenchmarkSuite)->Unit(benchmark::kMillisecond);

// Fixed number of learning periods: the window is never reached.
void BM_EpisodePeriods(benchmark::State& state) {
  LearnerConfig cfg;
  cfg.k = static_cast<int>(state.range(0));
  EpisodeLimits lim;
  lim.max_periods = 1'000'000;
  lim.convergence_window = lim.max_periods;
  std::uint64_t seed = 1;
  for (auto _ : state) benchmark::DoNotOptimize(run_episode(MarketParams{}, cfg, seed++, lim));
  state.SetItemsProcessed(state.iterations() * lim.max_periods);
}
BENCHMARK(BM_EpisodePeriods)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_ConvergedEpisode(benchmark::State& state) {
  LearnerConfig cfg;
  cfg.beta = beta_from_nu(21, cfg.m(), LearnerConfig::kAgents, cfg.k);
  std::uint64_t seed = 1;
  for (auto _ : state) benchmark::DoNotOptimize(run_episode(MarketParams{}, cfg, seed++));
}
BENCHMARK(BM_ConvergedEpisode)->Unit(benchmark::kMillisecond)->Iterations(5);

}  // namespace

BENCHMARK_MAIN();
