#include <benchmark/benchmark.h>

#include <vector>

#include "nsfe/approx.hpp"
#include "nsfe/bench.hpp"
#include "nsfe/core.hpp"
#include "nsfe/estimators.hpp"
#include "nsfe/priors.hpp"

namespace {

void BM_Remez(benchmark::State& state) {
  const int K = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(nsfe::best_poly_approx(1.5, K).delta);
}
BENCHMARK(BM_Remez)->Arg(2)->Arg(8)->Arg(16)->Arg(24)->Unit(benchmark::kMillisecond);

// Estimators on a fixed draw; d is the argument.
std::vector<double> observations(std::int64_t d, std::int64_t s) {
  const auto theta = nsfe::theta_profile(nsfe::ThetaProfile::SpikesLarge, nsfe::ProblemConfig(d, s, 1.0, 1.0));
  return nsfe::simulate_observations(theta.values(), 1.0, 42);
}

void BM_Sparse(benchmark::State& state) {
  const auto d = state.range(0);
  const nsfe::ProblemConfig cfg(d, 4, 1.0, 1.0);
  const auto y = observations(d, 4);
  for (auto _ : state) benchmark::DoNotOptimize(nsfe::estimate_sparse(y, cfg).value);
  state.SetItemsProcessed(state.iterations() * d);
}
BENCHMARK(BM_Sparse)->Arg(1024)->Arg(16384);

void BM_Dense(benchmark::State& state) {
  const auto d = state.range(0);
  const nsfe::ProblemConfig cfg(d, d, 1.0, 1.5);
  const auto y = observations(d, d);
  nsfe::estimate_dense(y, cfg, 1);  // warm the approximation cache
  for (auto _ : state) benchmark::DoNotOptimize(nsfe::estimate_dense(y, cfg, 1).value);
  state.SetItemsProcessed(state.iterations() * d);
}
BENCHMARK(BM_Dense)->Arg(256)->Arg(4096);

void BM_Even(benchmark::State& state) {
  const auto d = state.range(0);
  const nsfe::ProblemConfig cfg(d, d, 1.0, 4.0);
  const auto y = observations(d, d);
  for (auto _ : state) benchmark::DoNotOptimize(nsfe::estimate_even(y, cfg, 1).value);
  state.SetItemsProcessed(state.iterations() * d);
}
BENCHMARK(BM_Even)->Arg(256)->Arg(4096);

void BM_MatchingMeasures(benchmark::State& state) {
  const auto cfg = nsfe::prior_config(1024, 1024, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(nsfe::matching_measures(1.0, cfg.K, cfg.M).gap);
}
BENCHMARK(BM_MatchingMeasures)->Unit(benchmark::kMillisecond);

void BM_RiskExperiment(benchmark::State& state) {
  nsfe::ExperimentSpec spec;
  spec.grid = {nsfe::ProblemConfig(256, 4, 1.0, 1.0), nsfe::ProblemConfig(256, 256, 1.0, 1.0)};
  spec.replicates = 100;
  for (auto _ : state) {
    benchmark::DoNotOptimize(nsfe::run_risk_experiment(spec, static_cast<unsigned>(state.range(0))).rows.size());
  }
}
BENCHMARK(BM_RiskExperiment)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
