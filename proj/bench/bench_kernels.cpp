#include <benchmark/benchmark.h>

#include "rnsim/harness.hpp"

using namespace rnsim;

static void BM_DiameterParallel(benchmark::State& state) {
  const Graph g = make_graph("grid:" + std::to_string(state.range(0)) + "x" + std::to_string(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(oracle_diameter(g));
}
BENCHMARK(BM_DiameterParallel)->Arg(32)->Arg(64);

static void BM_DiameterSerial(benchmark::State& state) {
  const Graph g = make_graph("grid:" + std::to_string(state.range(0)) + "x" + std::to_string(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(oracle_diameter_serial(g));
}
BENCHMARK(BM_DiameterSerial)->Arg(32)->Arg(64);

static void fan_out(benchmark::State& state, bool serial) {
  auto cfg = parse_config({{"task", "diam32"}, {"graph", "gnp:128:6"}, {"seeds", "0..7"}, {"serial", serial}});
  for (auto _ : state) benchmark::DoNotOptimize(run_experiment(cfg).thresholds_met);
}
static void BM_SeedFanOutParallel(benchmark::State& state) { fan_out(state, false); }
static void BM_SeedFanOutSerial(benchmark::State& state) { fan_out(state, true); }
BENCHMARK(BM_SeedFanOutParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SeedFanOutSerial)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
