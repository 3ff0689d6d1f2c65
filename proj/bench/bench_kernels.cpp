// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include "d2dcache/delivery.hpp"
#include "d2dcache/exact.hpp"
#include "d2dcache/experiment.hpp"

namespace {

using namespace d2dcache;

struct OracleCase {
  LevelCapacities caps;
  PopularityModel pop;
  double cache_size;
};

OracleCase oracle_case() {
  const NetworkGrid grid(3, 0.0, 4.0);
  return {edge_capacities(grid, PhyParams::from_alpha(4.0)),
          PopularityModel::zipf(120, 1.2), 6.0};
}

void BM_BruteForceSerial(benchmark::State& state) {
  const OracleCase c = oracle_case();
  for (auto _ : state) {
    benchmark::DoNotOptimize(brute_force_serial(c.caps, c.pop, c.cache_size).rate());
  }
}
BENCHMARK(BM_BruteForceSerial)->Unit(benchmark::kMillisecond);

void BM_BruteForceParallel(benchmark::State& state) {
  const OracleCase c = oracle_case();
  for (auto _ : state) {
    benchmark::DoNotOptimize(brute_force(c.caps, c.pop, c.cache_size).rate());
  }
}
BENCHMARK(BM_BruteForceParallel)->Unit(benchmark::kMillisecond);

SimConfig sim_case() {
  ExperimentConfig cfg;
  const Instance inst = make_instance(cfg);
  return {inst.grid, place_instance(inst).placement, inst.pop, 1'000'000, 7, false};
}

void BM_SimulateSerial(benchmark::State& state) {
  const SimConfig cfg = sim_case();
  for (auto _ : state) benchmark::DoNotOptimize(simulate_serial(cfg).local_hit_fraction);
}
BENCHMARK(BM_SimulateSerial)->Unit(benchmark::kMillisecond);

void BM_SimulateParallel(benchmark::State& state) {
  const SimConfig cfg = sim_case();
  for (auto _ : state) benchmark::DoNotOptimize(simulate(cfg).local_hit_fraction);
}
BENCHMARK(BM_SimulateParallel)->Unit(benchmark::kMillisecond);

void BM_BetaSweep(benchmark::State& state) {
  ExperimentConfig cfg;
  cfg.axis = "beta2";
  for (auto _ : state) benchmark::DoNotOptimize(run_sweep(cfg).size());
}
BENCHMARK(BM_BetaSweep)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
