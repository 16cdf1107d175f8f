#include <benchmark/benchmark.h>

#include "ldbm/dbm.hpp"

using namespace ldbm;

static void BM_EulerStep(benchmark::State& state) {
  DbmStepper stepper({1.0, 0.0}, 2.0, 1e-4, {1, streams::path(), 0});
  for (auto _ : state) benchmark::DoNotOptimize(stepper.step());
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_EulerStep);

static void BM_SimulatePath(benchmark::State& state) {
  PathOptions options;
  options.horizon = 1.0;
  options.annuli = {2, 3};
  std::uint32_t index = 0;
  for (auto _ : state) benchmark::DoNotOptimize(simulate_path({1.0, 0.0}, options, {1, streams::path(), index++}));
  state.SetItemsProcessed(state.iterations() * 10000);
}
BENCHMARK(BM_SimulatePath)->Unit(benchmark::kMillisecond);
