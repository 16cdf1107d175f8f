#include <benchmark/benchmark.h>

#include "ldbm/gff.hpp"

using namespace ldbm;

static void BM_DenseFactorize(benchmark::State& state) {
  const GridSpec grid = GridSpec::centered_square(2.0, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(LayerSampler(grid, 4, CutoffSequence::dyadic(), MassParam(1.0)));
}
BENCHMARK(BM_DenseFactorize)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

static void BM_DenseBatch(benchmark::State& state) {
  const GridSpec grid = GridSpec::default_grid();
  const LayerSampler sampler(grid, 4, CutoffSequence::dyadic(), MassParam(1.0));
  std::uint32_t draw = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sampler.sample_batch(1, draw, LayerSampler::kBatchWidth));
    draw += LayerSampler::kBatchWidth;
  }
  state.SetItemsProcessed(state.iterations() * LayerSampler::kBatchWidth);
}
BENCHMARK(BM_DenseBatch)->Unit(benchmark::kMillisecond);

static void BM_CirculantDraw(benchmark::State& state) {
  const GridSpec grid = GridSpec::centered_square(4.0, static_cast<int>(state.range(0)));
  SamplerOptions options;
  options.method = SamplerMethod::circulant;
  const LayerSampler sampler(grid, 6, CutoffSequence::dyadic(), MassParam(1.0), options);
  std::uint32_t draw = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sampler.sample(1, draw++));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_CirculantDraw)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

static void BM_FieldLevel6(benchmark::State& state) {
  const FieldSampler sampler(GridSpec::centered_square(3.5, 56), CutoffSequence::dyadic(), MassParam(1.0));
  std::uint32_t draw = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sampler.sample(6, 1, draw++));
}
BENCHMARK(BM_FieldLevel6)->Unit(benchmark::kMillisecond);
