#include <benchmark/benchmark.h>

#include "ldbm/covariance.hpp"

using namespace ldbm;

static void BM_KernelQuadrature(benchmark::State& state) {
  double r = 1e-3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernel_km(r, MassParam(1.0)));
    r = r < 10.0 ? r * 1.01 : 1e-3;
  }
}
BENCHMARK(BM_KernelQuadrature);

static void BM_KernelBessel(benchmark::State& state) {
  double r = 1e-3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernel_km_bessel(r, MassParam(1.0)));
    r = r < 10.0 ? r * 1.01 : 1e-3;
  }
}
BENCHMARK(BM_KernelBessel);

static void BM_LayerCovariance(benchmark::State& state) {
  const auto seq = CutoffSequence::dyadic();
  const int n = static_cast<int>(state.range(0));
  double r = 1e-3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(layer_covariance(r, n, seq, MassParam(1.0)));
    r = r < 10.0 ? r * 1.01 : 1e-3;
  }
}
BENCHMARK(BM_LayerCovariance)->Arg(2)->Arg(6);

static void BM_CovarianceTableBuild(benchmark::State& state) {
  const auto seq = CutoffSequence::dyadic();
  for (auto _ : state) benchmark::DoNotOptimize(CovarianceTable(static_cast<int>(state.range(0)), seq, MassParam(1.0)));
}
BENCHMARK(BM_CovarianceTableBuild)->Arg(6)->Unit(benchmark::kMillisecond);
