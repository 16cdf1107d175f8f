#include <benchmark/benchmark.h>

#include "ldbm/clock.hpp"

using namespace ldbm;

namespace {

struct Fixture {
  FieldState field;
  PathSample path;
  ClockSample clock;
  Fixture() {
    const FieldSampler sampler(GridSpec::centered_square(3.5, 56), CutoffSequence::dyadic(), MassParam(1.0));
    field = sampler.sample(6, 1, 0);
    PathOptions options;
    options.horizon = 1.0;
    path = simulate_path({1.0, 0.0}, options, {1, streams::path(), 0});
    clock = accumulate_pcaf(path, field, 0.5);
  }
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

}  // namespace

static void BM_AccumulatePcaf(benchmark::State& state) {
  const Fixture& f = fixture();
  const std::optional<AnnulusDomain> domain = state.range(0) ? std::optional<AnnulusDomain>(AnnulusDomain(3)) : std::nullopt;
  for (auto _ : state) benchmark::DoNotOptimize(accumulate_pcaf(f.path, f.field, 0.5, domain));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.path.size()));
}
BENCHMARK(BM_AccumulatePcaf)->Arg(0)->Arg(1);

static void BM_InvertClock(benchmark::State& state) {
  const Fixture& f = fixture();
  const double end = f.clock.final_value();
  double tau = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(invert_clock(f.clock, tau));
    tau += 0.001 * end;
    if (tau >= end) tau = 0.0;
  }
}
BENCHMARK(BM_InvertClock);
