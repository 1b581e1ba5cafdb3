#include <benchmark/benchmark.h>

#include <memory>

#include "qtwist/analysis.hpp"
#include "qtwist/family.hpp"
#include "qtwist/ntcore.hpp"
#include "qtwist/randmodel.hpp"

using namespace qtwist;

static void BM_SievePrimes(benchmark::State& state) {
  const auto limit = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(sieve_primes(limit));
}
BENCHMARK(BM_SievePrimes)->Arg(100000)->Arg(1000000)->Arg(10000000)->Unit(benchmark::kMillisecond);

static void BM_EnumerateDiscriminants(benchmark::State& state) {
  const auto n = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_discriminants(n));
}
BENCHMARK(BM_EnumerateDiscriminants)->Arg(100000)->Arg(1000000)->Unit(benchmark::kMillisecond);

static void BM_Kronecker(benchmark::State& state) {
  std::uint64_t n = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(kronecker(-987643, n));
    n += 7919;
  }
}
BENCHMARK(BM_Kronecker);

static void BM_FamilySweep(benchmark::State& state) {
  FamilyConfig cfg;
  cfg.N = static_cast<std::uint64_t>(state.range(0));
  cfg.Y = FamilyConfig::default_length(cfg.N);
  cfg.provider = std::make_shared<const SatakeProvider>(trivial_provider());
  for (auto _ : state) benchmark::DoNotOptimize(family_sweep(cfg));
}
BENCHMARK(BM_FamilySweep)->Arg(10000)->Arg(1000000)->Unit(benchmark::kMillisecond);

static void BM_PhiRand(benchmark::State& state) {
  const auto provider = trivial_provider();
  const auto cutoff = static_cast<std::uint64_t>(state.range(0));
  const ModelCharFn model(provider, 0.0, cutoff);
  double u = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(model(u, 0.0));
    u += 0.01;
  }
}
BENCHMARK(BM_PhiRand)->Arg(10000)->Arg(100000)->Unit(benchmark::kMicrosecond);

static void BM_ExactMoment(benchmark::State& state) {
  const auto provider = trivial_provider();
  const PrimePowerSeries series(provider, 30.0, 0.0);
  const auto order = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(exact_moment(series, order, order));
}
BENCHMARK(BM_ExactMoment)->Arg(1)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

static void BM_ModelDraws(benchmark::State& state) {
  const auto provider = trivial_provider();
  const PrimePowerSeries series(provider, 100000.0, 0.0);
  for (auto _ : state) benchmark::DoNotOptimize(mc_value_set(series, 1, 1000, 1));
}
BENCHMARK(BM_ModelDraws)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
