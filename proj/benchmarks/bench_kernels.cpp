#include <benchmark/benchmark.h>

#include "mesospec/mesospec.hpp"

namespace {

mesospec::EnsembleSpec wigner(std::size_t n) {
  mesospec::EnsembleSpec spec;
  spec.kind = mesospec::EnsembleKind::wigner;
  spec.N = n;
  spec.seed = {42, 0};
  return spec;
}

void BM_GenerateWigner(benchmark::State& state) {
  const auto spec = wigner(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(mesospec::generate(spec));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_GenerateWigner)->RangeMultiplier(2)->Range(128, 1024)->Unit(benchmark::kMillisecond);

void BM_GenerateSampleCovariance(benchmark::State& state) {
  auto spec = wigner(static_cast<std::size_t>(state.range(0)));
  spec.kind = mesospec::EnsembleKind::sample_covariance;
  spec.c = 2.0;
  for (auto _ : state) benchmark::DoNotOptimize(mesospec::generate(spec));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_GenerateSampleCovariance)
    ->RangeMultiplier(2)
    ->Range(128, 1024)
    ->Unit(benchmark::kMillisecond)
    ->Complexity(benchmark::oNCubed);

void BM_Tridiagonalize(benchmark::State& state) {
  const auto a = mesospec::generate(wigner(static_cast<std::size_t>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(mesospec::tridiagonalize(a));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Tridiagonalize)
    ->RangeMultiplier(2)
    ->Range(128, 2048)
    ->Unit(benchmark::kMillisecond)
    ->Complexity(benchmark::oNCubed);

void BM_TridiagonalQL(benchmark::State& state) {
  const auto a = mesospec::generate(wigner(static_cast<std::size_t>(state.range(0))));
  const auto t = mesospec::tridiagonalize(a);
  for (auto _ : state) {
    benchmark::DoNotOptimize(mesospec::eigenvalues_tridiagonal(t.diagonal, t.offdiagonal));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_TridiagonalQL)
    ->RangeMultiplier(2)
    ->Range(128, 2048)
    ->Unit(benchmark::kMillisecond)
    ->Complexity(benchmark::oNSquared);

void BM_ResolventOracle(benchmark::State& state) {
  const auto a = mesospec::generate(wigner(static_cast<std::size_t>(state.range(0))));
  for (auto _ : state) {
    benchmark::DoNotOptimize(mesospec::resolvent_trace_oracle(a, {0.3, 0.1}));
  }
}
BENCHMARK(BM_ResolventOracle)->RangeMultiplier(2)->Range(8, 128);

}  // namespace

BENCHMARK_MAIN();
