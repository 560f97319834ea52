#include <benchmark/benchmark.h>

#include "shiftspec/tree.hpp"

using namespace shiftspec;

static void BM_SigmaMin(benchmark::State& state) {
  const auto T = TreeSystem::contrexample();
  const auto M = truncate(T, static_cast<int>(state.range(0)));
  const std::complex<double> lambda = std::polar(1.0, 0.37);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sigma_min(M, lambda));
  }
}
BENCHMARK(BM_SigmaMin)->Arg(100)->Arg(200)->Arg(400);

static void BM_Truncate(benchmark::State& state) {
  const auto T = TreeSystem::contrexample();
  for (auto _ : state) {
    auto M = truncate(T, static_cast<int>(state.range(0)));
    benchmark::DoNotOptimize(M.entries.size());
  }
}
BENCHMARK(BM_Truncate)->Arg(100)->Arg(400);

static void BM_PseudospectrumRow(benchmark::State& state) {
  const auto T = TreeSystem::contrexample();
  const auto M = truncate(T, 200);
  for (auto _ : state) {
    for (int j = 0; j < 16; ++j) {
      const auto lambda = std::polar(1.3, 2.0 * M_PI * j / 16);
      benchmark::DoNotOptimize(sigma_min(M, lambda));
    }
  }
}
BENCHMARK(BM_PseudospectrumRow);

BENCHMARK_MAIN();
