#include <benchmark/benchmark.h>

#include <random>

#include "shiftspec/transfer.hpp"

using namespace shiftspec;

namespace {

TransitionMatrix golden_mean() { return TransitionMatrix::validate({{1, 1}, {1, 0}}); }

CylinderFunction random_weight(const TransitionMatrix& A, int depth) {
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> uni(0.2, 2.0);
  WordTable table(A, depth);
  std::vector<double> v(table.size());
  for (double& x : v) x = uni(rng);
  return {A, depth, std::move(v), ValueKind::nonneg};
}

}  // namespace

static void BM_SpectralRadiusBlockDepth(benchmark::State& state) {
  const auto A = golden_mean();
  const auto c = random_weight(A, static_cast<int>(state.range(0)));
  const auto W = build_transfer(A, c);
  for (auto _ : state) {
    auto sr = spectral_radius(W, 1e-10);
    benchmark::DoNotOptimize(sr.rho);
  }
  state.SetLabel("block states: " + std::to_string(W.size()));
}
BENCHMARK(BM_SpectralRadiusBlockDepth)->DenseRange(2, 10, 2);

static void BM_BuildTransfer(benchmark::State& state) {
  const auto A = golden_mean();
  const auto c = random_weight(A, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto W = build_transfer(A, c);
    benchmark::DoNotOptimize(W.size());
  }
}
BENCHMARK(BM_BuildTransfer)->DenseRange(2, 10, 2);

static void BM_PerronEigendata(benchmark::State& state) {
  const auto A = golden_mean();
  const auto W = build_transfer(A, random_weight(A, static_cast<int>(state.range(0))));
  for (auto _ : state) {
    auto pd = perron_eigendata(W, 1e-10);
    benchmark::DoNotOptimize(pd.rho);
  }
}
BENCHMARK(BM_PerronEigendata)->DenseRange(2, 8, 2);
