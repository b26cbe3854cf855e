// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include <random>
#include <string>

#include "nudoa/estimator.hpp"
#include "nudoa/snapshots.hpp"

using namespace nudoa;

namespace {

HermitianMatrix random_hermitian(std::size_t n) {
  std::mt19937_64 rng(n);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = cplx(d(rng), d(rng));
  return HermitianMatrix(m);
}

HermitianMatrix sample_r(std::size_t m) {
  const ArrayGeometry g(m);
  std::vector<double> var(m, 1.0);
  for (std::size_t i = m / 2; i < m; ++i) var[i] = 10.0 * static_cast<double>(i);
  const NoiseProfile noise(var);
  const SourceSet sources = SourceSet::equal_power({-3.0, 6.0}, signal_power_for_snr(10.0, noise));
  return sample_covariance(generate_snapshots(g, sources, noise, 500, RngSeed{1, m}));
}

void BM_Eigh(benchmark::State& state) {
  const HermitianMatrix h = random_hermitian(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(eigh(h));
}

void BM_GeneralizedEigh(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const HermitianMatrix h = random_hermitian(n);
  std::vector<double> q(n);
  for (std::size_t i = 0; i < n; ++i) q[i] = 1.0 + static_cast<double>(i);
  const DiagonalMatrix metric(q);
  for (auto _ : state) benchmark::DoNotOptimize(generalized_eigh(h, metric));
}

void BM_EstimateDoa(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const auto method = static_cast<Method>(state.range(1));
  const HermitianMatrix r = sample_r(m);
  const ArrayGeometry g(m);
  for (auto _ : state) benchmark::DoNotOptimize(estimate_doa(r, 2, g, AngleGrid{}, method));
  state.SetLabel(std::string(method_name(method)));
}

}  // namespace

BENCHMARK(BM_Eigh)->RangeMultiplier(2)->Range(4, 32)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_GeneralizedEigh)->RangeMultiplier(2)->Range(4, 32)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_EstimateDoa)
    ->ArgsProduct({{8, 16, 32}, {static_cast<long>(Method::Phase1), static_cast<long>(Method::Phase2),
                                 static_cast<long>(Method::Classical)}})
    ->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
