// Copyright 2026 The TNN Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Toeplitz matrix-vector products: naive O(n^2 d) against both FFT circulant
// embeddings, plus the raw FFT plans they are built on.

#include <complex>
#include <vector>

#include <benchmark/benchmark.h>

#include "tnn/fft.h"
#include "tnn/random.h"
#include "tnn/toeplitz.h"

namespace tnn {
namespace {

template <typename T>
RelPosCoefficients<T> random_coeffs(std::size_t n, std::size_t d, Rng& rng) {
  RelPosCoefficients<T> c(n, d);
  for (T& v : c.values()) v = static_cast<T>(rng.uniform(-1.0, 1.0));
  return c;
}

template <typename T>
Sequence<T> random_sequence(std::size_t n, std::size_t d, Rng& rng) {
  Sequence<T> s(n, d);
  for (T& v : s.values()) v = static_cast<T>(rng.uniform(-1.0, 1.0));
  return s;
}

template <typename T>
void BM_NaiveMatvec(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto d = static_cast<std::size_t>(state.range(1));
  Rng rng(1);
  const auto coeffs = random_coeffs<T>(n, d, rng);
  const auto x = random_sequence<T>(n, d, rng);
  for (auto _ : state) benchmark::DoNotOptimize(naive_matvec(coeffs, x));
  state.SetComplexityN(state.range(0));
}

template <typename T, CirculantStrategy kStrategy>
void BM_FftMatvec(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto d = static_cast<std::size_t>(state.range(1));
  Rng rng(2);
  const auto coeffs = random_coeffs<T>(n, d, rng);
  const auto x = random_sequence<T>(n, d, rng);
  for (auto _ : state) benchmark::DoNotOptimize(fft_matvec(coeffs, x, kStrategy));
  state.SetComplexityN(state.range(0));
}

// The product with the coefficient spectra already computed, as inside a
// layer that reuses its plan across a batch.
void BM_PlannedApply(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(3);
  const ToeplitzPlan<double> plan(random_coeffs<double>(n, 1, rng),
                                  CirculantStrategy::kPaddedPow2);
  std::vector<double> x(n), y(n);
  for (double& v : x) v = rng.uniform(-1.0, 1.0);
  ToeplitzPlan<double>::Workspace ws;
  for (auto _ : state) {
    plan.apply(0, {x.data(), n, 1}, {y.data(), n, 1}, ws);
    benchmark::DoNotOptimize(y.data());
  }
  state.SetComplexityN(state.range(0));
}

void BM_ComplexFft(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const FftPlan<double> plan(n);
  Rng rng(4);
  std::vector<std::complex<double>> data(n);
  for (auto& v : data) v = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
  for (auto _ : state) {
    plan.forward(data);
    plan.inverse(data);
    benchmark::DoNotOptimize(data.data());
  }
  state.SetComplexityN(state.range(0));
}

void BM_RealFft(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const RealFftPlan<double> plan(n);
  Rng rng(5);
  std::vector<double> in(n), out(n);
  for (double& v : in) v = rng.uniform(-1.0, 1.0);
  std::vector<std::complex<double>> bins(plan.bins());
  for (auto _ : state) {
    plan.forward(in, bins);
    plan.inverse(bins, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetComplexityN(state.range(0));
}

BENCHMARK(BM_NaiveMatvec<double>)
    ->ArgsProduct({benchmark::CreateRange(64, 2048, 2), {64}})
    ->Complexity(benchmark::oNSquared);
BENCHMARK(BM_FftMatvec<double, CirculantStrategy::kPaddedPow2>)
    ->ArgsProduct({benchmark::CreateRange(64, 16384, 2), {64}})
    ->Complexity(benchmark::oNLogN);
BENCHMARK(BM_FftMatvec<double, CirculantStrategy::kPaper2n>)
    ->ArgsProduct({benchmark::CreateRange(64, 16384, 2), {64}})
    ->Complexity(benchmark::oNLogN);
BENCHMARK(BM_FftMatvec<float, CirculantStrategy::kPaddedPow2>)
    ->ArgsProduct({benchmark::CreateRange(64, 16384, 4), {64}})
    ->Complexity(benchmark::oNLogN);
BENCHMARK(BM_PlannedApply)->RangeMultiplier(2)->Range(64, 65536)->Complexity(benchmark::oNLogN);
BENCHMARK(BM_ComplexFft)->RangeMultiplier(2)->Range(64, 65536)->Complexity(benchmark::oNLogN);
BENCHMARK(BM_ComplexFft)->DenseRange(1000, 1003);
BENCHMARK(BM_RealFft)->RangeMultiplier(2)->Range(64, 65536)->Complexity(benchmark::oNLogN);

}  // namespace
}  // namespace tnn

BENCHMARK_MAIN();
