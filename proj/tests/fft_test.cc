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


#include "tnn/fft.h"

#include <complex>
#include <vector>

#include <gtest/gtest.h>

#include "support/oracles.h"
#include "tnn/errors.h"
#include "tnn/random.h"

namespace tnn {
namespace {

using Complex = std::complex<double>;

std::vector<Complex> random_signal(std::size_t n, Rng& rng) {
  std::vector<Complex> x(n);
  for (auto& v : x) v = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
  return x;
}

double max_abs_diff(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

TEST(FftTest, PowerOfTwoHelpers) {
  EXPECT_TRUE(is_power_of_two(1));
  EXPECT_TRUE(is_power_of_two(64));
  EXPECT_FALSE(is_power_of_two(0));
  EXPECT_FALSE(is_power_of_two(12));
  EXPECT_EQ(next_power_of_two(1), 1u);
  EXPECT_EQ(next_power_of_two(5), 8u);
  EXPECT_EQ(next_power_of_two(8), 8u);
  EXPECT_EQ(next_power_of_two(1023), 1024u);
}

TEST(FftTest, ImpulseTransformsToOnes) {
  FftPlan<double> plan(8);
  std::vector<Complex> x(8, 0.0);
  x[0] = 1.0;
  plan.forward(x);
  for (const auto& v : x) EXPECT_EQ(v, Complex(1.0, 0.0));
}

TEST(FftTest, ForwardMatchesDefinitionForAllSizes) {
  Rng rng(3);
  for (std::size_t n = 1; n <= 70; ++n) {
    const auto x = random_signal(n, rng);
    const auto expected = testing::dft_by_definition(x);
    auto got = x;
    FftPlan<double>(n).forward(got);
    EXPECT_LT(max_abs_diff(got, expected), 1e-12 * static_cast<double>(n)) << "n=" << n;
  }
}

TEST(FftTest, InverseUndoesForward) {
  Rng rng(4);
  for (std::size_t n : {1u, 2u, 3u, 16u, 17u, 100u, 256u, 1000u}) {
    const auto x = random_signal(n, rng);
    auto y = x;
    FftPlan<double> plan(n);
    plan.forward(y);
    plan.inverse(y);
    EXPECT_LT(max_abs_diff(x, y), 1e-13 * static_cast<double>(n)) << "n=" << n;
  }
}

TEST(FftTest, FloatPlanTracksDoubleOracle) {
  Rng rng(5);
  for (std::size_t n : {8u, 12u, 64u}) {
    const auto x = random_signal(n, rng);
    const auto expected = testing::dft_by_definition(x);
    std::vector<std::complex<float>> got(n);
    for (std::size_t i = 0; i < n; ++i) got[i] = {float(x[i].real()), float(x[i].imag())};
    FftPlan<float>(n).forward(got);
    for (std::size_t i = 0; i < n; ++i) {
      EXPECT_NEAR(got[i].real(), expected[i].real(), 1e-4 * n);
      EXPECT_NEAR(got[i].imag(), expected[i].imag(), 1e-4 * n);
    }
  }
}

TEST(FftTest, RealPlanMatchesDefinition) {
  Rng rng(6);
  for (std::size_t n : {2u, 4u, 6u, 8u, 10u, 32u, 48u, 512u}) {
    std::vector<double> x(n);
    std::vector<Complex> xc(n);
    for (std::size_t i = 0; i < n; ++i) xc[i] = x[i] = rng.uniform(-1.0, 1.0);
    const auto expected = testing::dft_by_definition(xc);
    RealFftPlan<double> plan(n);
    ASSERT_EQ(plan.bins(), n / 2 + 1);
    std::vector<Complex> bins(plan.bins());
    plan.forward(x, bins);
    for (std::size_t k = 0; k < plan.bins(); ++k) {
      EXPECT_LT(std::abs(bins[k] - expected[k]), 1e-12 * n) << "n=" << n << " k=" << k;
    }
    std::vector<double> back(n);
    plan.inverse(bins, back);
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(back[i], x[i], 1e-13 * n);
  }
}

TEST(FftTest, SizeMismatchIsRejected) {
  FftPlan<double> plan(8);
  std::vector<Complex> x(7);
  EXPECT_THROW(plan.forward(x), DimensionError);
}

}  // namespace
}  // namespace tnn
