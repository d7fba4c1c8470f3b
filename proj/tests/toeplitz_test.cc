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


#include "tnn/toeplitz.h"

#include <cmath>
#include <limits>
#include <vector>

#include <gtest/gtest.h>

#include "support/oracles.h"
#include "tnn/errors.h"
#include "tnn/random.h"

namespace tnn {
namespace {

constexpr CirculantStrategy kStrategies[] = {CirculantStrategy::kPaper2n,
                                             CirculantStrategy::kPaddedPow2};

RelPosCoefficients<double> two_by_two() {
  RelPosCoefficients<double> c(2, 1);
  c.at(-1, 0) = 3.0;
  c.at(0, 0) = 1.0;
  c.at(1, 0) = 2.0;
  return c;
}

std::vector<double> channel_of(const Sequence<double>& s, std::size_t c) {
  std::vector<double> out(s.length());
  for (std::size_t i = 0; i < s.length(); ++i) out[i] = s.at(i, c);
  return out;
}

TEST(ToeplitzTest, TwoByTwoHandExpansion) {
  const Sequence<double> x(2, 1, {1.0, 1.0});
  EXPECT_EQ(naive_matvec(two_by_two(), x).values()[0], 4.0);
  EXPECT_EQ(naive_matvec(two_by_two(), x).values()[1], 3.0);
  for (auto s : kStrategies) {
    const auto y = fft_matvec(two_by_two(), x, s);
    EXPECT_NEAR(y.at(0, 0), 4.0, 1e-14);
    EXPECT_NEAR(y.at(1, 0), 3.0, 1e-14);
  }
}

TEST(ToeplitzTest, IdentityAndZeroCoefficients) {
  Rng rng(1);
  const std::size_t n = 64;
  RelPosCoefficients<double> identity(n, 2);
  identity.at(0, 0) = identity.at(0, 1) = 1.0;
  const auto x = testing::random_sequence(n, 2, rng);
  EXPECT_EQ(naive_matvec(identity, x), x);
  for (auto s : kStrategies) {
    const auto y = fft_matvec(identity, x, s);
    for (std::size_t i = 0; i < y.values().size(); ++i) {
      EXPECT_NEAR(y.values()[i], x.values()[i], 1e-12);
    }
    const auto zero = fft_matvec(RelPosCoefficients<double>(n, 2), x, s);
    for (double v : zero.values()) {
      EXPECT_EQ(v, 0.0);
    }
  }
}

TEST(ToeplitzTest, NaiveMatchesDefinition) {
  Rng rng(2);
  for (std::size_t n : {1u, 2u, 5u, 17u, 40u}) {
    const auto coeffs = testing::random_coeffs(n, 3, rng);
    const auto x = testing::random_sequence(n, 3, rng);
    const auto y = naive_matvec(coeffs, x);
    for (std::size_t c = 0; c < 3; ++c) {
      const auto expected = testing::toeplitz_by_definition(
          [&](std::ptrdiff_t k) { return coeffs.at(k, c); }, channel_of(x, c));
      EXPECT_LT(testing::normwise_error(channel_of(y, c), expected), 1e-14);
    }
  }
}

TEST(ToeplitzTest, FftMatchesNaiveSweep) {
  Rng rng(3);
  for (std::size_t n = 1; n <= 128; ++n) {
    const std::size_t d = 1 + rng.below(4);
    const auto coeffs = testing::random_coeffs(n, d, rng);
    const auto x = testing::random_sequence(n, d, rng);
    const auto expected = naive_matvec(coeffs, x);
    for (auto s : kStrategies) {
      const auto y = fft_matvec(coeffs, x, s);
      EXPECT_LT(testing::normwise_error(y.values(), expected.values()), 1e-9)
          << "n=" << n << " strategy=" << to_string(s);
    }
  }
}

TEST(ToeplitzTest, FloatPathWithinSinglePrecision) {
  Rng rng(4);
  for (std::size_t n : {3u, 50u, 200u}) {
    RelPosCoefficients<float> coeffs(n, 2);
    Sequence<float> x(n, 2);
    for (float& v : coeffs.values()) v = static_cast<float>(rng.uniform(-1.0, 1.0));
    for (float& v : x.values()) v = static_cast<float>(rng.uniform(-1.0, 1.0));
    const auto expected = naive_matvec(coeffs, x);
    double scale = 0.0, worst = 0.0;
    for (auto s : kStrategies) {
      const auto y = fft_matvec(coeffs, x, s);
      for (std::size_t i = 0; i < y.values().size(); ++i) {
        scale = std::max(scale, std::abs(double(expected.values()[i])));
        worst = std::max(worst, std::abs(double(y.values()[i] - expected.values()[i])));
      }
      EXPECT_LT(worst / scale, 1e-4) << to_string(s);
    }
  }
}

TEST(CirculantTest, Sizes) {
  EXPECT_EQ(circulant_size(1, CirculantStrategy::kPaper2n), 2u);
  EXPECT_EQ(circulant_size(3, CirculantStrategy::kPaper2n), 6u);
  EXPECT_EQ(circulant_size(1, CirculantStrategy::kPaddedPow2), 1u);
  EXPECT_EQ(circulant_size(3, CirculantStrategy::kPaddedPow2), 8u);
  EXPECT_EQ(circulant_size(4, CirculantStrategy::kPaddedPow2), 8u);
  EXPECT_EQ(circulant_size(5, CirculantStrategy::kPaddedPow2), 16u);
  EXPECT_THROW(circulant_size(0, CirculantStrategy::kPaddedPow2), DimensionError);
}

TEST(CirculantTest, SingleOffsetFillsBothEntries) {
  RelPosCoefficients<double> c(1, 1, {5.0});
  const auto spec = build_circulant(c, CirculantStrategy::kPaper2n);
  EXPECT_EQ(spec.embed_size, 2u);
  EXPECT_EQ(spec.first_column, (std::vector<double>{5.0, 5.0}));
}

TEST(CirculantTest, PaperLayoutForTwoByTwo) {
  const auto spec = build_circulant(two_by_two(), CirculantStrategy::kPaper2n);
  EXPECT_EQ(spec.first_column, (std::vector<double>{1.0, 2.0, 1.0, 3.0}));
}

TEST(CirculantTest, PaddedLayoutHasZeroGap) {
  Rng rng(5);
  const auto c = testing::random_coeffs(3, 1, rng);
  const auto spec = build_circulant(c, CirculantStrategy::kPaddedPow2);
  ASSERT_EQ(spec.embed_size, 8u);
  const auto col = spec.column(0);
  EXPECT_EQ(col[0], c.at(0, 0));
  EXPECT_EQ(col[1], c.at(1, 0));
  EXPECT_EQ(col[2], c.at(2, 0));
  EXPECT_EQ(col[3], 0.0);
  EXPECT_EQ(col[4], 0.0);
  EXPECT_EQ(col[5], 0.0);
  EXPECT_EQ(col[6], c.at(-2, 0));
  EXPECT_EQ(col[7], c.at(-1, 0));
}

TEST(CirculantTest, TopLeftBlockRecoversToeplitz) {
  Rng rng(6);
  for (std::size_t n = 1; n <= 20; ++n) {
    const auto c = testing::random_coeffs(n, 2, rng);
    for (auto s : kStrategies) {
      const auto spec = build_circulant(c, s);
      for (std::size_t ch = 0; ch < 2; ++ch) {
        const auto dense = dense_toeplitz(c, ch);
        for (std::size_t i = 0; i < n; ++i) {
          for (std::size_t j = 0; j < n; ++j) {
            ASSERT_EQ(spec.entry(i, j, ch), dense[i * n + j]);
            ASSERT_EQ(dense[i * n + j],
                      c.at(static_cast<std::ptrdiff_t>(i) - static_cast<std::ptrdiff_t>(j), ch));
          }
        }
      }
    }
  }
}

TEST(ToeplitzTest, BackwardTwoByTwo) {
  const Sequence<double> x(2, 1, {1.0, 1.0});
  const Sequence<double> g(2, 1, {1.0, 0.0});
  for (auto s : kStrategies) {
    const auto grads = matvec_backward(two_by_two(), x, g, s);
    EXPECT_NEAR(grads.grad_x.at(0, 0), 1.0, 1e-14);
    EXPECT_NEAR(grads.grad_x.at(1, 0), 3.0, 1e-14);
    const auto zero = matvec_backward(two_by_two(), x, Sequence<double>(2, 1), s);
    for (double v : zero.grad_x.values()) EXPECT_EQ(v, 0.0);
    for (double v : zero.grad_coeffs.values()) EXPECT_EQ(v, 0.0);
  }
}

TEST(ToeplitzTest, BackwardMatchesFiniteDifferences) {
  Rng rng(7);
  const std::size_t n = 16;
  auto coeffs = testing::random_coeffs(n, 2, rng);
  auto x = testing::random_sequence(n, 2, rng);
  const auto g = testing::random_sequence(n, 2, rng);
  const auto loss = [&] {
    const auto y = naive_matvec(coeffs, x);
    double acc = 0.0;
    for (std::size_t i = 0; i < y.values().size(); ++i) acc += y.values()[i] * g.values()[i];
    return acc;
  };
  for (auto s : kStrategies) {
    const auto grads = matvec_backward(coeffs, x, g, s);
    for (std::size_t i = 0; i < x.values().size(); ++i) {
      const double fd = testing::central_difference(x.values()[i], 1e-5, loss);
      EXPECT_LT(std::abs(fd - grads.grad_x.values()[i]) / std::max(std::abs(fd), 1e-6), 1e-6);
    }
    for (std::size_t i = 0; i < coeffs.values().size(); ++i) {
      const double fd = testing::central_difference(coeffs.values()[i], 1e-5, loss);
      EXPECT_LT(std::abs(fd - grads.grad_coeffs.values()[i]) / std::max(std::abs(fd), 1e-6),
                1e-6);
    }
  }
}

TEST(ToeplitzTest, TransposeCoefficientsReflectOffsets) {
  Rng rng(8);
  const auto c = testing::random_coeffs(6, 2, rng);
  const auto t = transpose_coefficients(c);
  for (std::ptrdiff_t k = -5; k <= 5; ++k) {
    for (std::size_t ch = 0; ch < 2; ++ch) EXPECT_EQ(t.at(k, ch), c.at(-k, ch));
  }
}

TEST(ToeplitzTest, Linearity) {
  Rng rng(9);
  const std::size_t n = 37;
  const auto c = testing::random_coeffs(n, 2, rng);
  const auto x = testing::random_sequence(n, 2, rng);
  const auto z = testing::random_sequence(n, 2, rng);
  const double a = 0.7, b = -1.3;
  Sequence<double> combo(n, 2);
  for (std::size_t i = 0; i < combo.values().size(); ++i) {
    combo.values()[i] = a * x.values()[i] + b * z.values()[i];
  }
  for (auto s : kStrategies) {
    const auto yx = fft_matvec(c, x, s), yz = fft_matvec(c, z, s), yc = fft_matvec(c, combo, s);
    std::vector<double> expected(yc.values().size());
    for (std::size_t i = 0; i < expected.size(); ++i) {
      expected[i] = a * yx.values()[i] + b * yz.values()[i];
    }
    EXPECT_LT(testing::normwise_error(yc.values(), expected), 1e-12);
  }
}

TEST(ToeplitzTest, ShapeAndValueErrors) {
  RelPosCoefficients<double> c(4, 2);
  EXPECT_THROW(fft_matvec(c, Sequence<double>(3, 2)), DimensionError);
  EXPECT_THROW(naive_matvec(c, Sequence<double>(4, 1)), DimensionError);
  EXPECT_THROW(RelPosCoefficients<double>(2, 1, {1.0, 2.0}), DimensionError);
  EXPECT_THROW(c.at(4, 0), RangeError);
  Sequence<double> x(4, 2);
  x.at(1, 1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(fft_matvec(c, x), NumericError);
  EXPECT_THROW(parse_circulant_strategy("bogus"), ConfigError);
  EXPECT_EQ(parse_circulant_strategy(to_string(CirculantStrategy::kPaper2n)),
            CirculantStrategy::kPaper2n);
}

TEST(ToeplitzTest, OverflowIsReported) {
  RelPosCoefficients<double> c(2, 1);
  c.at(0, 0) = c.at(1, 0) = 1e308;
  const Sequence<double> x(2, 1, {1e308, 1e308});
  EXPECT_THROW(fft_matvec(c, x), NumericError);
}

}  // namespace
}  // namespace tnn
