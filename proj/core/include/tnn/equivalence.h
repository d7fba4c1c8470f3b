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

#ifndef TNN_EQUIVALENCE_H_
#define TNN_EQUIVALENCE_H_

#include <cstddef>
#include <vector>

#include "tnn/layers.h"
#include "tnn/random.h"
#include "tnn/toeplitz.h"

namespace tnn {

// Taps h_0 .. h_{m-1} of a 1D convolution y = h * x.
struct ConvKernel {
  std::vector<double> taps;
};

// A full convolution of an n-long input is the Toeplitz operator of size
// n + m - 1 with t_k = h_k (0 <= k < m) applied to z = [x; 0_{m-1}].
struct ConvToeplitz {
  RelPosCoefficients<double> coeffs;  // single channel, length n + m - 1
  std::size_t input_length;           // n
  std::size_t padding;                // m - 1 trailing zeros

  // z = [x; 0_{m-1}] as a single-channel sequence.
  Sequence<double> pad(std::span<const double> x) const;
};

ConvToeplitz conv_to_toeplitz(const ConvKernel& kernel, std::size_t n);

// Oracle: y_i = sum_j h_{i-j} x_j, output length n + m - 1.
std::vector<double> direct_convolution(std::span<const double> taps,
                                       std::span<const double> x);

// u_i = A u_{i-1} + B x_i, y_i = C u_i, with u_{-1} = 0.
struct StateSpaceParams {
  Matrix a;  // [h, h]
  Matrix b;  // [h, 1]
  Matrix c;  // [1, h]

  std::size_t state_dim() const { return static_cast<std::size_t>(a.rows()); }
  void validate() const;
};

// k_j = C A^j B for j < n, by repeated matrix-vector products. Throws
// NumericError (with a spectral radius estimate) if the kernel overflows.
std::vector<double> ssm_kernel(const StateSpaceParams& params, std::size_t n);

// Lower-triangular Toeplitz coefficients: t_k = k_k for k >= 0, 0 below.
RelPosCoefficients<double> ssm_to_toeplitz(const StateSpaceParams& params, std::size_t n);

// Oracle: run the recurrence step by step.
std::vector<double> simulate_recurrence(const StateSpaceParams& params,
                                        std::span<const double> x);

// Upper bound on the spectral radius, ||A^k||_F^(1/k) with k = 2^squarings,
// from repeated squaring of A. Tight to within a few percent at the default.
double spectral_radius_estimate(const Matrix& a, std::size_t squarings = 10);

// Random (A, B, C) with A rescaled so its estimated spectral radius is at
// most `radius`.
StateSpaceParams random_stable_system(std::size_t state_dim, Rng& rng, double radius = 0.9);

}  // namespace tnn

#endif  // TNN_EQUIVALENCE_H_
