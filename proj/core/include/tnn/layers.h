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

#ifndef TNN_LAYERS_H_
#define TNN_LAYERS_H_

#include <cstddef>
#include <string_view>

#include <Eigen/Core>

#include "tnn/random.h"

namespace tnn {

// Dense row-major double matrix; every trainable tensor is one of these.
// Vectors (biases, norm gains) are stored as 1 x k matrices.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class Activation { kIdentity, kRelu, kSilu };

std::string_view to_string(Activation activation);
Activation parse_activation(std::string_view name);

Matrix activate(const Matrix& pre, Activation activation);
// d(act(pre))/d(pre) * grad_out, elementwise.
Matrix activation_backward(const Matrix& pre, const Matrix& grad_out,
                           Activation activation);

// Zero-mean uniform init in [-1/sqrt(fan_in), 1/sqrt(fan_in)].
Matrix init_uniform(std::size_t rows, std::size_t cols, std::size_t fan_in, Rng& rng);

enum class NormKind { kLayerNorm, kRmsNorm };

std::string_view to_string(NormKind kind);
NormKind parse_norm(std::string_view name);

// Per-row normalization with a learned gain (and, for layer norm, a bias).
struct NormParams {
  Matrix gain;  // 1 x d
  Matrix bias;  // 1 x d, layer norm only; 0 x 0 for rms norm
};

NormParams init_norm(NormKind kind, std::size_t dim);

struct NormCache {
  Matrix normalized;  // (x - mean) / sigma, or x / rms
  Eigen::VectorXd inv_sigma;
};

inline constexpr double kNormEpsilon = 1e-5;

Matrix norm_forward(NormKind kind, const NormParams& params, const Matrix& x,
                    NormCache* cache);
// Returns dL/dx and accumulates parameter gradients into `grads`.
Matrix norm_backward(NormKind kind, const NormParams& params, const NormCache& cache,
                     const Matrix& grad_y, NormParams& grads);

}  // namespace tnn

#endif  // TNN_LAYERS_H_
