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

#ifndef TNN_RPE_H_
#define TNN_RPE_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "tnn/layers.h"
#include "tnn/random.h"
#include "tnn/toeplitz.h"

namespace tnn {

// What the encoder sees for relative offset k at sequence length n.
//   kRawInteger: [k]
//   kNormalized: [k / n]; the same offset maps to different inputs at
//                different lengths, so this mode does not extrapolate.
//   kSinCos:     [sin(w_0 k), cos(w_0 k), ..., sin(w_3 k), cos(w_3 k)] with
//                w_i = 10000^(-2i/8).
enum class RpeInputMode { kRawInteger, kNormalized, kSinCos };

inline constexpr std::size_t kSinCosPairs = 4;

std::string_view to_string(RpeInputMode mode);
RpeInputMode parse_rpe_input_mode(std::string_view name);

std::size_t input_width(RpeInputMode mode);

// Throws RangeError when |offset| >= n.
std::vector<double> encode_input(std::ptrdiff_t offset, RpeInputMode mode,
                                 std::size_t n);

struct RpeConfig {
  std::size_t layers = 3;  // counts the output projection
  std::size_t hidden_dim = 32;
  std::size_t out_dim = 1;
  Activation activation = Activation::kRelu;
  RpeInputMode input_mode = RpeInputMode::kRawInteger;

  void validate() const;
};

// y = x * weight + bias; weight is [in, out].
struct Linear {
  Matrix weight;
  Matrix bias;  // 1 x out
};

using RpeGradients = std::vector<Linear>;

// Relative position encoder: a `layers`-deep MLP from the encoded offset to
// the d Toeplitz coefficients of that offset. Hidden layers use the
// configured activation, the output layer is linear so coefficients can take
// either sign.
class RpeNet {
 public:
  RpeNet(const RpeConfig& config, Rng& rng);

  // All weights and biases zero.
  static RpeNet zeros(const RpeConfig& config);

  const RpeConfig& config() const { return config_; }
  const std::vector<Linear>& layers() const { return layers_; }
  std::vector<Linear>& layers() { return layers_; }

  // Depends on the config only, never on a sequence length.
  std::size_t parameter_count() const;
  static std::size_t parameter_count(const RpeConfig& config);

  RpeGradients zero_gradients() const;

  // f(name, matrix) over every tensor, names like "layer0.weight".
  template <typename F>
  void for_each_parameter(F&& f) {
    for (std::size_t i = 0; i < layers_.size(); ++i) {
      f("layer" + std::to_string(i) + ".weight", layers_[i].weight);
      f("layer" + std::to_string(i) + ".bias", layers_[i].bias);
    }
  }
  template <typename F>
  void for_each_parameter(F&& f) const {
    for (std::size_t i = 0; i < layers_.size(); ++i) {
      f("layer" + std::to_string(i) + ".weight", layers_[i].weight);
      f("layer" + std::to_string(i) + ".bias", layers_[i].bias);
    }
  }

 private:
  explicit RpeNet(const RpeConfig& config);

  RpeConfig config_;
  std::vector<Linear> layers_;
};

// Encoder inputs for offsets -(n-1) .. n-1, one row per offset.
Matrix rpe_inputs(RpeInputMode mode, std::size_t n);

// Coefficient table [2n - 1, out_dim] for sequence length n.
RelPosCoefficients<double> rpe_forward(const RpeNet& net, std::size_t n);

// Gradients of sum(grad_coeffs .* rpe_forward(net, n)) w.r.t. every weight.
RpeGradients rpe_backward(const RpeNet& net, std::size_t n,
                          const RelPosCoefficients<double>& grad_coeffs);

}  // namespace tnn

#endif  // TNN_RPE_H_
