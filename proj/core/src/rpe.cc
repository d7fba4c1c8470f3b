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

#include "tnn/rpe.h"

#include <cmath>
#include <cstdlib>

#include "tnn/errors.h"

namespace tnn {
namespace {

std::vector<std::size_t> layer_widths(const RpeConfig& config) {
  std::vector<std::size_t> widths{input_width(config.input_mode)};
  for (std::size_t i = 0; i + 1 < config.layers; ++i) widths.push_back(config.hidden_dim);
  widths.push_back(config.out_dim);
  return widths;
}

// Pre-activations of every layer for a batch of encoded offsets.
std::vector<Matrix> forward_trace(const RpeNet& net, const Matrix& inputs) {
  const auto& layers = net.layers();
  std::vector<Matrix> pre;
  pre.reserve(layers.size());
  Matrix h = inputs;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    // Coefficient-wise so that an offset's output does not depend on how
    // many offsets are evaluated together.
    Matrix z = h.lazyProduct(layers[i].weight);
    z.rowwise() += layers[i].bias.row(0);
    pre.push_back(z);
    if (i + 1 < layers.size()) h = activate(z, net.config().activation);
  }
  return pre;
}

}  // namespace

std::string_view to_string(RpeInputMode mode) {
  switch (mode) {
    case RpeInputMode::kRawInteger:
      return "raw";
    case RpeInputMode::kNormalized:
      return "normalized";
    case RpeInputMode::kSinCos:
      return "sincos";
  }
  return "unknown";
}

RpeInputMode parse_rpe_input_mode(std::string_view name) {
  if (name == "raw" || name == "raw_integer") return RpeInputMode::kRawInteger;
  if (name == "normalized") return RpeInputMode::kNormalized;
  if (name == "sincos") return RpeInputMode::kSinCos;
  throw ConfigError("unknown rpe input mode '" + std::string(name) + "'");
}

std::size_t input_width(RpeInputMode mode) {
  return mode == RpeInputMode::kSinCos ? 2 * kSinCosPairs : 1;
}

std::vector<double> encode_input(std::ptrdiff_t offset, RpeInputMode mode,
                                 std::size_t n) {
  if (n == 0 || static_cast<std::size_t>(std::llabs(offset)) >= n) {
    throw RangeError("encode_input: offset " + std::to_string(offset) +
                     " outside (-" + std::to_string(n) + ", " + std::to_string(n) + ")");
  }
  const double k = static_cast<double>(offset);
  switch (mode) {
    case RpeInputMode::kRawInteger:
      return {k};
    case RpeInputMode::kNormalized:
      return {k / static_cast<double>(n)};
    case RpeInputMode::kSinCos: {
      std::vector<double> out;
      out.reserve(2 * kSinCosPairs);
      for (std::size_t i = 0; i < kSinCosPairs; ++i) {
        const double freq = std::pow(10000.0, -2.0 * static_cast<double>(i) /
                                                  (2.0 * kSinCosPairs));
        out.push_back(std::sin(freq * k));
        out.push_back(std::cos(freq * k));
      }
      return out;
    }
  }
  return {};
}

void RpeConfig::validate() const {
  if (layers < 1) throw ConfigError("rpe: layers must be >= 1");
  if (hidden_dim < 1) throw ConfigError("rpe: hidden_dim must be >= 1");
  if (out_dim < 1) throw ConfigError("rpe: out_dim must be >= 1");
}

RpeNet::RpeNet(const RpeConfig& config) : config_(config) { config_.validate(); }

RpeNet::RpeNet(const RpeConfig& config, Rng& rng) : RpeNet(config) {
  const auto widths = layer_widths(config_);
  for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
    Linear layer;
    layer.weight = init_uniform(widths[i], widths[i + 1], widths[i], rng);
    layer.bias = init_uniform(1, widths[i + 1], widths[i], rng);
    layers_.push_back(std::move(layer));
  }
}

RpeNet RpeNet::zeros(const RpeConfig& config) {
  RpeNet net(config);
  const auto widths = layer_widths(net.config_);
  for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
    net.layers_.push_back({Matrix::Zero(widths[i], widths[i + 1]),
                           Matrix::Zero(1, widths[i + 1])});
  }
  return net;
}

std::size_t RpeNet::parameter_count(const RpeConfig& config) {
  const auto widths = layer_widths(config);
  std::size_t total = 0;
  for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
    total += widths[i] * widths[i + 1] + widths[i + 1];
  }
  return total;
}

std::size_t RpeNet::parameter_count() const { return parameter_count(config_); }

RpeGradients RpeNet::zero_gradients() const {
  RpeGradients grads;
  for (const auto& layer : layers_) {
    grads.push_back({Matrix::Zero(layer.weight.rows(), layer.weight.cols()),
                     Matrix::Zero(1, layer.bias.cols())});
  }
  return grads;
}

Matrix rpe_inputs(RpeInputMode mode, std::size_t n) {
  const auto last = static_cast<std::ptrdiff_t>(n) - 1;
  Matrix inputs(2 * n - 1, input_width(mode));
  for (std::ptrdiff_t k = -last; k <= last; ++k) {
    const auto row = encode_input(k, mode, n);
    for (std::size_t c = 0; c < row.size(); ++c) inputs(k + last, c) = row[c];
  }
  return inputs;
}

RelPosCoefficients<double> rpe_forward(const RpeNet& net, std::size_t n) {
  if (n == 0) throw DimensionError("rpe_forward: n must be positive");
  const auto pre = forward_trace(net, rpe_inputs(net.config().input_mode, n));
  const Matrix& out = pre.back();
  return RelPosCoefficients<double>(n, net.config().out_dim,
                                    std::vector<double>(out.data(), out.data() + out.size()));
}

RpeGradients rpe_backward(const RpeNet& net, std::size_t n,
                          const RelPosCoefficients<double>& grad_coeffs) {
  if (grad_coeffs.length() != n || grad_coeffs.channels() != net.config().out_dim) {
    throw DimensionError("rpe_backward: gradient table shape does not match network");
  }
  const Matrix inputs = rpe_inputs(net.config().input_mode, n);
  const auto pre = forward_trace(net, inputs);
  const auto& layers = net.layers();

  RpeGradients grads = net.zero_gradients();
  Matrix delta = Eigen::Map<const Matrix>(grad_coeffs.values().data(),
                                          static_cast<Eigen::Index>(grad_coeffs.rows()),
                                          static_cast<Eigen::Index>(grad_coeffs.channels()));
  for (std::size_t i = layers.size(); i-- > 0;) {
    const Matrix input = i == 0 ? inputs : activate(pre[i - 1], net.config().activation);
    grads[i].weight = input.transpose() * delta;
    grads[i].bias = delta.colwise().sum();
    if (i > 0) {
      delta = activation_backward(pre[i - 1], delta * layers[i].weight.transpose(),
                                  net.config().activation);
    }
  }
  return grads;
}

}  // namespace tnn
