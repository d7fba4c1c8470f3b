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

#include "tnn/layers.h"

#include <cmath>
#include <string>

#include "tnn/errors.h"

namespace tnn {

std::string_view to_string(Activation activation) {
  switch (activation) {
    case Activation::kIdentity:
      return "identity";
    case Activation::kRelu:
      return "relu";
    case Activation::kSilu:
      return "silu";
  }
  return "unknown";
}

Activation parse_activation(std::string_view name) {
  if (name == "identity") return Activation::kIdentity;
  if (name == "relu") return Activation::kRelu;
  if (name == "silu") return Activation::kSilu;
  throw ConfigError("unknown activation '" + std::string(name) + "'");
}

Matrix activate(const Matrix& pre, Activation activation) {
  switch (activation) {
    case Activation::kIdentity:
      return pre;
    case Activation::kRelu:
      return pre.cwiseMax(0.0);
    case Activation::kSilu:
      return pre.unaryExpr([](double v) { return v / (1.0 + std::exp(-v)); });
  }
  return pre;
}

Matrix activation_backward(const Matrix& pre, const Matrix& grad_out,
                           Activation activation) {
  switch (activation) {
    case Activation::kIdentity:
      return grad_out;
    case Activation::kRelu:
      return grad_out.cwiseProduct(
          pre.unaryExpr([](double v) { return v > 0.0 ? 1.0 : 0.0; }));
    case Activation::kSilu:
      return grad_out.cwiseProduct(pre.unaryExpr([](double v) {
        const double s = 1.0 / (1.0 + std::exp(-v));
        return s * (1.0 + v * (1.0 - s));
      }));
  }
  return grad_out;
}

Matrix init_uniform(std::size_t rows, std::size_t cols, std::size_t fan_in, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(-bound, bound);
  return m;
}

std::string_view to_string(NormKind kind) {
  return kind == NormKind::kLayerNorm ? "layernorm" : "rmsnorm";
}

NormKind parse_norm(std::string_view name) {
  if (name == "layernorm") return NormKind::kLayerNorm;
  if (name == "rmsnorm") return NormKind::kRmsNorm;
  throw ConfigError("unknown norm '" + std::string(name) + "'");
}

NormParams init_norm(NormKind kind, std::size_t dim) {
  NormParams p;
  p.gain = Matrix::Ones(1, dim);
  if (kind == NormKind::kLayerNorm) p.bias = Matrix::Zero(1, dim);
  return p;
}

Matrix norm_forward(NormKind kind, const NormParams& params, const Matrix& x,
                    NormCache* cache) {
  const Eigen::Index rows = x.rows();
  const double dim = static_cast<double>(x.cols());
  Matrix normalized(rows, x.cols());
  Eigen::VectorXd inv_sigma(rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (kind == NormKind::kLayerNorm) {
      const double mean = x.row(r).mean();
      const auto centered = x.row(r).array() - mean;
      const double var = centered.square().sum() / dim;
      inv_sigma(r) = 1.0 / std::sqrt(var + kNormEpsilon);
      normalized.row(r) = centered * inv_sigma(r);
    } else {
      const double ms = x.row(r).squaredNorm() / dim;
      inv_sigma(r) = 1.0 / std::sqrt(ms + kNormEpsilon);
      normalized.row(r) = x.row(r) * inv_sigma(r);
    }
  }
  Matrix y = normalized.array().rowwise() * params.gain.row(0).array();
  if (kind == NormKind::kLayerNorm) y.rowwise() += params.bias.row(0);
  if (cache != nullptr) {
    cache->normalized = std::move(normalized);
    cache->inv_sigma = std::move(inv_sigma);
  }
  return y;
}

Matrix norm_backward(NormKind kind, const NormParams& params, const NormCache& cache,
                     const Matrix& grad_y, NormParams& grads) {
  const Eigen::Index rows = grad_y.rows();
  const double dim = static_cast<double>(grad_y.cols());
  grads.gain += cache.normalized.cwiseProduct(grad_y).colwise().sum();
  if (kind == NormKind::kLayerNorm) grads.bias += grad_y.colwise().sum();

  const Matrix g = grad_y.array().rowwise() * params.gain.row(0).array();
  Matrix grad_x(rows, grad_y.cols());
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto xhat = cache.normalized.row(r).array();
    const auto gr = g.row(r).array();
    const double dot = (gr * xhat).sum() / dim;
    if (kind == NormKind::kLayerNorm) {
      const double mean_g = gr.sum() / dim;
      grad_x.row(r) = (gr - mean_g - xhat * dot) * cache.inv_sigma(r);
    } else {
      grad_x.row(r) = (gr - xhat * dot) * cache.inv_sigma(r);
    }
  }
  return grad_x;
}

}  // namespace tnn
