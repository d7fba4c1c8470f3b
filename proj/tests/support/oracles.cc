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


#include "oracles.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "tnn/layers.h"
#include "tnn/rpe.h"

namespace tnn::testing {
namespace {

using Rows = std::vector<std::vector<double>>;

double act(double z, Activation a) {
  switch (a) {
    case Activation::kIdentity:
      return z;
    case Activation::kRelu:
      return z > 0.0 ? z : 0.0;
    case Activation::kSilu:
      return z / (1.0 + std::exp(-z));
  }
  return z;
}

Rows matmul(const Rows& x, const Matrix& w) {
  Rows out(x.size(), std::vector<double>(static_cast<std::size_t>(w.cols()), 0.0));
  for (std::size_t r = 0; r < x.size(); ++r) {
    for (Eigen::Index c = 0; c < w.cols(); ++c) {
      long double acc = 0.0L;
      for (Eigen::Index k = 0; k < w.rows(); ++k) {
        acc += static_cast<long double>(x[r][static_cast<std::size_t>(k)]) * w(k, c);
      }
      out[r][static_cast<std::size_t>(c)] = static_cast<double>(acc);
    }
  }
  return out;
}

Rows normalize(const Rows& x, NormKind kind, const NormParams& p) {
  Rows out = x;
  for (auto& row : out) {
    const double dim = static_cast<double>(row.size());
    double mean = 0.0;
    if (kind == NormKind::kLayerNorm) {
      for (double v : row) mean += v;
      mean /= dim;
    }
    double sq = 0.0;
    for (double v : row) sq += (v - mean) * (v - mean);
    const double scale = 1.0 / std::sqrt(sq / dim + 1e-5);
    for (std::size_t c = 0; c < row.size(); ++c) {
      row[c] = (row[c] - mean) * scale * p.gain(0, static_cast<Eigen::Index>(c));
      if (kind == NormKind::kLayerNorm) row[c] += p.bias(0, static_cast<Eigen::Index>(c));
    }
  }
  return out;
}

std::vector<double> rpe_input(std::ptrdiff_t k, std::size_t n, RpeInputMode mode) {
  const double kd = static_cast<double>(k);
  switch (mode) {
    case RpeInputMode::kRawInteger:
      return {kd};
    case RpeInputMode::kNormalized:
      return {kd / static_cast<double>(n)};
    case RpeInputMode::kSinCos: {
      std::vector<double> out;
      for (int i = 0; i < 4; ++i) {
        const double freq = std::exp(-std::log(10000.0) * i / 4.0);
        out.push_back(std::sin(freq * kd));
        out.push_back(std::cos(freq * kd));
      }
      return out;
    }
  }
  return {};
}

// Offset -> per-channel coefficient after decay and masking.
std::map<std::ptrdiff_t, std::vector<double>> operator_table(const ToeplitzOperator& op,
                                                             std::size_t n) {
  const RpeNet& net = op.rpe();
  std::map<std::ptrdiff_t, std::vector<double>> table;
  const auto last = static_cast<std::ptrdiff_t>(n) - 1;
  for (std::ptrdiff_t k = -last; k <= last; ++k) {
    Rows h{rpe_input(k, n, net.config().input_mode)};
    for (std::size_t i = 0; i < net.layers().size(); ++i) {
      h = matmul(h, net.layers()[i].weight);
      for (std::size_t c = 0; c < h[0].size(); ++c) {
        h[0][c] += net.layers()[i].bias(0, static_cast<Eigen::Index>(c));
        if (i + 1 < net.layers().size()) h[0][c] = act(h[0][c], net.config().activation);
      }
    }
    const double scale = (op.causal() && k < 0)
                             ? 0.0
                             : std::pow(op.decay(), static_cast<double>(std::abs(k)));
    for (double& v : h[0]) v *= scale;
    table[k] = h[0];
  }
  return table;
}

}  // namespace

std::vector<std::complex<double>> dft_by_definition(
    std::span<const std::complex<double>> x) {
  const std::size_t n = x.size();
  std::vector<std::complex<double>> out(n);
  for (std::size_t s = 0; s < n; ++s) {
    std::complex<long double> acc = 0.0L;
    for (std::size_t t = 0; t < n; ++t) {
      const long double angle =
          2.0L * std::numbers::pi_v<long double> * static_cast<long double>((s * t) % n) /
          static_cast<long double>(n);
      acc += std::complex<long double>(x[t].real(), x[t].imag()) *
             std::complex<long double>(std::cos(angle), std::sin(angle));
    }
    out[s] = {static_cast<double>(acc.real()), static_cast<double>(acc.imag())};
  }
  return out;
}

std::vector<double> toeplitz_by_definition(const std::function<double(std::ptrdiff_t)>& t,
                                           std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    long double acc = 0.0L;
    for (std::size_t j = 0; j < n; ++j) {
      acc += static_cast<long double>(t(static_cast<std::ptrdiff_t>(i) -
                                        static_cast<std::ptrdiff_t>(j))) *
             x[j];
    }
    y[i] = static_cast<double>(acc);
  }
  return y;
}

std::vector<std::vector<double>> toeplitz_matrix(
    const std::function<double(std::ptrdiff_t)>& t, std::size_t n) {
  std::vector<std::vector<double>> m(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      m[i][j] = t(static_cast<std::ptrdiff_t>(i) - static_cast<std::ptrdiff_t>(j));
    }
  }
  return m;
}

double central_difference(double& x, double h, const std::function<double()>& f) {
  const double saved = x;
  x = saved + h;
  const double plus = f();
  x = saved - h;
  const double minus = f();
  x = saved;
  return (plus - minus) / (2.0 * h);
}

double normwise_error(std::span<const double> a, std::span<const double> b, double floor) {
  double scale = floor;
  for (double v : b) scale = std::max(scale, std::abs(v));
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst / scale;
}

RelPosCoefficients<double> random_coeffs(std::size_t n, std::size_t d, Rng& rng) {
  RelPosCoefficients<double> c(n, d);
  for (double& v : c.values()) v = rng.uniform(-1.0, 1.0);
  return c;
}

Sequence<double> random_sequence(std::size_t n, std::size_t d, Rng& rng) {
  Sequence<double> s(n, d);
  for (double& v : s.values()) v = rng.uniform(-1.0, 1.0);
  return s;
}

std::vector<std::vector<double>> staged_logits(const TnnModel& model,
                                               const TokenBatch& tokens) {
  const ModelConfig& cfg = model.config();
  const BlockConfig& bc = cfg.block;
  const std::size_t n = tokens.length;
  const std::size_t d = bc.feature_dim;

  Rows x;
  for (std::int32_t t : tokens.tokens) {
    std::vector<double> row(d);
    for (std::size_t c = 0; c < d; ++c) row[c] = model.embedding()(t, static_cast<Eigen::Index>(c));
    x.push_back(row);
  }

  for (std::size_t l = 0; l < cfg.layers; ++l) {
    const Block& block = model.blocks()[l];
    const ToeplitzOperator& op = cfg.share_rpe ? model.blocks()[0].tno : block.tno;
    const auto table = operator_table(op, n);

    const Rows h1 = normalize(x, bc.norm, block.norm1);
    Rows u = matmul(h1, block.gtu.w_u);
    Rows v = matmul(h1, block.gtu.w_v);
    for (auto& row : u) for (double& e : row) e = act(e, bc.activation);
    for (auto& row : v) for (double& e : row) e = act(e, bc.activation);
    Rows mixed = u;
    for (std::size_t b = 0; b < tokens.batch; ++b) {
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t c = 0; c < bc.gtu_dim; ++c) {
          long double acc = 0.0L;
          for (std::size_t j = 0; j < n; ++j) {
            const auto k = static_cast<std::ptrdiff_t>(i) - static_cast<std::ptrdiff_t>(j);
            acc += static_cast<long double>(table.at(k)[c]) * v[b * n + j][c];
          }
          mixed[b * n + i][c] = u[b * n + i][c] * static_cast<double>(acc);
        }
      }
    }
    const Rows gtu = matmul(mixed, block.gtu.w_o);
    for (std::size_t r = 0; r < x.size(); ++r) {
      for (std::size_t c = 0; c < d; ++c) x[r][c] += gtu[r][c];
    }

    const Rows h2 = normalize(x, bc.norm, block.norm2);
    Rows s = matmul(h2, block.glu.w_1);
    const Rows lin = matmul(h2, block.glu.w_2);
    for (std::size_t r = 0; r < s.size(); ++r) {
      for (std::size_t c = 0; c < s[r].size(); ++c) s[r][c] = act(s[r][c], bc.activation) * lin[r][c];
    }
    const Rows glu = matmul(s, block.glu.w_3);
    for (std::size_t r = 0; r < x.size(); ++r) {
      for (std::size_t c = 0; c < d; ++c) x[r][c] += glu[r][c];
    }
  }

  const Rows h = normalize(x, bc.norm, model.final_norm());
  if (cfg.tie_embeddings) return matmul(h, model.embedding().transpose());
  return matmul(h, model.head());
}

double unigram_entropy_by_counting(std::span<const std::int32_t> tokens) {
  std::map<std::int32_t, std::size_t> counts;
  for (std::int32_t t : tokens) ++counts[t];
  const double total = static_cast<double>(tokens.size());
  double entropy = 0.0;
  for (const auto& [token, count] : counts) {
    const double p = static_cast<double>(count) / total;
    entropy -= p * std::log(p);
  }
  return entropy;
}

}  // namespace tnn::testing
