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

#include "tnn/model.h"

#include <cmath>
#include <string>

#include "tnn/errors.h"

namespace tnn {
namespace {

struct GtuCache {
  Matrix a_u, a_v, u, v, m;
};

struct GluCache {
  Matrix a_1, a_2, s;
};

struct BlockCache {
  NormCache norm1;
  Matrix h1;
  GtuCache gtu;
  NormCache norm2;
  Matrix h2;
  GluCache glu;
};

struct ForwardTrace {
  std::vector<BlockCache> blocks;
  NormCache final_norm;
  Matrix final_h;
  Matrix logits;
};

// Position-wise product x w. A blocked GEMM rounds a row differently
// depending on where it falls in the row blocking, which would make a
// prefix's logits depend on the sequence length; the coefficient-wise
// product evaluates every row identically.
Matrix project(const Matrix& x, const Matrix& w) { return x.lazyProduct(w); }

Matrix gtu_apply(const GtuWeights& w, const ToeplitzOperator& tno, Activation act,
                 const Matrix& x, std::size_t batch, GtuCache* cache) {
  GtuCache local;
  GtuCache& c = cache != nullptr ? *cache : local;
  c.a_u = project(x, w.w_u);
  c.a_v = project(x, w.w_v);
  c.u = activate(c.a_u, act);
  c.v = activate(c.a_v, act);
  c.m = tno_forward(tno, c.v, batch);
  return project(c.u.cwiseProduct(c.m), w.w_o);
}

Matrix glu_apply(const GluWeights& w, Activation act, const Matrix& x, GluCache* cache) {
  GluCache local;
  GluCache& c = cache != nullptr ? *cache : local;
  c.a_1 = project(x, w.w_1);
  c.a_2 = project(x, w.w_2);
  c.s = activate(c.a_1, act);
  return project(c.s.cwiseProduct(c.a_2), w.w_3);
}

Matrix embed(const TnnModel& model, const TokenBatch& tokens) {
  const std::size_t d = model.config().block.feature_dim;
  Matrix x(static_cast<Eigen::Index>(tokens.tokens.size()), static_cast<Eigen::Index>(d));
  for (std::size_t r = 0; r < tokens.tokens.size(); ++r) {
    x.row(static_cast<Eigen::Index>(r)) = model.embedding().row(tokens.tokens[r]);
  }
  return x;
}

ForwardTrace forward_trace(const TnnModel& model, const TokenBatch& tokens) {
  check_tokens(model, tokens);
  const BlockConfig& bc = model.config().block;
  ForwardTrace trace;
  trace.blocks.resize(model.blocks().size());
  Matrix x = embed(model, tokens);
  for (std::size_t l = 0; l < model.blocks().size(); ++l) {
    const Block& block = model.blocks()[l];
    BlockCache& c = trace.blocks[l];
    c.h1 = norm_forward(bc.norm, block.norm1, x, &c.norm1);
    x += gtu_apply(block.gtu, model.mixing_operator(l), bc.activation, c.h1, tokens.batch,
                   &c.gtu);
    c.h2 = norm_forward(bc.norm, block.norm2, x, &c.norm2);
    x += glu_apply(block.glu, bc.activation, c.h2, &c.glu);
  }
  trace.final_h = norm_forward(bc.norm, model.final_norm(), x, &trace.final_norm);
  trace.logits = model.config().tie_embeddings
                     ? project(trace.final_h, model.embedding().transpose())
                     : project(trace.final_h, model.head());
  return trace;
}

// Row-wise log-softmax cross-entropy against next-token targets. Fills
// grad_logits (already divided by the prediction count) when non-null.
double cross_entropy(const Matrix& logits, const TokenBatch& tokens, Matrix* grad_logits) {
  const std::size_t n = tokens.length;
  const double count = static_cast<double>(tokens.batch * (n - 1));
  if (grad_logits != nullptr) *grad_logits = Matrix::Zero(logits.rows(), logits.cols());
  double total = 0.0;
  for (std::size_t b = 0; b < tokens.batch; ++b) {
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const auto r = static_cast<Eigen::Index>(b * n + i);
      const auto row = logits.row(r);
      const double peak = row.maxCoeff();
      const double lse = peak + std::log((row.array() - peak).exp().sum());
      const std::int32_t target = tokens.at(b, i + 1);
      total += lse - row(target);
      if (grad_logits != nullptr) {
        grad_logits->row(r) = (row.array() - lse).exp() / count;
        (*grad_logits)(r, target) -= 1.0 / count;
      }
    }
  }
  return total / count;
}

}  // namespace

// ---------------------------------------------------------------------------
// Configs

void BlockConfig::validate() const {
  if (feature_dim < 1) throw ConfigError("feature_dim must be >= 1");
  if (gtu_dim < feature_dim) throw ConfigError("gtu_dim must be >= feature_dim");
  if (glu_dim < 1) throw ConfigError("glu_dim must be >= 1");
  if (!(tno.decay >= 0.0 && tno.decay <= 1.0)) throw ConfigError("decay must lie in [0, 1]");
  RpeConfig r = rpe;
  r.out_dim = gtu_dim;
  r.validate();
}

void ModelConfig::validate() const {
  if (vocab_size < 1) throw ConfigError("vocab_size must be >= 1");
  if (layers < 1) throw ConfigError("layers must be >= 1");
  block.validate();
}

// ---------------------------------------------------------------------------
// TnnModel

TnnModel::TnnModel(const ModelConfig& config, std::uint64_t seed)
    : config_(config), seed_(seed) {
  config_.validate();
  config_.block.rpe.out_dim = config_.block.gtu_dim;
  const BlockConfig& bc = config_.block;
  const std::size_t d = bc.feature_dim, e = bc.gtu_dim, g = bc.glu_dim;
  const std::size_t v = config_.vocab_size;

  Rng rng(seed);
  embedding_ = init_uniform(v, d, d, rng);
  for (std::size_t l = 0; l < config_.layers; ++l) {
    NormParams norm1 = init_norm(bc.norm, d);
    GtuWeights gtu{init_uniform(d, e, d, rng), init_uniform(d, e, d, rng),
                   init_uniform(e, d, e, rng)};
    ToeplitzOperator tno(RpeNet(bc.rpe, rng), bc.tno);
    NormParams norm2 = init_norm(bc.norm, d);
    GluWeights glu{init_uniform(d, g, d, rng), init_uniform(d, g, d, rng),
                   init_uniform(g, d, g, rng)};
    blocks_.push_back(Block{std::move(norm1), std::move(gtu), std::move(tno),
                            std::move(norm2), std::move(glu)});
  }
  final_norm_ = init_norm(bc.norm, d);
  if (!config_.tie_embeddings) head_ = init_uniform(d, v, d, rng);
}

const ToeplitzOperator& TnnModel::mixing_operator(std::size_t layer) const {
  if (layer >= blocks_.size()) {
    throw RangeError("layer " + std::to_string(layer) + " out of range (model has " +
                     std::to_string(blocks_.size()) + ")");
  }
  return config_.share_rpe ? blocks_[0].tno : blocks_[layer].tno;
}

TnnModel TnnModel::zeros_like() const {
  TnnModel out = *this;
  out.for_each_parameter([](const std::string&, Matrix& m) { m.setZero(); });
  return out;
}

std::size_t TnnModel::parameter_count(const ModelConfig& config) {
  const BlockConfig& bc = config.block;
  const std::size_t d = bc.feature_dim, e = bc.gtu_dim, g = bc.glu_dim;
  const std::size_t v = config.vocab_size;
  const std::size_t norm = bc.norm == NormKind::kLayerNorm ? 2 * d : d;
  RpeConfig rpe = bc.rpe;
  rpe.out_dim = e;
  const std::size_t tno = RpeNet::parameter_count(rpe) + (bc.tno.learnable_decay ? 1 : 0);
  const std::size_t per_block = 2 * norm + 3 * d * e + 3 * d * g;
  std::size_t total = v * d + config.layers * per_block + norm;
  total += config.share_rpe ? tno : config.layers * tno;
  if (!config.tie_embeddings) total += d * v;
  return total;
}

std::size_t TnnModel::parameter_count() const {
  std::size_t total = 0;
  for_each_parameter(
      [&](const std::string&, const Matrix& m) { total += static_cast<std::size_t>(m.size()); });
  return total;
}

std::vector<std::string> TnnModel::parameter_names() const {
  std::vector<std::string> names;
  for_each_parameter([&](const std::string& name, const Matrix&) { names.push_back(name); });
  return names;
}

// ---------------------------------------------------------------------------
// Forward / backward

void check_tokens(const TnnModel& model, const TokenBatch& tokens) {
  if (tokens.batch == 0 || tokens.length == 0 ||
      tokens.tokens.size() != tokens.batch * tokens.length) {
    throw DimensionError("token batch shape is inconsistent");
  }
  for (const std::int32_t t : tokens.tokens) {
    if (t < 0 || static_cast<std::size_t>(t) >= model.config().vocab_size) {
      throw RangeError("token id " + std::to_string(t) + " outside vocabulary of size " +
                       std::to_string(model.config().vocab_size));
    }
  }
}

Matrix gtu_forward(const Block& block, const BlockConfig& config, const Matrix& x,
                   std::size_t batch) {
  if (static_cast<std::size_t>(x.cols()) != config.feature_dim) {
    throw DimensionError("gtu_forward: input width differs from feature_dim");
  }
  return gtu_apply(block.gtu, block.tno, config.activation, x, batch, nullptr);
}

Matrix glu_forward(const Block& block, const BlockConfig& config, const Matrix& x) {
  if (static_cast<std::size_t>(x.cols()) != config.feature_dim) {
    throw DimensionError("glu_forward: input width differs from feature_dim");
  }
  return glu_apply(block.glu, config.activation, x, nullptr);
}

Matrix model_forward(const TnnModel& model, const TokenBatch& tokens) {
  return forward_trace(model, tokens).logits;
}

double evaluate_loss(const TnnModel& model, const TokenBatch& tokens) {
  if (tokens.length < 2) throw DimensionError("next-token loss needs length >= 2");
  const ForwardTrace trace = forward_trace(model, tokens);
  return cross_entropy(trace.logits, tokens, nullptr);
}

LossAndGrads loss_and_grads(const TnnModel& model, const TokenBatch& tokens) {
  if (tokens.length < 2) throw DimensionError("next-token loss needs length >= 2");
  const ModelConfig& cfg = model.config();
  const BlockConfig& bc = cfg.block;
  const ForwardTrace trace = forward_trace(model, tokens);

  LossAndGrads out;
  out.predictions = tokens.batch * (tokens.length - 1);
  Matrix grad_logits;
  out.loss = cross_entropy(trace.logits, tokens, &grad_logits);

  TnnModel grads = model.zeros_like();
  Matrix dx;
  if (cfg.tie_embeddings) {
    grads.embedding() += grad_logits.transpose() * trace.final_h;
    dx = grad_logits * model.embedding();
  } else {
    grads.head() += trace.final_h.transpose() * grad_logits;
    dx = grad_logits * model.head().transpose();
  }
  dx = norm_backward(bc.norm, model.final_norm(), trace.final_norm, dx, grads.final_norm());

  for (std::size_t l = model.blocks().size(); l-- > 0;) {
    const Block& block = model.blocks()[l];
    Block& gb = grads.blocks()[l];
    const BlockCache& c = trace.blocks[l];

    // GLU branch: x += glu(norm2(x))
    {
      const GluCache& g = c.glu;
      const Matrix p = g.s.cwiseProduct(g.a_2);
      gb.glu.w_3 += p.transpose() * dx;
      const Matrix dp = dx * block.glu.w_3.transpose();
      const Matrix da_2 = dp.cwiseProduct(g.s);
      const Matrix da_1 = activation_backward(g.a_1, dp.cwiseProduct(g.a_2), bc.activation);
      gb.glu.w_1 += c.h2.transpose() * da_1;
      gb.glu.w_2 += c.h2.transpose() * da_2;
      const Matrix dh = da_1 * block.glu.w_1.transpose() + da_2 * block.glu.w_2.transpose();
      dx += norm_backward(bc.norm, block.norm2, c.norm2, dh, gb.norm2);
    }
    // GTU branch: x += gtu(norm1(x))
    {
      const GtuCache& g = c.gtu;
      const Matrix p = g.u.cwiseProduct(g.m);
      gb.gtu.w_o += p.transpose() * dx;
      const Matrix dp = dx * block.gtu.w_o.transpose();
      const Matrix du = dp.cwiseProduct(g.m);
      const Matrix dm = dp.cwiseProduct(g.u);
      const ToeplitzOperator& op = model.mixing_operator(l);
      TnoGradients tg = tno_backward(op, g.v, tokens.batch, dm);
      Block& owner = cfg.share_rpe ? grads.blocks()[0] : gb;
      auto& rpe_layers = owner.tno.mutable_rpe().layers();
      for (std::size_t k = 0; k < rpe_layers.size(); ++k) {
        rpe_layers[k].weight += tg.rpe[k].weight;
        rpe_layers[k].bias += tg.rpe[k].bias;
      }
      if (op.learnable_decay()) {
        owner.tno.for_each_parameter([&](const std::string& name, Matrix& m) {
          if (name == "decay") m(0, 0) += tg.decay;
        });
      }
      const Matrix da_u = activation_backward(g.a_u, du, bc.activation);
      const Matrix da_v = activation_backward(g.a_v, tg.grad_x, bc.activation);
      gb.gtu.w_u += c.h1.transpose() * da_u;
      gb.gtu.w_v += c.h1.transpose() * da_v;
      const Matrix dh = da_u * block.gtu.w_u.transpose() + da_v * block.gtu.w_v.transpose();
      dx += norm_backward(bc.norm, block.norm1, c.norm1, dh, gb.norm1);
    }
  }

  for (std::size_t r = 0; r < tokens.tokens.size(); ++r) {
    grads.embedding().row(tokens.tokens[r]) += dx.row(static_cast<Eigen::Index>(r));
  }

  grads.for_each_parameter([&](const std::string&, Matrix& m) { out.grads.push_back(m); });
  return out;
}

}  // namespace tnn
