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

#ifndef TNN_MODEL_H_
#define TNN_MODEL_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "tnn/layers.h"
#include "tnn/rpe.h"
#include "tnn/tno.h"

namespace tnn {

// One GTU + GLU block. Defaults are the desk-scale configuration.
struct BlockConfig {
  std::size_t feature_dim = 64;  // d
  std::size_t gtu_dim = 192;     // e, the width the TNO mixes at
  std::size_t glu_dim = 64;      // g
  Activation activation = Activation::kSilu;
  NormKind norm = NormKind::kLayerNorm;
  TnoOptions tno{.decay = 0.99, .causal = true};
  // out_dim is forced to gtu_dim.
  RpeConfig rpe{.layers = 3, .hidden_dim = 32, .out_dim = 192};

  void validate() const;
};

struct ModelConfig {
  std::size_t vocab_size = 256;
  std::size_t layers = 2;
  BlockConfig block;
  bool share_rpe = false;  // one RPE (and decay) for every block
  bool tie_embeddings = false;

  void validate() const;
};

struct GtuWeights {
  Matrix w_u;  // [d, e]
  Matrix w_v;  // [d, e]
  Matrix w_o;  // [e, d]
};

struct GluWeights {
  Matrix w_1;  // [d, g], activated branch
  Matrix w_2;  // [d, g], linear branch
  Matrix w_3;  // [g, d]
};

struct Block {
  NormParams norm1;
  GtuWeights gtu;
  ToeplitzOperator tno;
  NormParams norm2;
  GluWeights glu;
};

// Token ids laid out [batch, length], row-major.
struct TokenBatch {
  std::size_t batch = 0;
  std::size_t length = 0;
  std::vector<std::int32_t> tokens;

  std::int32_t at(std::size_t b, std::size_t i) const { return tokens[b * length + i]; }
};

class TnnModel {
 public:
  TnnModel(const ModelConfig& config, std::uint64_t seed);

  const ModelConfig& config() const { return config_; }
  std::uint64_t seed() const { return seed_; }

  Matrix& embedding() { return embedding_; }
  const Matrix& embedding() const { return embedding_; }
  std::vector<Block>& blocks() { return blocks_; }
  const std::vector<Block>& blocks() const { return blocks_; }
  NormParams& final_norm() { return final_norm_; }
  const NormParams& final_norm() const { return final_norm_; }
  // [d, vocab]; empty when embeddings are tied.
  Matrix& head() { return head_; }
  const Matrix& head() const { return head_; }

  // The same structure with every tensor zeroed; used as a gradient buffer.
  TnnModel zeros_like() const;

  // The operator block `layer` mixes tokens with; block 0's when share_rpe
  // is set (the other blocks' operators are then unused).
  const ToeplitzOperator& mixing_operator(std::size_t layer) const;

  std::size_t parameter_count() const;
  // Closed form; depends on the config only, never on a sequence length.
  static std::size_t parameter_count(const ModelConfig& config);

  // f(name, matrix) over every trainable tensor in canonical order. With
  // share_rpe only block 0's RPE is visited.
  template <typename F>
  void for_each_parameter(F&& f) {
    visit(*this, f);
  }
  template <typename F>
  void for_each_parameter(F&& f) const {
    visit(*this, f);
  }

  std::vector<std::string> parameter_names() const;

 private:
  template <typename Self, typename F>
  static void visit(Self& self, F& f);

  ModelConfig config_;
  std::uint64_t seed_;
  Matrix embedding_;  // [vocab, d]
  std::vector<Block> blocks_;
  NormParams final_norm_;
  Matrix head_;
};

// Gradients aligned with TnnModel::for_each_parameter order.
using GradientSet = std::vector<Matrix>;

// U = act(X W_u), V = act(X W_v), M = TNO(V), out = (U .* M) W_o.
// X is [batch * n, d].
Matrix gtu_forward(const Block& block, const BlockConfig& config, const Matrix& x,
                   std::size_t batch);
// out = (act(X W_1) .* (X W_2)) W_3, position-wise.
Matrix glu_forward(const Block& block, const BlockConfig& config, const Matrix& x);

// Logits [batch * n, vocab] for token ids [batch, n]. Pre-norm residual
// blocks: X += GTU(norm1(X)); X += GLU(norm2(X)); then final norm and head.
Matrix model_forward(const TnnModel& model, const TokenBatch& tokens);

struct LossAndGrads {
  double loss = 0.0;
  std::size_t predictions = 0;
  GradientSet grads;
};

// Mean next-token cross-entropy (nats) over positions 0..n-2 of every item.
double evaluate_loss(const TnnModel& model, const TokenBatch& tokens);
LossAndGrads loss_and_grads(const TnnModel& model, const TokenBatch& tokens);

// Validates token range and shape; throws RangeError / DimensionError.
void check_tokens(const TnnModel& model, const TokenBatch& tokens);

// ---------------------------------------------------------------------------

template <typename Self, typename F>
void TnnModel::visit(Self& self, F& f) {
  f(std::string("embedding"), self.embedding_);
  for (std::size_t i = 0; i < self.blocks_.size(); ++i) {
    auto& b = self.blocks_[i];
    const std::string p = "blocks." + std::to_string(i) + ".";
    f(p + "norm1.gain", b.norm1.gain);
    if (b.norm1.bias.size() > 0) f(p + "norm1.bias", b.norm1.bias);
    f(p + "gtu.w_u", b.gtu.w_u);
    f(p + "gtu.w_v", b.gtu.w_v);
    f(p + "gtu.w_o", b.gtu.w_o);
    if (!self.config_.share_rpe || i == 0) {
      b.tno.for_each_parameter([&](const std::string& name, auto& m) { f(p + "tno." + name, m); });
    }
    f(p + "norm2.gain", b.norm2.gain);
    if (b.norm2.bias.size() > 0) f(p + "norm2.bias", b.norm2.bias);
    f(p + "glu.w_1", b.glu.w_1);
    f(p + "glu.w_2", b.glu.w_2);
    f(p + "glu.w_3", b.glu.w_3);
  }
  f(std::string("final_norm.gain"), self.final_norm_.gain);
  if (self.final_norm_.bias.size() > 0) f(std::string("final_norm.bias"), self.final_norm_.bias);
  if (!self.config_.tie_embeddings) f(std::string("head"), self.head_);
}

}  // namespace tnn

#endif  // TNN_MODEL_H_
