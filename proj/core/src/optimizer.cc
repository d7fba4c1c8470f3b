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

#include "tnn/optimizer.h"

#include <cmath>
#include <sstream>
#include <string>

namespace tnn {

void AdamConfig::validate() const {
  if (!(peak_lr >= 0.0)) throw ConfigError("lr must be >= 0");
  if (!(beta1 >= 0.0 && beta1 < 1.0)) throw ConfigError("beta1 must lie in [0, 1)");
  if (!(beta2 >= 0.0 && beta2 < 1.0)) throw ConfigError("beta2 must lie in [0, 1)");
  if (!(epsilon > 0.0)) throw ConfigError("adam epsilon must be > 0");
  if (!(weight_decay >= 0.0)) throw ConfigError("weight_decay must be >= 0");
  if (!(grad_clip >= 0.0)) throw ConfigError("grad_clip must be >= 0");
}

double scheduled_lr(const AdamConfig& config, std::size_t step) {
  if (config.warmup_steps == 0) return config.peak_lr;
  const double s = static_cast<double>(step + 1);
  const double w = static_cast<double>(config.warmup_steps);
  return s < w ? config.peak_lr * s / w : config.peak_lr * std::sqrt(w / s);
}

OptimizerState init_optimizer(const TnnModel& model) {
  OptimizerState state;
  model.for_each_parameter([&](const std::string&, const Matrix& m) {
    state.first_moment.push_back(Matrix::Zero(m.rows(), m.cols()));
    state.second_moment.push_back(Matrix::Zero(m.rows(), m.cols()));
  });
  return state;
}

double global_norm(const GradientSet& grads) {
  double sq = 0.0;
  for (const auto& g : grads) sq += g.squaredNorm();
  return std::sqrt(sq);
}

void adam_update(TnnModel& model, OptimizerState& state, const GradientSet& grads,
                 const AdamConfig& config, double lr) {
  if (grads.size() != state.first_moment.size()) {
    throw DimensionError("adam_update: gradient set does not match optimizer state");
  }
  double clip_scale = 1.0;
  if (config.grad_clip > 0.0) {
    const double norm = global_norm(grads);
    if (norm > config.grad_clip) clip_scale = config.grad_clip / norm;
  }
  const double t = static_cast<double>(state.step + 1);
  const double bias1 = 1.0 - std::pow(config.beta1, t);
  const double bias2 = 1.0 - std::pow(config.beta2, t);

  std::size_t index = 0;
  model.for_each_parameter([&](const std::string&, Matrix& param) {
    const Matrix g = grads[index] * clip_scale;
    Matrix& m = state.first_moment[index];
    Matrix& v = state.second_moment[index];
    m = config.beta1 * m + (1.0 - config.beta1) * g;
    v = config.beta2 * v + (1.0 - config.beta2) * g.cwiseAbs2();
    // Decay only full weight matrices, not biases, gains or the decay rate.
    if (config.weight_decay > 0.0 && param.rows() > 1 && param.cols() > 1) {
      param -= (lr * config.weight_decay) * param;
    }
    param.array() -= lr * (m.array() / bias1) /
                     ((v.array() / bias2).sqrt() + config.epsilon);
    ++index;
  });
  for (auto& block : model.blocks()) {
    if (block.tno.learnable_decay()) block.tno.clamp_decay();
  }
  ++state.step;
}

StepMetrics train_step(TnnModel& model, OptimizerState& state, const TokenBatch& batch,
                       const AdamConfig& config) {
  LossAndGrads lg;
  try {
    lg = loss_and_grads(model, batch);
  } catch (const NumericError& e) {
    const double nan = std::nan("");
    throw NumericAbort(std::string("non-finite training signal at step ") +
                           std::to_string(state.step) + ": " + e.what(),
                       state.step, nan, nan);
  }
  StepMetrics metrics;
  metrics.step = state.step;
  metrics.loss = lg.loss;
  metrics.lr = scheduled_lr(config, state.step);
  metrics.grad_norm = global_norm(lg.grads);
  if (!std::isfinite(metrics.loss) || !std::isfinite(metrics.grad_norm)) {
    std::ostringstream msg;
    msg << "non-finite training signal at step " << state.step << ": loss=" << metrics.loss
        << " grad_norm=" << metrics.grad_norm << " lr=" << metrics.lr;
    throw NumericAbort(msg.str(), state.step, metrics.loss, metrics.grad_norm);
  }
  adam_update(model, state, lg.grads, config, metrics.lr);
  return metrics;
}

}  // namespace tnn
