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

#ifndef TNN_OPTIMIZER_H_
#define TNN_OPTIMIZER_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "tnn/errors.h"
#include "tnn/model.h"

namespace tnn {

// Adam with decoupled weight decay and a linear-warmup / inverse-sqrt
// schedule. Betas default to (0.9, 0.98).
struct AdamConfig {
  double peak_lr = 2e-3;
  double beta1 = 0.9;
  double beta2 = 0.98;
  double epsilon = 1e-8;
  double weight_decay = 0.01;
  std::size_t warmup_steps = 100;
  double grad_clip = 0.0;  // global-norm clip; 0 disables

  void validate() const;
};

// Learning rate used for the update at zero-based `step`:
//   peak * (step + 1) / warmup         while step + 1 < warmup
//   peak * sqrt(warmup / (step + 1))   afterwards
// and a constant peak when warmup is 0.
double scheduled_lr(const AdamConfig& config, std::size_t step);

struct OptimizerState {
  std::size_t step = 0;
  std::vector<Matrix> first_moment;
  std::vector<Matrix> second_moment;
};

OptimizerState init_optimizer(const TnnModel& model);

struct StepMetrics {
  std::size_t step = 0;  // zero-based index of the step just taken
  double loss = 0.0;
  double lr = 0.0;
  double grad_norm = 0.0;
};

// Raised when the loss or gradients stop being finite. The model and
// optimizer state are left as they were before the failing step.
class NumericAbort : public NumericError {
 public:
  NumericAbort(const std::string& message, std::size_t step, double loss, double grad_norm)
      : NumericError(message), step_(step), loss_(loss), grad_norm_(grad_norm) {}

  std::size_t step() const { return step_; }
  double loss() const { return loss_; }
  double grad_norm() const { return grad_norm_; }

 private:
  std::size_t step_;
  double loss_;
  double grad_norm_;
};

// Applies one update given precomputed gradients (aligned with the
// model's parameter order).
void adam_update(TnnModel& model, OptimizerState& state, const GradientSet& grads,
                 const AdamConfig& config, double lr);

StepMetrics train_step(TnnModel& model, OptimizerState& state, const TokenBatch& batch,
                       const AdamConfig& config);

double global_norm(const GradientSet& grads);

}  // namespace tnn

#endif  // TNN_OPTIMIZER_H_
