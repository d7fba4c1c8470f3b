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

#ifndef TNN_GRADCHECK_H_
#define TNN_GRADCHECK_H_

#include <cstddef>
#include <functional>
#include <map>
#include <string>

#include "tnn/model.h"

namespace tnn {

// |a - b| / max(|a|, |b|, floor). The floor keeps gradients that are zero
// up to rounding from producing meaningless ratios.
double relative_error(double a, double b, double floor = 1e-6);

struct GradCheckSummary {
  double max_relative_error = 0.0;
  std::size_t entries = 0;
  std::string worst_entry;
};

// Parameter class of a tensor name: embedding, gtu, glu, rpe, decay, norm,
// head.
std::string parameter_class(const std::string& name);

// Compares loss_and_grads against central differences of evaluate_loss,
// entry by entry, grouped by parameter class.
std::map<std::string, GradCheckSummary> check_model_gradients(const TnnModel& model,
                                                              const TokenBatch& tokens,
                                                              double step = 1e-5);

}  // namespace tnn

#endif  // TNN_GRADCHECK_H_
