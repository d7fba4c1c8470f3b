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

#include "tnn/gradcheck.h"

#include <algorithm>
#include <cmath>

namespace tnn {

double relative_error(double a, double b, double floor) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

std::string parameter_class(const std::string& name) {
  if (name == "embedding") return "embedding";
  if (name == "head") return "head";
  if (name.find(".tno.rpe.") != std::string::npos) return "rpe";
  if (name.find(".tno.decay") != std::string::npos) return "decay";
  if (name.find(".gtu.") != std::string::npos) return "gtu";
  if (name.find(".glu.") != std::string::npos) return "glu";
  if (name.find("norm") != std::string::npos) return "norm";
  return "other";
}

std::map<std::string, GradCheckSummary> check_model_gradients(const TnnModel& model,
                                                              const TokenBatch& tokens,
                                                              double step) {
  const LossAndGrads analytic = loss_and_grads(model, tokens);
  TnnModel probe = model;
  std::map<std::string, GradCheckSummary> out;

  std::vector<std::string> names = model.parameter_names();
  for (std::size_t t = 0; t < names.size(); ++t) {
    const Matrix& grad = analytic.grads[t];
    GradCheckSummary& summary = out[parameter_class(names[t])];
    for (Eigen::Index i = 0; i < grad.size(); ++i) {
      auto nudge = [&](double delta) {
        std::size_t index = 0;
        probe.for_each_parameter([&](const std::string&, Matrix& m) {
          if (index++ == t) m.data()[i] += delta;
        });
      };
      double original = 0.0;
      {
        std::size_t index = 0;
        probe.for_each_parameter([&](const std::string&, Matrix& m) {
          if (index++ == t) original = m.data()[i];
        });
      }
      nudge(step);
      const double plus = evaluate_loss(probe, tokens);
      nudge(-2.0 * step);
      const double minus = evaluate_loss(probe, tokens);
      // Restore exactly rather than adding step back.
      {
        std::size_t index = 0;
        probe.for_each_parameter([&](const std::string&, Matrix& m) {
          if (index++ == t) m.data()[i] = original;
        });
      }
      const double numeric = (plus - minus) / (2.0 * step);
      const double err = relative_error(grad.data()[i], numeric);
      ++summary.entries;
      if (err > summary.max_relative_error || summary.worst_entry.empty()) {
        summary.max_relative_error = std::max(summary.max_relative_error, err);
        summary.worst_entry = names[t] + "[" + std::to_string(i) + "]";
      }
    }
  }
  return out;
}

}  // namespace tnn
