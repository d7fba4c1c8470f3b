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

#ifndef TNN_TNO_H_
#define TNN_TNO_H_

#include <cstddef>
#include <memory>
#include <mutex>
#include <ostream>
#include <string>
#include <vector>

#include "tnn/layers.h"
#include "tnn/rpe.h"
#include "tnn/toeplitz.h"

namespace tnn {

struct TnoOptions {
  double decay = 0.99;  // lambda in [0, 1]
  bool causal = false;
  CirculantStrategy strategy = CirculantStrategy::kPaddedPow2;
  bool learnable_decay = false;
};

// Everything needed to apply the operator at one sequence length.
// Causal operators are evaluated block-recursively: a block's lower half
// receives the upper half's contribution through one FFT product, and blocks
// of kCausalLeaf rows are summed directly. Every partial result for row i is
// built from rows <= i only, and the level plans depend on the block size,
// not on n, so prefix outputs are bit-identical under any change to later
// inputs or to the sequence length.
inline constexpr std::size_t kCausalLeaf = 32;

struct TnoPlan {
  std::size_t length;
  RelPosCoefficients<double> raw;        // RPE output t_k
  RelPosCoefficients<double> effective;  // lambda^|k| t_k, causally masked
  ToeplitzPlan<double> kernel;
  // Causal only. levels[l] is the (h x h) operator with generators t_{h+m},
  // h = kCausalLeaf << l, coupling the upper half of a 2h block to its
  // lower half.
  std::vector<ToeplitzPlan<double>> levels;
};

// Toeplitz neural operator: RPE-generated coefficients with exponential
// decay and optional causal masking, applied per channel through the FFT
// kernel.
//
// Plans are cached per sequence length. Any mutable access to the weights
// goes through mutable_rpe() / for_each_parameter() / set_decay(), all of
// which drop the cache. Copies start with an empty cache.
class ToeplitzOperator {
 public:
  ToeplitzOperator(RpeNet rpe, const TnoOptions& options);

  ToeplitzOperator(const ToeplitzOperator& other);
  ToeplitzOperator& operator=(const ToeplitzOperator& other);
  ToeplitzOperator(ToeplitzOperator&&) noexcept;
  ToeplitzOperator& operator=(ToeplitzOperator&&) noexcept;
  ~ToeplitzOperator();

  const RpeNet& rpe() const { return rpe_; }
  RpeNet& mutable_rpe();

  double decay() const { return decay_(0, 0); }
  void set_decay(double decay);
  // Projects a learned decay back into [0, 1].
  void clamp_decay();

  bool causal() const { return options_.causal; }
  bool learnable_decay() const { return options_.learnable_decay; }
  CirculantStrategy strategy() const { return options_.strategy; }
  std::size_t channels() const { return rpe_.config().out_dim; }

  std::shared_ptr<const TnoPlan> plan(std::size_t n) const;
  void invalidate_cache() const;

  // RPE tensors as "rpe.layerK.*", plus "decay" (1 x 1) in learnable mode.
  template <typename F>
  void for_each_parameter(F&& f) {
    invalidate_cache();
    rpe_.for_each_parameter([&](const std::string& name, Matrix& m) { f("rpe." + name, m); });
    if (options_.learnable_decay) f(std::string("decay"), decay_);
  }
  template <typename F>
  void for_each_parameter(F&& f) const {
    rpe_.for_each_parameter(
        [&](const std::string& name, const Matrix& m) { f("rpe." + name, m); });
    if (options_.learnable_decay) f(std::string("decay"), decay_);
  }

 private:
  struct Cache;

  RpeNet rpe_;
  TnoOptions options_;
  Matrix decay_;  // 1 x 1
  std::unique_ptr<Cache> cache_;
};

// t_bar_k = lambda^|k| t_k, with t_bar_k = 0 for k < 0 when causal. 0^0 = 1.
RelPosCoefficients<double> apply_decay_and_mask(const RelPosCoefficients<double>& raw,
                                                double decay, bool causal);

RelPosCoefficients<double> effective_coeffs(const ToeplitzOperator& op, std::size_t n);

// x is [batch * n, d] (batch-major rows); each item and channel is mixed
// independently with the same coefficients.
Matrix tno_forward(const ToeplitzOperator& op, const Matrix& x, std::size_t batch);

struct TnoGradients {
  Matrix grad_x;
  RpeGradients rpe;
  double decay = 0.0;  // meaningful in learnable mode
};

TnoGradients tno_backward(const ToeplitzOperator& op, const Matrix& x,
                          std::size_t batch, const Matrix& grad_y);

// CSV with header "offset,channel,value", offsets ascending.
void write_coefficients_csv(const RelPosCoefficients<double>& coeffs, std::ostream& out);

}  // namespace tnn

#endif  // TNN_TNO_H_
