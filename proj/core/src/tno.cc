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

#include "tnn/tno.h"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <string>

#include "tnn/errors.h"
#include "tnn/fft.h"
#include "tnn/parallel.h"

namespace tnn {

struct ToeplitzOperator::Cache {
  std::mutex mutex;
  std::map<std::size_t, std::shared_ptr<const TnoPlan>> plans;
};

ToeplitzOperator::ToeplitzOperator(RpeNet rpe, const TnoOptions& options)
    : rpe_(std::move(rpe)),
      options_(options),
      decay_(Matrix::Constant(1, 1, options.decay)),
      cache_(std::make_unique<Cache>()) {
  set_decay(options.decay);
}

ToeplitzOperator::ToeplitzOperator(const ToeplitzOperator& other)
    : rpe_(other.rpe_),
      options_(other.options_),
      decay_(other.decay_),
      cache_(std::make_unique<Cache>()) {}

ToeplitzOperator& ToeplitzOperator::operator=(const ToeplitzOperator& other) {
  if (this != &other) {
    rpe_ = other.rpe_;
    options_ = other.options_;
    decay_ = other.decay_;
    invalidate_cache();
  }
  return *this;
}

ToeplitzOperator::ToeplitzOperator(ToeplitzOperator&&) noexcept = default;
ToeplitzOperator& ToeplitzOperator::operator=(ToeplitzOperator&&) noexcept = default;
ToeplitzOperator::~ToeplitzOperator() = default;

RpeNet& ToeplitzOperator::mutable_rpe() {
  invalidate_cache();
  return rpe_;
}

void ToeplitzOperator::set_decay(double decay) {
  if (!(decay >= 0.0 && decay <= 1.0)) {
    throw ConfigError("decay rate must lie in [0, 1], got " + std::to_string(decay));
  }
  decay_(0, 0) = decay;
  invalidate_cache();
}

void ToeplitzOperator::clamp_decay() {
  decay_(0, 0) = std::clamp(decay_(0, 0), 0.0, 1.0);
  invalidate_cache();
}

void ToeplitzOperator::invalidate_cache() const {
  if (!cache_) return;
  std::lock_guard<std::mutex> lock(cache_->mutex);
  cache_->plans.clear();
}

std::shared_ptr<const TnoPlan> ToeplitzOperator::plan(std::size_t n) const {
  {
    std::lock_guard<std::mutex> lock(cache_->mutex);
    if (auto it = cache_->plans.find(n); it != cache_->plans.end()) return it->second;
  }
  auto raw = rpe_forward(rpe_, n);
  auto effective = apply_decay_and_mask(raw, decay(), causal());
  ToeplitzPlan<double> kernel(effective, options_.strategy);
  std::vector<ToeplitzPlan<double>> levels;
  if (causal() && n > kCausalLeaf) {
    const std::size_t padded = next_power_of_two(n);
    const auto wide = apply_decay_and_mask(rpe_forward(rpe_, padded), decay(), true);
    const std::size_t d = channels();
    for (std::size_t h = kCausalLeaf; h < padded; h *= 2) {
      RelPosCoefficients<double> block(h, d);
      for (std::ptrdiff_t m = -static_cast<std::ptrdiff_t>(h) + 1;
           m < static_cast<std::ptrdiff_t>(h); ++m) {
        for (std::size_t c = 0; c < d; ++c) {
          block.at(m, c) = wide.at(static_cast<std::ptrdiff_t>(h) + m, c);
        }
      }
      levels.emplace_back(block, options_.strategy);
    }
  }
  auto built = std::make_shared<const TnoPlan>(TnoPlan{
      n, std::move(raw), std::move(effective), std::move(kernel), std::move(levels)});
  std::lock_guard<std::mutex> lock(cache_->mutex);
  cache_->plans[n] = built;
  return built;
}

RelPosCoefficients<double> apply_decay_and_mask(const RelPosCoefficients<double>& raw,
                                                double decay, bool causal) {
  RelPosCoefficients<double> out(raw.length(), raw.channels());
  const auto last = raw.max_offset();
  for (std::ptrdiff_t k = -last; k <= last; ++k) {
    if (causal && k < 0) continue;
    const double scale = std::pow(decay, static_cast<double>(std::abs(k)));
    for (std::size_t c = 0; c < raw.channels(); ++c) out.at(k, c) = scale * raw.at(k, c);
  }
  return out;
}

RelPosCoefficients<double> effective_coeffs(const ToeplitzOperator& op, std::size_t n) {
  return op.plan(n)->effective;
}

namespace {

void check_input(const ToeplitzOperator& op, const Matrix& x, std::size_t batch,
                 const char* what) {
  if (batch == 0 || x.rows() % static_cast<Eigen::Index>(batch) != 0 || x.rows() == 0) {
    throw DimensionError(std::string(what) + ": rows not divisible into batch items");
  }
  if (static_cast<std::size_t>(x.cols()) != op.channels()) {
    throw DimensionError(std::string(what) + ": input has " + std::to_string(x.cols()) +
                         " channels, operator expects " + std::to_string(op.channels()));
  }
}

// Adds L x to y for the rows [lo, lo + size) of one channel, L the causal
// Toeplitz operator. Rows at or beyond n are never written.
void causal_block(const TnoPlan& plan, std::size_t channel, std::size_t lo, std::size_t size,
                  std::size_t level, Strided<const double> x, Strided<double> y,
                  std::vector<double>& tmp, ToeplitzPlan<double>::Workspace& ws) {
  const std::size_t n = plan.length;
  if (lo >= n) return;
  if (size <= kCausalLeaf) {
    const std::size_t end = std::min(lo + size, n);
    const std::size_t d = plan.effective.channels();
    // Row of offset 0; offset k sits k rows further on.
    const double* t0 = plan.effective.values().data() + (n - 1) * d + channel;
    for (std::size_t i = lo; i < end; ++i) {
      double s = 0.0;
      for (std::size_t j = lo; j <= i; ++j) s += t0[(i - j) * d] * x[j];
      y[i] += s;
    }
    return;
  }
  const std::size_t h = size / 2;
  causal_block(plan, channel, lo, h, level - 1, x, y, tmp, ws);
  if (lo + h >= n) return;
  tmp.resize(h);
  plan.levels[level - 1].apply(channel, {x.data + lo * x.stride, h, x.stride},
                               {tmp.data(), h, 1}, ws);
  const std::size_t end = std::min(lo + 2 * h, n);
  for (std::size_t i = lo + h; i < end; ++i) y[i] += tmp[i - lo - h];
  causal_block(plan, channel, lo + h, h, level - 1, x, y, tmp, ws);
}

void causal_apply(const TnoPlan& plan, std::size_t channel, Strided<const double> x,
                  Strided<double> y, std::vector<double>& tmp,
                  ToeplitzPlan<double>::Workspace& ws) {
  for (std::size_t i = 0; i < plan.length; ++i) y[i] = 0.0;
  const std::size_t size = kCausalLeaf << plan.levels.size();
  causal_block(plan, channel, 0, size, plan.levels.size(), x, y, tmp, ws);
}

}  // namespace

Matrix tno_forward(const ToeplitzOperator& op, const Matrix& x, std::size_t batch) {
  check_input(op, x, batch, "tno_forward");
  if (!x.allFinite()) throw NumericError("tno_forward: non-finite input");
  const std::size_t n = static_cast<std::size_t>(x.rows()) / batch;
  const std::size_t d = op.channels();
  const auto plan = op.plan(n);

  Matrix y(x.rows(), x.cols());
  parallel_for(batch * d, [&](std::size_t begin, std::size_t end) {
    ToeplitzPlan<double>::Workspace ws;
    std::vector<double> tmp;
    for (std::size_t task = begin; task < end; ++task) {
      const std::size_t b = task / d;
      const std::size_t c = task % d;
      const std::size_t base = b * n * d + c;
      if (op.causal()) {
        causal_apply(*plan, c, {x.data() + base, n, d}, {y.data() + base, n, d}, tmp, ws);
      } else {
        plan->kernel.apply(c, {x.data() + base, n, d}, {y.data() + base, n, d}, ws);
      }
    }
  });
  return y;
}

TnoGradients tno_backward(const ToeplitzOperator& op, const Matrix& x, std::size_t batch,
                          const Matrix& grad_y) {
  check_input(op, x, batch, "tno_backward");
  if (grad_y.rows() != x.rows() || grad_y.cols() != x.cols()) {
    throw DimensionError("tno_backward: grad_y shape differs from x");
  }
  const std::size_t n = static_cast<std::size_t>(x.rows()) / batch;
  const std::size_t d = op.channels();
  const auto plan = op.plan(n);

  TnoGradients out;
  out.grad_x = Matrix(x.rows(), x.cols());
  RelPosCoefficients<double> grad_eff(n, d);
  // One task per channel; the batch is summed in a fixed order so results do
  // not depend on the thread count.
  parallel_for(d, [&](std::size_t begin, std::size_t end) {
    ToeplitzPlan<double>::Workspace ws;
    for (std::size_t c = begin; c < end; ++c) {
      Strided<double> grad_col{grad_eff.values().data() + c, grad_eff.rows(), d};
      for (std::size_t b = 0; b < batch; ++b) {
        const std::size_t base = b * n * d + c;
        const Strided<const double> g{grad_y.data() + base, n, d};
        plan->kernel.apply_transpose(c, g, {out.grad_x.data() + base, n, d}, ws);
        plan->kernel.accumulate_correlation(g, {x.data() + base, n, d}, grad_col, ws);
      }
    }
  });

  // Chain through t_bar_k = lambda^|k| t_k.
  const double lambda = op.decay();
  RelPosCoefficients<double> grad_raw(n, d);
  const auto last = grad_raw.max_offset();
  for (std::ptrdiff_t k = -last; k <= last; ++k) {
    if (op.causal() && k < 0) continue;
    const double dist = static_cast<double>(std::abs(k));
    const double scale = std::pow(lambda, dist);
    const double dscale = k == 0 ? 0.0 : dist * std::pow(lambda, dist - 1.0);
    for (std::size_t c = 0; c < d; ++c) {
      const double g = grad_eff.at(k, c);
      grad_raw.at(k, c) = scale * g;
      out.decay += dscale * plan->raw.at(k, c) * g;
    }
  }
  out.rpe = rpe_backward(op.rpe(), n, grad_raw);
  return out;
}

void write_coefficients_csv(const RelPosCoefficients<double>& coeffs, std::ostream& out) {
  out << "offset,channel,value\n";
  out << std::setprecision(17);
  const auto last = coeffs.max_offset();
  for (std::ptrdiff_t k = -last; k <= last; ++k) {
    for (std::size_t c = 0; c < coeffs.channels(); ++c) {
      out << k << ',' << c << ',' << coeffs.at(k, c) << '\n';
    }
  }
}

}  // namespace tnn
