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

#include "tnn/equivalence.h"

#include <cmath>
#include <sstream>

#include "tnn/errors.h"

namespace tnn {

Sequence<double> ConvToeplitz::pad(std::span<const double> x) const {
  if (x.size() != input_length) {
    throw DimensionError("ConvToeplitz::pad: expected " + std::to_string(input_length) +
                         " samples, got " + std::to_string(x.size()));
  }
  Sequence<double> z(input_length + padding, 1);
  for (std::size_t i = 0; i < x.size(); ++i) z.at(i, 0) = x[i];
  return z;
}

ConvToeplitz conv_to_toeplitz(const ConvKernel& kernel, std::size_t n) {
  const std::size_t m = kernel.taps.size();
  if (m == 0) throw DimensionError("conv_to_toeplitz: kernel needs at least one tap");
  if (n == 0) throw DimensionError("conv_to_toeplitz: n must be positive");
  for (double h : kernel.taps) {
    if (!std::isfinite(h)) throw NumericError("conv_to_toeplitz: non-finite tap");
  }
  const std::size_t size = n + m - 1;
  RelPosCoefficients<double> coeffs(size, 1);
  for (std::size_t k = 0; k < m; ++k) coeffs.at(static_cast<std::ptrdiff_t>(k), 0) = kernel.taps[k];
  return ConvToeplitz{std::move(coeffs), n, m - 1};
}

std::vector<double> direct_convolution(std::span<const double> taps,
                                       std::span<const double> x) {
  if (taps.empty() || x.empty()) throw DimensionError("direct_convolution: empty input");
  std::vector<double> y(x.size() + taps.size() - 1, 0.0);
  for (std::size_t i = 0; i < y.size(); ++i) {
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (i >= j && i - j < taps.size()) y[i] += taps[i - j] * x[j];
    }
  }
  return y;
}

void StateSpaceParams::validate() const {
  const auto h = a.rows();
  if (h < 1 || a.cols() != h || b.rows() != h || b.cols() != 1 || c.rows() != 1 ||
      c.cols() != h) {
    throw DimensionError("StateSpaceParams: expected A [h,h], B [h,1], C [1,h]");
  }
  if (!a.allFinite() || !b.allFinite() || !c.allFinite()) {
    throw NumericError("StateSpaceParams: non-finite entry");
  }
}

double spectral_radius_estimate(const Matrix& a, std::size_t squarings) {
  // rho(A) <= ||A^k||_F^(1/k) for every k (Gelfand); k = 2^squarings, with
  // the power kept normalized and its scale tracked in log space.
  double norm = a.norm();
  if (norm == 0.0) return 0.0;
  Matrix power = a / norm;
  double log_scale = std::log(norm);
  for (std::size_t s = 0; s < squarings; ++s) {
    power = power * power;
    norm = power.norm();
    if (norm == 0.0) return 0.0;
    power /= norm;
    log_scale = 2.0 * log_scale + std::log(norm);
  }
  return std::exp(log_scale / std::ldexp(1.0, static_cast<int>(squarings)));
}

std::vector<double> ssm_kernel(const StateSpaceParams& params, std::size_t n) {
  params.validate();
  if (n == 0) throw DimensionError("ssm_kernel: n must be positive");
  std::vector<double> k(n);
  Eigen::VectorXd state = params.b.col(0);  // A^j B
  for (std::size_t j = 0; j < n; ++j) {
    k[j] = (params.c * state)(0, 0);
    if (!std::isfinite(k[j])) {
      std::ostringstream msg;
      msg << "ssm_kernel: overflow at j=" << j << "; estimated spectral radius of A is "
          << spectral_radius_estimate(params.a) << " (need < 1 for a decaying kernel)";
      throw NumericError(msg.str());
    }
    state = params.a * state;
  }
  return k;
}

RelPosCoefficients<double> ssm_to_toeplitz(const StateSpaceParams& params, std::size_t n) {
  const auto kernel = ssm_kernel(params, n);
  RelPosCoefficients<double> coeffs(n, 1);
  for (std::size_t k = 0; k < n; ++k) coeffs.at(static_cast<std::ptrdiff_t>(k), 0) = kernel[k];
  return coeffs;
}

std::vector<double> simulate_recurrence(const StateSpaceParams& params,
                                        std::span<const double> x) {
  params.validate();
  Eigen::VectorXd u = Eigen::VectorXd::Zero(params.a.rows());
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    u = params.a * u + params.b.col(0) * x[i];
    y[i] = (params.c * u)(0, 0);
  }
  return y;
}

StateSpaceParams random_stable_system(std::size_t state_dim, Rng& rng, double radius) {
  if (state_dim == 0) throw DimensionError("random_stable_system: state_dim must be positive");
  const auto h = static_cast<Eigen::Index>(state_dim);
  StateSpaceParams p{Matrix(h, h), Matrix(h, 1), Matrix(1, h)};
  for (Eigen::Index i = 0; i < p.a.size(); ++i) p.a.data()[i] = rng.normal();
  for (Eigen::Index i = 0; i < h; ++i) {
    p.b(i, 0) = rng.normal();
    p.c(0, i) = rng.normal();
  }
  const double rho = spectral_radius_estimate(p.a);
  if (rho > radius) p.a *= radius / rho;
  return p;
}

}  // namespace tnn
