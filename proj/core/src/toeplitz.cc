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

#include "tnn/toeplitz.h"

#include <atomic>
#include <cmath>
#include <string>
#include <utility>

#include "tnn/errors.h"

namespace tnn {
namespace {

std::atomic<fault::KernelFault> g_kernel_fault{fault::KernelFault::kNone};

template <typename T>
void require_finite(std::span<const T> values, const char* what) {
  for (const T v : values) {
    if (!std::isfinite(v)) {
      throw NumericError(std::string(what) + ": non-finite entry");
    }
  }
}

template <typename T>
void check_shapes(const RelPosCoefficients<T>& coeffs, const Sequence<T>& x,
                  const char* what) {
  if (x.length() != coeffs.length() || x.channels() != coeffs.channels()) {
    throw DimensionError(std::string(what) + ": input is [" +
                         std::to_string(x.length()) + ", " +
                         std::to_string(x.channels()) + "], coefficients expect [" +
                         std::to_string(coeffs.length()) + ", " +
                         std::to_string(coeffs.channels()) + "]");
  }
}

template <typename T>
Strided<const T> channel_of(const Sequence<T>& s, std::size_t c) {
  return {s.values().data() + c, s.length(), s.channels()};
}

template <typename T>
Strided<T> channel_of(Sequence<T>& s, std::size_t c) {
  return {s.values().data() + c, s.length(), s.channels()};
}

}  // namespace

std::string_view to_string(CirculantStrategy strategy) {
  switch (strategy) {
    case CirculantStrategy::kPaper2n:
      return "paper_2n";
    case CirculantStrategy::kPaddedPow2:
      return "padded_pow2";
  }
  return "unknown";
}

CirculantStrategy parse_circulant_strategy(std::string_view name) {
  if (name == "paper_2n" || name == "paper2n") return CirculantStrategy::kPaper2n;
  if (name == "padded_pow2" || name == "pow2") return CirculantStrategy::kPaddedPow2;
  throw ConfigError("unknown circulant strategy '" + std::string(name) + "'");
}

std::size_t circulant_size(std::size_t length, CirculantStrategy strategy) {
  if (length == 0) throw DimensionError("circulant_size: length must be positive");
  return strategy == CirculantStrategy::kPaper2n ? 2 * length
                                                 : next_power_of_two(2 * length - 1);
}

// ---------------------------------------------------------------------------
// RelPosCoefficients / Sequence

template <typename T>
RelPosCoefficients<T>::RelPosCoefficients(std::size_t length, std::size_t channels)
    : length_(length), channels_(channels) {
  if (length == 0 || channels == 0) {
    throw DimensionError("RelPosCoefficients: length and channels must be positive");
  }
  values_.assign((2 * length - 1) * channels, T(0));
}

template <typename T>
RelPosCoefficients<T>::RelPosCoefficients(std::size_t length, std::size_t channels,
                                          std::vector<T> values)
    : length_(length), channels_(channels), values_(std::move(values)) {
  if (length == 0 || channels == 0) {
    throw DimensionError("RelPosCoefficients: length and channels must be positive");
  }
  if (values_.size() != (2 * length - 1) * channels) {
    throw DimensionError("RelPosCoefficients: expected " +
                         std::to_string((2 * length - 1) * channels) +
                         " values, got " + std::to_string(values_.size()));
  }
  require_finite<T>(values_, "RelPosCoefficients");
}

template <typename T>
std::size_t RelPosCoefficients<T>::row_of(std::ptrdiff_t offset) const {
  if (offset < -max_offset() || offset > max_offset()) {
    throw RangeError("offset " + std::to_string(offset) + " outside [-" +
                     std::to_string(max_offset()) + ", " +
                     std::to_string(max_offset()) + "]");
  }
  return static_cast<std::size_t>(offset + max_offset());
}

template <typename T>
Sequence<T>::Sequence(std::size_t length, std::size_t channels)
    : length_(length), channels_(channels), values_(length * channels, T(0)) {
  if (length == 0 || channels == 0) {
    throw DimensionError("Sequence: length and channels must be positive");
  }
}

template <typename T>
Sequence<T>::Sequence(std::size_t length, std::size_t channels, std::vector<T> values)
    : length_(length), channels_(channels), values_(std::move(values)) {
  if (length == 0 || channels == 0) {
    throw DimensionError("Sequence: length and channels must be positive");
  }
  if (values_.size() != length * channels) {
    throw DimensionError("Sequence: expected " + std::to_string(length * channels) +
                         " values, got " + std::to_string(values_.size()));
  }
}

// ---------------------------------------------------------------------------
// Circulant embedding

template <typename T>
CirculantSpec<T> build_circulant(const RelPosCoefficients<T>& coeffs,
                                 CirculantStrategy strategy) {
  const std::size_t n = coeffs.length();
  const std::size_t d = coeffs.channels();
  const auto last = static_cast<std::ptrdiff_t>(n) - 1;

  CirculantSpec<T> spec;
  spec.length = n;
  spec.embed_size = circulant_size(n, strategy);
  spec.channels = d;
  spec.strategy = strategy;
  spec.first_column.assign(spec.embed_size * d, T(0));

  const std::size_t big_n = spec.embed_size;
  for (std::size_t c = 0; c < d; ++c) {
    T* col = spec.first_column.data() + c * big_n;
    if (strategy == CirculantStrategy::kPaper2n) {
      // c_k = t_k (k < n), c_n = t_0, c_k = t_{k - 2n} (k > n)
      for (std::size_t k = 0; k < n; ++k) {
        col[k] = coeffs.at(static_cast<std::ptrdiff_t>(k), c);
      }
      col[n] = coeffs.at(0, c);
      for (std::size_t k = n + 1; k < 2 * n; ++k) {
        col[k] = coeffs.at(static_cast<std::ptrdiff_t>(k) -
                               2 * static_cast<std::ptrdiff_t>(n),
                           c);
      }
    } else {
      for (std::ptrdiff_t k = 0; k <= last; ++k) col[k] = coeffs.at(k, c);
      for (std::ptrdiff_t k = 1; k <= last; ++k) {
        col[big_n - static_cast<std::size_t>(k)] = coeffs.at(-k, c);
      }
    }
  }
  return spec;
}

// ---------------------------------------------------------------------------
// ToeplitzPlan

template <typename T>
ToeplitzPlan<T>::ToeplitzPlan(const RelPosCoefficients<T>& coeffs,
                              CirculantStrategy strategy)
    : ToeplitzPlan(build_circulant(coeffs, strategy)) {}

template <typename T>
ToeplitzPlan<T>::ToeplitzPlan(const CirculantSpec<T>& spec)
    : length_(spec.length),
      channels_(spec.channels),
      strategy_(spec.strategy),
      embed_size_(spec.embed_size) {
  if (embed_size_ % 2 == 0) {
    real_ = std::make_shared<RealFftPlan<T>>(embed_size_);
    bins_ = real_->bins();
  } else {
    fft_ = std::make_shared<FftPlan<T>>(embed_size_);
    bins_ = embed_size_;
  }
  spectra_.resize(bins_ * channels_);
  Workspace ws;
  std::vector<Complex> out;
  for (std::size_t c = 0; c < channels_; ++c) {
    const auto col = spec.column(c);
    transform({col.data(), embed_size_, 1}, out, ws);
    std::copy(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(bins_),
              spectra_.begin() + static_cast<std::ptrdiff_t>(c * bins_));
  }
}

template <typename T>
void ToeplitzPlan<T>::transform(Strided<const T> x, std::vector<Complex>& out,
                                Workspace& ws) const {
  if (real_) {
    ws.r.assign(embed_size_, T(0));
    for (std::size_t i = 0; i < x.size; ++i) ws.r[i] = x[i];
    out.resize(bins_);
    real_->forward(ws.r, out);
  } else {
    out.assign(embed_size_, Complex(0, 0));
    for (std::size_t i = 0; i < x.size; ++i) out[i] = Complex(x[i], T(0));
    fft_->forward(out);
  }
}

template <typename T>
void ToeplitzPlan<T>::inverse_transform(Workspace& ws) const {
  ws.r.resize(embed_size_);
  if (real_) {
    real_->inverse(ws.a, ws.r);
  } else {
    fft_->inverse(ws.a);
    for (std::size_t i = 0; i < embed_size_; ++i) ws.r[i] = ws.a[i].real();
  }
}

template <typename T>
void ToeplitzPlan<T>::multiply(std::size_t channel, Strided<const T> x,
                               Strided<T> y, Workspace& ws, bool conjugate) const {
  transform({x.data, length_, x.stride}, ws.a, ws);
  const Complex* spec = spectra_.data() + channel * bins_;
  for (std::size_t k = 0; k < bins_; ++k) {
    const T sr = spec[k].real();
    const T si = conjugate ? -spec[k].imag() : spec[k].imag();
    const T ar = ws.a[k].real();
    const T ai = ws.a[k].imag();
    ws.a[k] = Complex(ar * sr - ai * si, ar * si + ai * sr);
  }
  inverse_transform(ws);
  // Only the first n rows of C [x; 0] belong to T x.
  for (std::size_t i = 0; i < length_; ++i) y[i] = ws.r[i];
}

template <typename T>
void ToeplitzPlan<T>::apply(std::size_t channel, Strided<const T> x, Strided<T> y,
                            Workspace& ws) const {
  multiply(channel, x, y, ws, /*conjugate=*/false);
}

// For real c the transposed circulant has the conjugate spectrum, and its
// top-left n x n block is T^T.
template <typename T>
void ToeplitzPlan<T>::apply_transpose(std::size_t channel, Strided<const T> x,
                                      Strided<T> y, Workspace& ws) const {
  multiply(channel, x, y, ws, /*conjugate=*/true);
}

template <typename T>
void ToeplitzPlan<T>::accumulate_correlation(Strided<const T> g, Strided<const T> x,
                                             Strided<T> grad, Workspace& ws) const {
  transform({x.data, length_, x.stride}, ws.b, ws);
  transform({g.data, length_, g.stride}, ws.a, ws);
  for (std::size_t k = 0; k < bins_; ++k) {
    const T gr = ws.a[k].real(), gi = ws.a[k].imag();
    const T xr = ws.b[k].real(), xi = -ws.b[k].imag();
    ws.a[k] = Complex(gr * xr - gi * xi, gr * xi + gi * xr);
  }
  inverse_transform(ws);
  // r[m] = sum_j g_{(j + m) mod N} x_j; no wrap-around since N >= 2n - 1.
  const auto last = static_cast<std::ptrdiff_t>(length_) - 1;
  for (std::ptrdiff_t k = -last; k <= last; ++k) {
    const std::size_t src = k >= 0 ? static_cast<std::size_t>(k)
                                   : embed_size_ - static_cast<std::size_t>(-k);
    grad[static_cast<std::size_t>(k + last)] += ws.r[src];
  }
}

// ---------------------------------------------------------------------------
// Free functions

template <typename T>
Sequence<T> naive_matvec(const RelPosCoefficients<T>& coeffs, const Sequence<T>& x) {
  check_shapes(coeffs, x, "naive_matvec");
  require_finite(x.values(), "naive_matvec input");
  const std::size_t n = coeffs.length();
  const std::size_t d = coeffs.channels();
  Sequence<T> y(n, d);
  const T* t = coeffs.values().data();
  const T* xs = x.values().data();
  T* ys = y.values().data();
  for (std::size_t i = 0; i < n; ++i) {
    T* yi = ys + i * d;
    for (std::size_t j = 0; j < n; ++j) {
      const T* tk = t + (i + n - 1 - j) * d;  // row of offset i - j
      const T* xj = xs + j * d;
      for (std::size_t c = 0; c < d; ++c) yi[c] += tk[c] * xj[c];
    }
  }
  return y;
}

template <typename T>
Sequence<T> fft_matvec(const RelPosCoefficients<T>& coeffs, const Sequence<T>& x,
                       CirculantStrategy strategy) {
  check_shapes(coeffs, x, "fft_matvec");
  require_finite(x.values(), "fft_matvec input");
  const ToeplitzPlan<T> plan(coeffs, strategy);
  const std::size_t n = x.length(), d = x.channels();
  // Work channel-major: a strided walk down one channel touches a new cache
  // line per element, which dominates at large n.
  std::vector<T> xt(n * d), yt(n * d);
  const auto xs = x.values();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < d; ++c) xt[c * n + i] = xs[i * d + c];
  }
  typename ToeplitzPlan<T>::Workspace ws;
  for (std::size_t c = 0; c < d; ++c) {
    plan.apply(c, {xt.data() + c * n, n, 1}, {yt.data() + c * n, n, 1}, ws);
  }
  Sequence<T> y(n, d);
  const auto ys = y.values();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < d; ++c) ys[i * d + c] = yt[c * n + i];
  }
  const fault::KernelFault injected = fault::kernel_fault();
  if ((injected == fault::KernelFault::kPaper2n && strategy == CirculantStrategy::kPaper2n) ||
      (injected == fault::KernelFault::kPaddedPow2 &&
       strategy == CirculantStrategy::kPaddedPow2)) {
    for (T& v : y.values()) v *= T(1.01);
  }
  const auto out = y.values();
  for (const T v : out) {
    if (!std::isfinite(v)) throw NumericError("fft_matvec: non-finite output (overflow)");
  }
  return y;
}

template <typename T>
MatvecGradients<T> matvec_backward(const RelPosCoefficients<T>& coeffs,
                                   const Sequence<T>& x, const Sequence<T>& grad_y,
                                   CirculantStrategy strategy) {
  check_shapes(coeffs, x, "matvec_backward");
  check_shapes(coeffs, grad_y, "matvec_backward");
  const ToeplitzPlan<T> plan(coeffs, strategy);
  MatvecGradients<T> out{Sequence<T>(x.length(), x.channels()),
                         RelPosCoefficients<T>(coeffs.length(), coeffs.channels())};
  typename ToeplitzPlan<T>::Workspace ws;
  const std::size_t d = coeffs.channels();
  for (std::size_t c = 0; c < d; ++c) {
    plan.apply_transpose(c, channel_of(grad_y, c), channel_of(out.grad_x, c), ws);
    Strided<T> grad_col{out.grad_coeffs.values().data() + c, coeffs.rows(), d};
    plan.accumulate_correlation(channel_of(grad_y, c), channel_of(x, c), grad_col, ws);
  }
  return out;
}

template <typename T>
RelPosCoefficients<T> transpose_coefficients(const RelPosCoefficients<T>& coeffs) {
  RelPosCoefficients<T> out(coeffs.length(), coeffs.channels());
  const auto last = coeffs.max_offset();
  for (std::ptrdiff_t k = -last; k <= last; ++k) {
    for (std::size_t c = 0; c < coeffs.channels(); ++c) out.at(k, c) = coeffs.at(-k, c);
  }
  return out;
}

template <typename T>
std::vector<T> dense_toeplitz(const RelPosCoefficients<T>& coeffs, std::size_t channel) {
  if (channel >= coeffs.channels()) throw RangeError("dense_toeplitz: channel out of range");
  const std::size_t n = coeffs.length();
  std::vector<T> m(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      m[i * n + j] = coeffs.at(static_cast<std::ptrdiff_t>(i) -
                                   static_cast<std::ptrdiff_t>(j),
                               channel);
    }
  }
  return m;
}

namespace fault {

void set_kernel_fault(KernelFault fault) { g_kernel_fault = fault; }
KernelFault kernel_fault() { return g_kernel_fault.load(); }

}  // namespace fault

#define TNN_INSTANTIATE(T)                                                         \
  template class RelPosCoefficients<T>;                                            \
  template class Sequence<T>;                                                      \
  template class ToeplitzPlan<T>;                                                  \
  template Sequence<T> naive_matvec(const RelPosCoefficients<T>&, const Sequence<T>&); \
  template CirculantSpec<T> build_circulant(const RelPosCoefficients<T>&,          \
                                            CirculantStrategy);                    \
  template Sequence<T> fft_matvec(const RelPosCoefficients<T>&, const Sequence<T>&, \
                                  CirculantStrategy);                              \
  template MatvecGradients<T> matvec_backward(const RelPosCoefficients<T>&,        \
                                              const Sequence<T>&, const Sequence<T>&, \
                                              CirculantStrategy);                  \
  template RelPosCoefficients<T> transpose_coefficients(const RelPosCoefficients<T>&); \
  template std::vector<T> dense_toeplitz(const RelPosCoefficients<T>&, std::size_t);

TNN_INSTANTIATE(float)
TNN_INSTANTIATE(double)

#undef TNN_INSTANTIATE

}  // namespace tnn
