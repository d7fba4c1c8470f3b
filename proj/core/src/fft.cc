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

#include "tnn/fft.h"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

#include "tnn/errors.h"

namespace tnn {
namespace {

// std::complex operator* guards against inf/nan per Annex G and is several
// times slower; inputs here are finite.
template <typename T>
inline std::complex<T> mul(const std::complex<T>& a, const std::complex<T>& b) {
  return {a.real() * b.real() - a.imag() * b.imag(),
          a.real() * b.imag() + a.imag() * b.real()};
}

// exp(+i*pi*num/den), with the angle reduced exactly in integers first.
std::complex<double> unit_root(std::uint64_t num, std::uint64_t den) {
  const double angle = std::numbers::pi * static_cast<double>(num % (2 * den)) /
                       static_cast<double>(den);
  return {std::cos(angle), std::sin(angle)};
}

}  // namespace

bool is_power_of_two(std::size_t value) {
  return value != 0 && (value & (value - 1)) == 0;
}

std::size_t next_power_of_two(std::size_t value) {
  std::size_t p = 1;
  while (p < value) p <<= 1;
  return p;
}

template <typename T>
FftPlan<T>::FftPlan(std::size_t size) : size_(size) {
  if (size == 0) throw DimensionError("FftPlan: size must be positive");
  if (tnn::is_power_of_two(size)) {
    forward_twiddles_.resize(size > 1 ? size - 1 : 0);
    inverse_twiddles_.resize(forward_twiddles_.size());
    for (std::size_t h = 1; h < size; h <<= 1) {
      for (std::size_t j = 0; j < h; ++j) {
        const auto w = unit_root(j, h);
        forward_twiddles_[h - 1 + j] = Complex(static_cast<T>(w.real()), static_cast<T>(w.imag()));
        inverse_twiddles_[h - 1 + j] = std::conj(forward_twiddles_[h - 1 + j]);
      }
    }
    bit_reverse_.resize(size);
    std::size_t bits = 0;
    while ((std::size_t{1} << bits) < size) ++bits;
    for (std::size_t i = 0; i < size; ++i) {
      std::size_t r = 0;
      for (std::size_t b = 0; b < bits; ++b) {
        if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (bits - 1 - b);
      }
      bit_reverse_[i] = static_cast<std::uint32_t>(r);
    }
    return;
  }

  auto plan = std::make_shared<Bluestein>();
  plan->conv_size = next_power_of_two(2 * size - 1);
  plan->conv_plan = std::make_unique<FftPlan<T>>(plan->conv_size);
  plan->chirp.resize(size);
  for (std::size_t t = 0; t < size; ++t) {
    const std::uint64_t sq = static_cast<std::uint64_t>(t) * t;
    const auto w = unit_root(sq, size);
    plan->chirp[t] = Complex(static_cast<T>(w.real()), static_cast<T>(w.imag()));
  }
  plan->kernel_spectrum.assign(plan->conv_size, Complex(0, 0));
  plan->kernel_spectrum[0] = std::conj(plan->chirp[0]);
  for (std::size_t k = 1; k < size; ++k) {
    plan->kernel_spectrum[k] = std::conj(plan->chirp[k]);
    plan->kernel_spectrum[plan->conv_size - k] = std::conj(plan->chirp[k]);
  }
  plan->conv_plan->forward(plan->kernel_spectrum);
  bluestein_ = std::move(plan);
}

template <typename T>
void FftPlan<T>::radix2(std::span<Complex> data, const std::vector<Complex>& twiddles) const {
  const std::size_t n = size_;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = bit_reverse_[i];
    if (i < j) std::swap(data[i], data[j]);
  }
  Complex* d = data.data();
  if (n >= 2) {
    for (std::size_t start = 0; start < n; start += 2) {
      const Complex v = d[start + 1];
      d[start + 1] = d[start] - v;
      d[start] += v;
    }
  }
  for (std::size_t half = 2; half < n; half <<= 1) {
    const Complex* w = twiddles.data() + half - 1;
    for (std::size_t start = 0; start < n; start += 2 * half) {
      Complex* lo = d + start;
      Complex* hi = lo + half;
      for (std::size_t j = 0; j < half; ++j) {
        const Complex v = mul(hi[j], w[j]);
        hi[j] = lo[j] - v;
        lo[j] += v;
      }
    }
  }
}

// X_s = chirp_s * sum_t (x_t chirp_t) conj(chirp_{s-t}), using
// s*t = (s^2 + t^2 - (s-t)^2) / 2.
template <typename T>
void FftPlan<T>::bluestein_forward(std::span<Complex> data) const {
  const Bluestein& plan = *bluestein_;
  std::vector<Complex> work(plan.conv_size, Complex(0, 0));
  for (std::size_t t = 0; t < size_; ++t) work[t] = mul(data[t], plan.chirp[t]);
  plan.conv_plan->forward(work);
  for (std::size_t k = 0; k < plan.conv_size; ++k) {
    work[k] = mul(work[k], plan.kernel_spectrum[k]);
  }
  plan.conv_plan->inverse(work);
  for (std::size_t s = 0; s < size_; ++s) data[s] = mul(work[s], plan.chirp[s]);
}

template <typename T>
void FftPlan<T>::forward(std::span<Complex> data) const {
  if (data.size() != size_) throw DimensionError("FftPlan::forward: size mismatch");
  if (bluestein_) {
    bluestein_forward(data);
  } else {
    radix2(data, forward_twiddles_);
  }
}

template <typename T>
void FftPlan<T>::inverse(std::span<Complex> data) const {
  if (data.size() != size_) throw DimensionError("FftPlan::inverse: size mismatch");
  if (bluestein_) {
    // inverse(x) = conj(forward(conj(x))) / N
    for (auto& v : data) v = std::conj(v);
    bluestein_forward(data);
    for (auto& v : data) v = std::conj(v);
  } else {
    radix2(data, inverse_twiddles_);
  }
  const T scale = T(1) / static_cast<T>(size_);
  for (auto& v : data) v *= scale;
}

template <typename T>
RealFftPlan<T>::RealFftPlan(std::size_t size)
    : size_(size), half_(size >= 2 && size % 2 == 0 ? size / 2 : 1) {
  if (size < 2 || size % 2 != 0) {
    throw DimensionError("RealFftPlan: size must be even and >= 2, got " + std::to_string(size));
  }
  twiddles_.resize(size / 4 + 1);
  for (std::size_t k = 0; k < twiddles_.size(); ++k) {
    const auto w = unit_root(2 * k, size);
    twiddles_[k] = Complex(static_cast<T>(w.real()), static_cast<T>(w.imag()));
  }
}

// exp(+2*pi*i*k/N) for 0 <= k <= N/2, from the first-quadrant table.
template <typename T>
static std::complex<T> real_twiddle(const std::vector<std::complex<T>>& table, std::size_t k,
                                    std::size_t n) {
  if (k <= n / 4) return table[k];
  // exp(i(pi - a)) = -conj(exp(ia))
  const std::complex<T> w = table[n / 2 - k];
  return {-w.real(), w.imag()};
}

// With z_m = x_{2m} + i x_{2m+1} and Z = F_{N/2}(z): the even and odd
// sample spectra are E_k = (Z_k + conj Z_{M-k}) / 2 and
// O_k = -i (Z_k - conj Z_{M-k}) / 2, and X_k = E_k + w^k O_k.
template <typename T>
void RealFftPlan<T>::forward(std::span<const T> in, std::span<Complex> out) const {
  if (in.size() != size_ || out.size() < bins()) {
    throw DimensionError("RealFftPlan::forward: size mismatch");
  }
  const std::size_t m = size_ / 2;
  for (std::size_t i = 0; i < m; ++i) out[i] = Complex(in[2 * i], in[2 * i + 1]);
  half_.forward(out.first(m));
  const Complex z0 = out[0];
  out[0] = Complex(z0.real() + z0.imag(), 0);
  out[m] = Complex(z0.real() - z0.imag(), 0);
  const T h = T(0.5);
  for (std::size_t k = 1; 2 * k <= m; ++k) {
    const std::size_t j = m - k;
    const Complex zk = out[k], zj = out[j];
    const Complex e(h * (zk.real() + zj.real()), h * (zk.imag() - zj.imag()));
    const Complex o(h * (zk.imag() + zj.imag()), -h * (zk.real() - zj.real()));
    const Complex wk = real_twiddle(twiddles_, k, size_);
    const Complex wj = real_twiddle(twiddles_, j, size_);
    out[k] = e + mul(wk, o);
    out[j] = std::conj(e) + mul(wj, std::conj(o));
  }
}

// Inverse of the above: E_k = (X_k + conj X_{M-k}) / 2,
// O_k = w^-k (X_k - conj X_{M-k}) / 2, Z_k = E_k + i O_k.
template <typename T>
void RealFftPlan<T>::inverse(std::span<Complex> spectrum, std::span<T> out) const {
  if (spectrum.size() < bins() || out.size() != size_) {
    throw DimensionError("RealFftPlan::inverse: size mismatch");
  }
  const std::size_t m = size_ / 2;
  const T h = T(0.5);
  auto combine = [&](std::size_t k, const Complex& xk, const Complex& xmk) {
    const Complex e = h * (xk + std::conj(xmk));
    const Complex o = mul(h * (xk - std::conj(xmk)), std::conj(real_twiddle(twiddles_, k, size_)));
    return Complex(e.real() - o.imag(), e.imag() + o.real());
  };
  const Complex z0 = combine(0, spectrum[0], spectrum[m]);
  for (std::size_t k = 1; 2 * k <= m; ++k) {
    const std::size_t j = m - k;
    const Complex xk = spectrum[k], xj = spectrum[j];
    spectrum[k] = combine(k, xk, xj);
    spectrum[j] = combine(j, xj, xk);
  }
  spectrum[0] = z0;
  half_.inverse(spectrum.first(m));
  for (std::size_t i = 0; i < m; ++i) {
    out[2 * i] = spectrum[i].real();
    out[2 * i + 1] = spectrum[i].imag();
  }
}

template class FftPlan<float>;
template class FftPlan<double>;
template class RealFftPlan<float>;
template class RealFftPlan<double>;

}  // namespace tnn
