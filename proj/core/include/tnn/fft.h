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

#ifndef TNN_FFT_H_
#define TNN_FFT_H_

#include <complex>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace tnn {

// Precomputed discrete Fourier transform of a fixed size.
//
// forward() evaluates X_s = sum_t x_t * exp(+2*pi*i*s*t/N) and inverse()
// evaluates the conjugate transform scaled by 1/N, so that
// inverse(forward(x)) == x up to rounding. Power-of-two sizes run an
// iterative radix-2 transform; other sizes use Bluestein's chirp-z
// reformulation on top of a power-of-two plan.
//
// Plans are immutable after construction and safe to share across threads.
template <typename T>
class FftPlan {
 public:
  using Complex = std::complex<T>;

  explicit FftPlan(std::size_t size);

  std::size_t size() const { return size_; }
  bool is_power_of_two() const { return bluestein_ == nullptr; }

  void forward(std::span<Complex> data) const;
  void inverse(std::span<Complex> data) const;

 private:
  struct Bluestein {
    std::size_t conv_size = 0;
    std::unique_ptr<FftPlan<T>> conv_plan;
    std::vector<Complex> chirp;           // exp(+i*pi*t^2/N), t < N
    std::vector<Complex> kernel_spectrum; // forward FFT of conj(chirp), wrapped
  };

  void radix2(std::span<Complex> data, const std::vector<Complex>& twiddles) const;
  void bluestein_forward(std::span<Complex> data) const;

  std::size_t size_;
  // Per butterfly stage of half-width h, exp(+-pi*i*j/h) for j < h, stored
  // from offset h - 1.
  std::vector<Complex> forward_twiddles_;
  std::vector<Complex> inverse_twiddles_;
  std::vector<std::uint32_t> bit_reverse_;
  std::shared_ptr<const Bluestein> bluestein_;
};

// Transform of real sequences of even length N through one complex
// transform of length N/2. The spectrum of real input is Hermitian, so only
// bins 0..N/2 are produced and consumed. Same sign and scaling conventions
// as FftPlan.
template <typename T>
class RealFftPlan {
 public:
  using Complex = std::complex<T>;

  explicit RealFftPlan(std::size_t size);

  std::size_t size() const { return size_; }
  std::size_t bins() const { return size_ / 2 + 1; }

  // `out` holds at least bins() values.
  void forward(std::span<const T> in, std::span<Complex> out) const;
  // Consumes (overwrites) `spectrum`, bins() values; writes size() reals.
  void inverse(std::span<Complex> spectrum, std::span<T> out) const;

 private:
  std::size_t size_;
  FftPlan<T> half_;
  std::vector<Complex> twiddles_;  // exp(+2*pi*i*k/N), k <= N/4
};

bool is_power_of_two(std::size_t value);

// Smallest power of two >= value (value >= 1).
std::size_t next_power_of_two(std::size_t value);

extern template class FftPlan<float>;
extern template class FftPlan<double>;
extern template class RealFftPlan<float>;
extern template class RealFftPlan<double>;

}  // namespace tnn

#endif  // TNN_FFT_H_
