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

#ifndef TNN_TOEPLITZ_H_
#define TNN_TOEPLITZ_H_

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "tnn/fft.h"

namespace tnn {

// How an n x n Toeplitz matrix is embedded into a circulant one.
//
// kPaper2n embeds into a 2n circulant with c_n = t_0 (that entry never
// reaches the first n output rows, any value would do). kPaddedPow2 embeds
// into the smallest power of two >= 2n - 1, zero-filling the gap between
// the non-negative and negative offsets.
enum class CirculantStrategy { kPaper2n, kPaddedPow2 };

std::string_view to_string(CirculantStrategy strategy);
// Accepts "paper_2n" / "padded_pow2" (and the short forms "paper2n", "pow2").
CirculantStrategy parse_circulant_strategy(std::string_view name);

// Embedding size for a sequence of `length` tokens.
std::size_t circulant_size(std::size_t length, CirculantStrategy strategy);

// The 2n - 1 generators t_k, k in [-(n-1), n-1], of a per-channel Toeplitz
// matrix T_ij = t_{i-j}. Row k + (n - 1) holds the d channel values of t_k.
template <typename T>
class RelPosCoefficients {
 public:
  RelPosCoefficients(std::size_t length, std::size_t channels);
  RelPosCoefficients(std::size_t length, std::size_t channels,
                     std::vector<T> values);

  std::size_t length() const { return length_; }
  std::size_t channels() const { return channels_; }
  std::size_t rows() const { return 2 * length_ - 1; }
  std::ptrdiff_t max_offset() const {
    return static_cast<std::ptrdiff_t>(length_) - 1;
  }

  std::size_t row_of(std::ptrdiff_t offset) const;
  std::ptrdiff_t offset_of(std::size_t row) const {
    return static_cast<std::ptrdiff_t>(row) - max_offset();
  }

  T& at(std::ptrdiff_t offset, std::size_t channel) {
    return values_[row_of(offset) * channels_ + channel];
  }
  T at(std::ptrdiff_t offset, std::size_t channel) const {
    return values_[row_of(offset) * channels_ + channel];
  }

  std::span<T> values() { return values_; }
  std::span<const T> values() const { return values_; }

  bool operator==(const RelPosCoefficients&) const = default;

 private:
  std::size_t length_;
  std::size_t channels_;
  std::vector<T> values_;
};

// A [length, channels] row-major block of token features.
template <typename T>
class Sequence {
 public:
  Sequence(std::size_t length, std::size_t channels);
  Sequence(std::size_t length, std::size_t channels, std::vector<T> values);

  std::size_t length() const { return length_; }
  std::size_t channels() const { return channels_; }

  T& at(std::size_t i, std::size_t c) { return values_[i * channels_ + c]; }
  T at(std::size_t i, std::size_t c) const { return values_[i * channels_ + c]; }

  std::span<T> values() { return values_; }
  std::span<const T> values() const { return values_; }

  bool operator==(const Sequence&) const = default;

 private:
  std::size_t length_;
  std::size_t channels_;
  std::vector<T> values_;
};

// First column of the circulant embedding, one column per channel.
template <typename T>
struct CirculantSpec {
  std::size_t length = 0;      // n of the embedded Toeplitz matrix
  std::size_t embed_size = 0;  // N
  std::size_t channels = 0;
  CirculantStrategy strategy = CirculantStrategy::kPaddedPow2;
  std::vector<T> first_column;  // [channels][embed_size]

  std::span<const T> column(std::size_t channel) const {
    return std::span<const T>(first_column).subspan(channel * embed_size,
                                                    embed_size);
  }
  // C_rs = c_{(r - s) mod N}
  T entry(std::size_t row, std::size_t col, std::size_t channel) const {
    return first_column[channel * embed_size +
                        (row + embed_size - col) % embed_size];
  }
};

// Non-owning view of `size` elements spaced `stride` apart.
template <typename T>
struct Strided {
  T* data = nullptr;
  std::size_t size = 0;
  std::size_t stride = 1;
  T& operator[](std::size_t i) const { return data[i * stride]; }
};

// Precomputed circulant spectra for one coefficient table. Applying the
// plan costs one forward and one inverse FFT per channel. Immutable and
// shareable; scratch buffers live in the caller's Workspace.
template <typename T>
class ToeplitzPlan {
 public:
  using Complex = std::complex<T>;

  struct Workspace {
    std::vector<T> r;
    std::vector<Complex> a;
    std::vector<Complex> b;
  };

  ToeplitzPlan(const RelPosCoefficients<T>& coeffs, CirculantStrategy strategy);
  explicit ToeplitzPlan(const CirculantSpec<T>& spec);

  std::size_t length() const { return length_; }
  std::size_t channels() const { return channels_; }
  std::size_t embed_size() const { return embed_size_; }
  CirculantStrategy strategy() const { return strategy_; }

  // y = T x on one channel.
  void apply(std::size_t channel, Strided<const T> x, Strided<T> y,
             Workspace& ws) const;
  // y = T^T x on one channel.
  void apply_transpose(std::size_t channel, Strided<const T> x, Strided<T> y,
                       Workspace& ws) const;
  // grad[k] += sum_{i - j = k} g_i x_j for k in [-(n-1), n-1]; `grad` is a
  // strided view over the 2n - 1 coefficient rows of one channel.
  void accumulate_correlation(Strided<const T> g, Strided<const T> x,
                              Strided<T> grad, Workspace& ws) const;

 private:
  void multiply(std::size_t channel, Strided<const T> x, Strided<T> y,
                Workspace& ws, bool conjugate) const;

  std::size_t length_;
  std::size_t channels_;
  CirculantStrategy strategy_;
  // Forward transform of a zero-padded real sequence into ws.a (bins_
  // values), and the inverse of ws.a back into ws.r.
  void transform(Strided<const T> x, std::vector<Complex>& out, Workspace& ws) const;
  void inverse_transform(Workspace& ws) const;

  std::size_t embed_size_;
  std::size_t bins_;                          // N/2 + 1 for even N, else N
  std::shared_ptr<const RealFftPlan<T>> real_;  // even N
  std::shared_ptr<const FftPlan<T>> fft_;       // odd N (n = 1 only)
  std::vector<Complex> spectra_;                // [channels][bins]
};

// Direct O(n^2 d) evaluation of y_i = sum_j t_{i-j} x_j per channel.
template <typename T>
Sequence<T> naive_matvec(const RelPosCoefficients<T>& coeffs,
                         const Sequence<T>& x);

template <typename T>
CirculantSpec<T> build_circulant(const RelPosCoefficients<T>& coeffs,
                                 CirculantStrategy strategy);

// O(n log n d) evaluation of T x through the circulant embedding.
template <typename T>
Sequence<T> fft_matvec(const RelPosCoefficients<T>& coeffs, const Sequence<T>& x,
                       CirculantStrategy strategy = CirculantStrategy::kPaddedPow2);

template <typename T>
struct MatvecGradients {
  Sequence<T> grad_x;
  RelPosCoefficients<T> grad_coeffs;
};

// Reverse-mode pass of y = T x: grad_x = T^T grad_y and
// grad_coeffs[k] = sum_{i - j = k} grad_y_i x_j.
template <typename T>
MatvecGradients<T> matvec_backward(
    const RelPosCoefficients<T>& coeffs, const Sequence<T>& x,
    const Sequence<T>& grad_y,
    CirculantStrategy strategy = CirculantStrategy::kPaddedPow2);

// t'_k = t_{-k}; the generators of T^T.
template <typename T>
RelPosCoefficients<T> transpose_coefficients(const RelPosCoefficients<T>& coeffs);

// Row-major n x n materialization of one channel of T.
template <typename T>
std::vector<T> dense_toeplitz(const RelPosCoefficients<T>& coeffs,
                              std::size_t channel);

namespace fault {

// Test-only sabotage: fft_matvec scales its output by 1.01 for the chosen
// strategy, so the self-test can show it notices a broken kernel. kNone in
// normal operation.
enum class KernelFault { kNone, kPaper2n, kPaddedPow2 };

void set_kernel_fault(KernelFault fault);
KernelFault kernel_fault();

}  // namespace fault

extern template class RelPosCoefficients<float>;
extern template class RelPosCoefficients<double>;
extern template class Sequence<float>;
extern template class Sequence<double>;
extern template class ToeplitzPlan<float>;
extern template class ToeplitzPlan<double>;

}  // namespace tnn

#endif  // TNN_TOEPLITZ_H_
