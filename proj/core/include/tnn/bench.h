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

#ifndef TNN_BENCH_H_
#define TNN_BENCH_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "tnn/run_config.h"

namespace tnn {

enum class BenchMethod { kNaive, kFftPaper2n, kFftPow2 };

std::string_view to_string(BenchMethod method);
BenchMethod parse_bench_method(std::string_view name);

// One timing measurement. A timing is only present when the output of the
// timed method matched the naive oracle at that size.
struct BenchRecord {
  BenchMethod method = BenchMethod::kNaive;
  std::size_t n = 0;
  std::size_t d = 0;
  std::size_t trials = 0;
  std::optional<double> median_seconds;
  std::optional<double> doubling_ratio;  // median(n) / median(n / 2)
  double checksum = 0.0;                 // sum of every output entry
  std::string status;                    // ok | failed | skipped
};

struct BenchOptions {
  std::size_t min_n = 16;
  std::size_t max_n = 4096;
  std::size_t d = 64;
  std::size_t trials = 20;
  std::size_t warmup = 2;
  Precision precision = Precision::kF64;
  std::uint64_t seed = 7;
  std::vector<BenchMethod> methods{BenchMethod::kNaive, BenchMethod::kFftPaper2n,
                                   BenchMethod::kFftPow2};
  // Sizes above this are verified against the oracle but the naive method
  // itself is not timed (0 = no limit).
  std::size_t naive_time_limit_n = 0;

  void validate() const;
};

inline constexpr std::size_t kMinBenchTrials = 5;

// Geometric sweep n = min_n, 2 min_n, ... <= max_n.
std::vector<BenchRecord> run_bench(const BenchOptions& options);

// Header: method,n,d,trials,median_seconds,doubling_ratio,checksum,status
// Missing values are written as "-".
void write_bench_csv(const std::vector<BenchRecord>& records, std::ostream& out);

}  // namespace tnn

#endif  // TNN_BENCH_H_
