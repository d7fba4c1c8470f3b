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


#include "tnn/bench.h"

#include <cmath>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "tnn/errors.h"
#include "tnn/toeplitz.h"

namespace tnn {
namespace {

BenchOptions quick_options() {
  BenchOptions o;
  o.min_n = 16;
  o.max_n = 64;
  o.d = 4;
  o.trials = kMinBenchTrials;
  o.warmup = 1;
  return o;
}

TEST(BenchTest, RecordsEverySizeAndMethod) {
  const auto records = run_bench(quick_options());
  ASSERT_EQ(records.size(), 9u);
  for (const auto& r : records) {
    EXPECT_EQ(r.status, "ok") << to_string(r.method) << " n=" << r.n;
    ASSERT_TRUE(r.median_seconds.has_value());
    EXPECT_GT(*r.median_seconds, 0.0);
    EXPECT_EQ(r.doubling_ratio.has_value(), r.n > 16);
  }
}

TEST(BenchTest, ChecksumsAgreeAcrossMethods) {
  const auto records = run_bench(quick_options());
  for (const auto& r : records) {
    for (const auto& s : records) {
      if (r.n == s.n) EXPECT_NEAR(r.checksum, s.checksum, 1e-9 * (1.0 + std::abs(r.checksum)));
    }
  }
}

TEST(BenchTest, FaultyKernelFailsVerificationAndIsNotTimed) {
  fault::set_kernel_fault(fault::KernelFault::kPaper2n);
  const auto records = run_bench(quick_options());
  fault::set_kernel_fault(fault::KernelFault::kNone);
  for (const auto& r : records) {
    if (r.method == BenchMethod::kFftPaper2n) {
      EXPECT_EQ(r.status, "failed");
      EXPECT_FALSE(r.median_seconds.has_value());
    } else {
      EXPECT_EQ(r.status, "ok");
    }
  }
}

TEST(BenchTest, NaiveTimeLimitSkipsLargeNaiveTiming) {
  BenchOptions o = quick_options();
  o.naive_time_limit_n = 32;
  for (const auto& r : run_bench(o)) {
    if (r.method == BenchMethod::kNaive && r.n > 32) {
      EXPECT_FALSE(r.median_seconds.has_value());
    } else {
      EXPECT_TRUE(r.median_seconds.has_value());
    }
  }
}

TEST(BenchTest, CsvLayout) {
  BenchOptions o = quick_options();
  o.max_n = 32;
  o.methods = {BenchMethod::kFftPow2};
  std::ostringstream out;
  write_bench_csv(run_bench(o), out);
  std::istringstream in(out.str());
  std::string header, first, second, extra;
  std::getline(in, header);
  std::getline(in, first);
  std::getline(in, second);
  EXPECT_EQ(header, "method,n,d,trials,median_seconds,doubling_ratio,checksum,status");
  EXPECT_EQ(first.rfind("fft_pow2,16,4,5,", 0), 0u) << first;
  EXPECT_NE(first.find(",-,"), std::string::npos) << first;
  EXPECT_EQ(second.rfind("fft_pow2,32,4,5,", 0), 0u) << second;
  EXPECT_FALSE(std::getline(in, extra));
}

TEST(BenchTest, FloatPrecisionRuns) {
  BenchOptions o = quick_options();
  o.precision = Precision::kF32;
  for (const auto& r : run_bench(o)) EXPECT_EQ(r.status, "ok");
}

TEST(BenchTest, InvalidOptions) {
  BenchOptions o = quick_options();
  o.trials = kMinBenchTrials - 1;
  EXPECT_THROW(o.validate(), ConfigError);
  o = quick_options();
  o.min_n = 8;
  EXPECT_THROW(o.validate(), ConfigError);
  o = quick_options();
  o.max_n = 8;
  EXPECT_THROW(o.validate(), ConfigError);
  EXPECT_THROW(parse_bench_method("fast"), ConfigError);
  EXPECT_EQ(parse_bench_method("fft_paper2n"), BenchMethod::kFftPaper2n);
}

}  // namespace
}  // namespace tnn
