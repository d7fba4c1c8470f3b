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

#ifndef TNN_SELFTEST_H_
#define TNN_SELFTEST_H_

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "tnn/model.h"
#include "tnn/toeplitz.h"

namespace tnn {

struct PropertyResult {
  std::string module;
  std::string name;
  std::string status;  // pass | fail | skip
  std::string detail;
  double seconds = 0.0;
};

struct SelftestOptions {
  bool timing = true;  // the scaling property takes about a minute
  fault::KernelFault fault = fault::KernelFault::kNone;
  std::uint64_t seed = 2024;
};

// The model used by the end-to-end gradient check: L=1, d=4, e=8, g=4,
// vocab 5, causal, learnable decay.
ModelConfig gradient_check_config();

// Runs every property; a failing property never stops the run. `progress`
// receives one line per property as it finishes.
std::vector<PropertyResult> run_selftest(const SelftestOptions& options,
                                         std::ostream* progress = nullptr);

void print_selftest_table(const std::vector<PropertyResult>& results, std::ostream& out);

bool all_passed(const std::vector<PropertyResult>& results);

}  // namespace tnn

#endif  // TNN_SELFTEST_H_
