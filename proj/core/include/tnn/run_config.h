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

#ifndef TNN_RUN_CONFIG_H_
#define TNN_RUN_CONFIG_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "tnn/corpus.h"
#include "tnn/model.h"
#include "tnn/optimizer.h"

namespace tnn {

enum class Precision { kF32, kF64 };

std::string_view to_string(Precision precision);
Precision parse_precision(std::string_view name);

// Complete hyperparameter set for a run. Serialized as a flat key-value
// document, one `key = value` per line, `#` starting a comment:
//
//   # desk-scale language model
//   feature_dim = 64
//   decay = 0.99
//   corpus = data/tiny.txt
//
// Keys are validated against run_config_schema(); unknown or repeated keys
// are rejected.
struct RunConfig {
  ModelConfig model;
  VocabMode vocab_mode = VocabMode::kByte;

  std::size_t seq_len = 128;
  std::size_t batch_size = 8;
  std::size_t steps = 2000;
  AdamConfig adam;
  std::size_t eval_every = 250;
  std::size_t eval_windows = 16;
  std::size_t log_every = 50;
  std::size_t checkpoint_every = 500;
  double val_fraction = kDefaultValidationFraction;

  std::uint64_t seed = 1234;
  Precision precision = Precision::kF64;
  bool deterministic = false;

  std::filesystem::path corpus;
  std::filesystem::path checkpoint = "tnn.ckpt";
  std::filesystem::path metrics = "metrics.jsonl";

  void validate() const;
};

struct ConfigKey {
  std::string name;
  std::string type;  // uint, float, bool, string, path, or enum{a|b|c}
  std::string default_value;
  std::string description;
};

const std::vector<ConfigKey>& run_config_schema();

// Applies one key; throws ConfigError for unknown keys or bad values.
void set_config_value(RunConfig& config, std::string_view key, std::string_view value);
std::string get_config_value(const RunConfig& config, std::string_view key);

RunConfig parse_run_config(std::string_view text);
RunConfig load_run_config(const std::filesystem::path& path);
// Every schema key in schema order; parse_run_config(format(c)) == c.
std::string format_run_config(const RunConfig& config);

}  // namespace tnn

#endif  // TNN_RUN_CONFIG_H_
