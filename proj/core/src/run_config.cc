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

#include "tnn/run_config.h"

#include <charconv>
#include <fstream>
#include <functional>
#include <limits>
#include <set>
#include <sstream>

#include "tnn/errors.h"

namespace tnn {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::size_t to_uint(std::string_view key, std::string_view v) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError("key '" + std::string(key) + "': expected a non-negative integer, got '" +
                      std::string(v) + "'");
  }
  return static_cast<std::size_t>(out);
}

double to_float(std::string_view key, std::string_view v) {
  const std::string s(v);
  char* end = nullptr;
  const double out = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(out)) {
    throw ConfigError("key '" + std::string(key) + "': expected a number, got '" + s + "'");
  }
  return out;
}

bool to_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("key '" + std::string(key) + "': expected true or false, got '" +
                    std::string(v) + "'");
}

template <typename Parse>
auto to_enum(std::string_view key, std::string_view v, Parse parse) {
  try {
    return parse(v);
  } catch (const ConfigError& e) {
    throw ConfigError("key '" + std::string(key) + "': " + e.what());
  }
}

std::string fmt_float(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

std::string fmt_bool(bool v) { return v ? "true" : "false"; }

struct Field {
  ConfigKey key;
  std::function<void(RunConfig&, std::string_view)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define TNN_UINT(name, member, doc)                                                    \
  Field{{name, "uint", "", doc},                                                       \
        [](RunConfig& c, std::string_view v) { c.member = to_uint(name, v); },         \
        [](const RunConfig& c) { return std::to_string(c.member); }}
#define TNN_FLOAT(name, member, doc)                                                   \
  Field{{name, "float", "", doc},                                                      \
        [](RunConfig& c, std::string_view v) { c.member = to_float(name, v); },        \
        [](const RunConfig& c) { return fmt_float(c.member); }}
#define TNN_BOOL(name, member, doc)                                                    \
  Field{{name, "bool", "", doc},                                                       \
        [](RunConfig& c, std::string_view v) { c.member = to_bool(name, v); },         \
        [](const RunConfig& c) { return fmt_bool(c.member); }}
#define TNN_ENUM(name, choices, member, parse, doc)                                    \
  Field{{name, "enum{" choices "}", "", doc},                                          \
        [](RunConfig& c, std::string_view v) { c.member = to_enum(name, v, parse); },  \
        [](const RunConfig& c) { return std::string(to_string(c.member)); }}
#define TNN_PATH(name, member, doc)                                                    \
  Field{{name, "path", "", doc},                                                       \
        [](RunConfig& c, std::string_view v) { c.member = std::string(v); },           \
        [](const RunConfig& c) { return c.member.string(); }}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> f{
        // model
        TNN_ENUM("vocab_mode", "byte|char", vocab_mode, parse_vocab_mode,
                 "byte-level (vocab 256) or UTF-8 code point tokens"),
        TNN_UINT("layers", model.layers, "number of GTU+GLU blocks"),
        TNN_UINT("feature_dim", model.block.feature_dim, "model width d"),
        TNN_UINT("gtu_dim", model.block.gtu_dim, "GTU expansion width e (TNO channels)"),
        TNN_UINT("glu_dim", model.block.glu_dim, "GLU hidden width g"),
        TNN_ENUM("activation", "silu|relu|identity", model.block.activation,
                 parse_activation, "GTU and GLU activation"),
        TNN_ENUM("norm", "layernorm|rmsnorm", model.block.norm, parse_norm,
                 "pre-norm type"),
        TNN_FLOAT("decay", model.block.tno.decay, "exponential decay rate lambda in [0, 1]"),
        TNN_BOOL("learnable_decay", model.block.tno.learnable_decay,
                 "train lambda instead of fixing it"),
        TNN_BOOL("causal", model.block.tno.causal, "mask negative offsets (autoregressive)"),
        TNN_ENUM("strategy", "padded_pow2|paper_2n", model.block.tno.strategy,
                 parse_circulant_strategy, "circulant embedding used by the FFT kernel"),
        TNN_UINT("rpe_layers", model.block.rpe.layers,
                 "RPE depth, counting the output projection"),
        TNN_UINT("rpe_hidden_dim", model.block.rpe.hidden_dim, "RPE hidden width"),
        TNN_ENUM("rpe_activation", "relu|silu", model.block.rpe.activation, parse_activation,
                 "RPE hidden activation"),
        TNN_ENUM("rpe_input", "raw|normalized|sincos", model.block.rpe.input_mode,
                 parse_rpe_input_mode, "RPE input encoding of the relative offset"),
        TNN_BOOL("share_rpe", model.share_rpe, "one RPE shared by every block"),
        TNN_BOOL("tie_embeddings", model.tie_embeddings,
                 "reuse the embedding as output projection"),
        // training
        TNN_UINT("seq_len", seq_len, "training sequence length"),
        TNN_UINT("batch_size", batch_size, "sequences per step"),
        TNN_UINT("steps", steps, "optimizer steps"),
        TNN_FLOAT("lr", adam.peak_lr, "peak learning rate"),
        TNN_UINT("warmup_steps", adam.warmup_steps, "linear warmup before inverse-sqrt decay"),
        TNN_FLOAT("beta1", adam.beta1, "Adam beta1"),
        TNN_FLOAT("beta2", adam.beta2, "Adam beta2"),
        TNN_FLOAT("adam_eps", adam.epsilon, "Adam epsilon"),
        TNN_FLOAT("weight_decay", adam.weight_decay, "decoupled weight decay"),
        TNN_FLOAT("grad_clip", adam.grad_clip, "global gradient norm clip, 0 disables"),
        TNN_UINT("eval_every", eval_every, "validation interval in steps, 0 disables"),
        TNN_UINT("eval_windows", eval_windows,
                 "validation windows per periodic evaluation, 0 = all"),
        TNN_UINT("log_every", log_every, "training metrics interval in steps"),
        TNN_UINT("checkpoint_every", checkpoint_every,
                 "checkpoint interval in steps, 0 = only at the end"),
        TNN_FLOAT("val_fraction", val_fraction, "trailing share of the corpus held out"),
        TNN_UINT("seed", seed, "seed for initialization and batch sampling"),
        TNN_ENUM("precision", "f64|f32", precision, parse_precision,
                 "kernel precision (model training runs in f64)"),
        TNN_BOOL("deterministic", deterministic,
                 "single-threaded, wall times recorded as 0"),
        // paths
        TNN_PATH("corpus", corpus, "training text file"),
        TNN_PATH("checkpoint", checkpoint, "checkpoint output path"),
        TNN_PATH("metrics", metrics, "newline-delimited JSON metrics path"),
    };
    const RunConfig defaults;
    for (auto& field : f) field.key.default_value = field.get(defaults);
    return f;
  }();
  return table;
}

#undef TNN_UINT
#undef TNN_FLOAT
#undef TNN_BOOL
#undef TNN_ENUM
#undef TNN_PATH

const Field& find_field(std::string_view key) {
  for (const auto& f : fields()) {
    if (f.key.name == key) return f;
  }
  throw ConfigError("unknown config key '" + std::string(key) + "'");
}

}  // namespace

std::string_view to_string(Precision precision) {
  return precision == Precision::kF32 ? "f32" : "f64";
}

Precision parse_precision(std::string_view name) {
  if (name == "f32") return Precision::kF32;
  if (name == "f64") return Precision::kF64;
  throw ConfigError("unknown precision '" + std::string(name) + "' (expected f32 or f64)");
}

void RunConfig::validate() const {
  ModelConfig m = model;
  m.vocab_size = 1;
  m.validate();
  adam.validate();
  if (seq_len < 2) throw ConfigError("seq_len must be >= 2");
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (log_every < 1) throw ConfigError("log_every must be >= 1");
  if (!(val_fraction > 0.0 && val_fraction < 1.0)) {
    throw ConfigError("val_fraction must lie in (0, 1)");
  }
}

const std::vector<ConfigKey>& run_config_schema() {
  static const std::vector<ConfigKey> schema = [] {
    std::vector<ConfigKey> keys;
    for (const auto& f : fields()) keys.push_back(f.key);
    return keys;
  }();
  return schema;
}

void set_config_value(RunConfig& config, std::string_view key, std::string_view value) {
  find_field(key).set(config, value);
}

std::string get_config_value(const RunConfig& config, std::string_view key) {
  return find_field(key).get(config);
}

RunConfig parse_run_config(std::string_view text) {
  RunConfig config;
  std::set<std::string, std::less<>> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = text.find('\n', pos);
    std::string_view line =
        text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
    pos = end == std::string_view::npos ? text.size() + 1 : end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (!seen.insert(std::string(key)).second) {
      throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" +
                        std::string(key) + "'");
    }
    try {
      set_config_value(config, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  config.validate();
  return config;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_run_config(buffer.str());
}

std::string format_run_config(const RunConfig& config) {
  std::string out;
  for (const auto& f : fields()) out += f.key.name + " = " + f.get(config) + "\n";
  return out;
}

}  // namespace tnn
