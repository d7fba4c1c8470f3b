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

#include "tnn/checkpoint.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "json.hpp"
#include "tnn/errors.h"

namespace tnn {
namespace {

using nlohmann::json;

constexpr char kMagic[8] = {'T', 'N', 'N', 'C', 'K', 'P', 'T', '\n'};

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint64_t get_u64(const char* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) {
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(p[i])) << (8 * i);
  }
  return v;
}

std::string hex64(std::uint64_t v) {
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << v;
  return s.str();
}

json config_to_json(const ModelConfig& c) {
  const BlockConfig& b = c.block;
  return json{
      {"vocab_size", c.vocab_size},
      {"layers", c.layers},
      {"share_rpe", c.share_rpe},
      {"tie_embeddings", c.tie_embeddings},
      {"feature_dim", b.feature_dim},
      {"gtu_dim", b.gtu_dim},
      {"glu_dim", b.glu_dim},
      {"activation", std::string(to_string(b.activation))},
      {"norm", std::string(to_string(b.norm))},
      {"decay", b.tno.decay},
      {"causal", b.tno.causal},
      {"strategy", std::string(to_string(b.tno.strategy))},
      {"learnable_decay", b.tno.learnable_decay},
      {"rpe_layers", b.rpe.layers},
      {"rpe_hidden_dim", b.rpe.hidden_dim},
      {"rpe_activation", std::string(to_string(b.rpe.activation))},
      {"rpe_input", std::string(to_string(b.rpe.input_mode))},
  };
}

ModelConfig config_from_json(const json& j) {
  ModelConfig c;
  c.vocab_size = j.at("vocab_size").get<std::size_t>();
  c.layers = j.at("layers").get<std::size_t>();
  c.share_rpe = j.at("share_rpe").get<bool>();
  c.tie_embeddings = j.at("tie_embeddings").get<bool>();
  BlockConfig& b = c.block;
  b.feature_dim = j.at("feature_dim").get<std::size_t>();
  b.gtu_dim = j.at("gtu_dim").get<std::size_t>();
  b.glu_dim = j.at("glu_dim").get<std::size_t>();
  b.activation = parse_activation(j.at("activation").get<std::string>());
  b.norm = parse_norm(j.at("norm").get<std::string>());
  b.tno.decay = j.at("decay").get<double>();
  b.tno.causal = j.at("causal").get<bool>();
  b.tno.strategy = parse_circulant_strategy(j.at("strategy").get<std::string>());
  b.tno.learnable_decay = j.at("learnable_decay").get<bool>();
  b.rpe.layers = j.at("rpe_layers").get<std::size_t>();
  b.rpe.hidden_dim = j.at("rpe_hidden_dim").get<std::size_t>();
  b.rpe.out_dim = b.gtu_dim;
  b.rpe.activation = parse_activation(j.at("rpe_activation").get<std::string>());
  b.rpe.input_mode = parse_rpe_input_mode(j.at("rpe_input").get<std::string>());
  return c;
}

struct ParsedContainer {
  json manifest;
  std::string_view blob;
};

ParsedContainer parse_container(const std::string& bytes) {
  if (bytes.size() < 16 || std::memcmp(bytes.data(), kMagic, 8) != 0) {
    throw CorruptionError("checkpoint: missing magic header");
  }
  const std::uint64_t manifest_len = get_u64(bytes.data() + 8);
  if (manifest_len > bytes.size() - 16) {
    throw CorruptionError("checkpoint: manifest length exceeds file size");
  }
  ParsedContainer out;
  try {
    out.manifest = json::parse(bytes.begin() + 16,
                               bytes.begin() + 16 + static_cast<std::ptrdiff_t>(manifest_len));
  } catch (const json::exception& e) {
    throw CorruptionError(std::string("checkpoint: corrupt manifest: ") + e.what());
  }
  out.blob = std::string_view(bytes).substr(16 + manifest_len);

  if (!out.manifest.is_object() || out.manifest.value("format", "") != "tnn-checkpoint") {
    throw CorruptionError("checkpoint: manifest is not a tnn-checkpoint");
  }
  const int version = out.manifest.value("format_version", -1);
  if (version != kCheckpointFormatVersion) {
    throw VersionError("checkpoint: format version " + std::to_string(version) +
                       ", this build reads version " +
                       std::to_string(kCheckpointFormatVersion));
  }
  const std::size_t blob_bytes = out.manifest.at("blob_bytes").get<std::size_t>();
  if (out.blob.size() != blob_bytes) {
    throw CorruptionError("checkpoint: blob is " + std::to_string(out.blob.size()) +
                          " bytes, manifest declares " + std::to_string(blob_bytes));
  }
  if (out.manifest.at("blob_fnv1a64").get<std::string>() !=
      hex64(fnv1a64(out.blob.data(), out.blob.size()))) {
    throw CorruptionError("checkpoint: blob digest mismatch");
  }
  return out;
}

std::vector<TensorEntry> tensor_index(const json& manifest) {
  std::vector<TensorEntry> entries;
  for (const auto& t : manifest.at("tensors")) {
    TensorEntry e;
    e.name = t.at("name").get<std::string>();
    e.shape = t.at("shape").get<std::vector<std::size_t>>();
    e.dtype = t.at("dtype").get<std::string>();
    e.offset = t.at("offset").get<std::size_t>();
    e.nbytes = t.at("nbytes").get<std::size_t>();
    entries.push_back(std::move(e));
  }
  return entries;
}

}  // namespace

std::uint64_t fnv1a64(const void* data, std::size_t size) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i < size; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string serialize_checkpoint(const TnnModel& model, const CheckpointMetadata& metadata) {
  std::string blob;
  json tensors = json::array();
  model.for_each_parameter([&](const std::string& name, const Matrix& m) {
    const std::size_t offset = blob.size();
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      put_u64(blob, std::bit_cast<std::uint64_t>(m.data()[i]));
    }
    tensors.push_back(json{{"name", name},
                           {"shape", {m.rows(), m.cols()}},
                           {"dtype", "f64"},
                           {"offset", offset},
                           {"nbytes", blob.size() - offset}});
  });

  json manifest{
      {"format", "tnn-checkpoint"},
      {"format_version", kCheckpointFormatVersion},
      {"model", config_to_json(model.config())},
      {"seed", model.seed()},
      {"train_step", metadata.train_step},
      {"train_seq_len", metadata.train_seq_len},
      {"vocab_mode", metadata.vocab_mode},
      {"vocab_symbols", metadata.vocab_symbols},
      {"tensors", tensors},
      {"blob_bytes", blob.size()},
      {"blob_fnv1a64", hex64(fnv1a64(blob.data(), blob.size()))},
  };
  const std::string text = manifest.dump(1);

  std::string out(kMagic, 8);
  put_u64(out, text.size());
  out += text;
  out += blob;
  return out;
}

LoadedCheckpoint deserialize_checkpoint(const std::string& bytes) {
  const ParsedContainer parsed = parse_container(bytes);
  const json& manifest = parsed.manifest;

  ModelConfig config;
  try {
    config = config_from_json(manifest.at("model"));
  } catch (const json::exception& e) {
    throw CorruptionError(std::string("checkpoint: bad model section: ") + e.what());
  }
  TnnModel model(config, manifest.at("seed").get<std::uint64_t>());

  const auto entries = tensor_index(manifest);
  std::size_t index = 0;
  std::size_t expected_offset = 0;
  model.for_each_parameter([&](const std::string& name, Matrix& m) {
    if (index >= entries.size()) {
      throw CorruptionError("checkpoint: tensor '" + name + "' missing from manifest");
    }
    const TensorEntry& e = entries[index++];
    const std::vector<std::size_t> shape{static_cast<std::size_t>(m.rows()),
                                         static_cast<std::size_t>(m.cols())};
    if (e.name != name) {
      throw CorruptionError("checkpoint: expected tensor '" + name + "', found '" + e.name + "'");
    }
    if (e.shape != shape) {
      throw DimensionError("checkpoint: tensor '" + name + "' has a shape mismatch");
    }
    if (e.dtype != "f64" || e.nbytes != 8 * static_cast<std::size_t>(m.size()) ||
        e.offset != expected_offset) {
      throw CorruptionError("checkpoint: tensor '" + name + "' has an inconsistent layout");
    }
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      m.data()[i] = std::bit_cast<double>(get_u64(parsed.blob.data() + e.offset + 8 * i));
    }
    expected_offset += e.nbytes;
  });
  if (index != entries.size() || expected_offset != parsed.blob.size()) {
    throw CorruptionError("checkpoint: manifest tensors do not tile the blob");
  }
  for (auto& block : model.blocks()) block.tno.invalidate_cache();

  CheckpointMetadata metadata;
  metadata.train_step = manifest.value("train_step", std::uint64_t{0});
  metadata.train_seq_len = manifest.value("train_seq_len", std::size_t{0});
  metadata.vocab_mode = manifest.value("vocab_mode", std::string("byte"));
  metadata.vocab_symbols =
      manifest.value("vocab_symbols", std::vector<std::uint32_t>{});
  return LoadedCheckpoint{std::move(model), std::move(metadata)};
}

void save_checkpoint(const TnnModel& model, const CheckpointMetadata& metadata,
                     const std::filesystem::path& path) {
  const std::string bytes = serialize_checkpoint(model, metadata);
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot open " + tmp.string() + " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw InputError("failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

LoadedCheckpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open checkpoint " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return deserialize_checkpoint(buffer.str());
}

std::vector<TensorEntry> checkpoint_tensors(const std::string& bytes) {
  return tensor_index(parse_container(bytes).manifest);
}

}  // namespace tnn
