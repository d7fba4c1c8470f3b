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

#ifndef TNN_CHECKPOINT_H_
#define TNN_CHECKPOINT_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "tnn/model.h"

namespace tnn {

// Checkpoint container:
//
//   bytes 0..7    magic "TNNCKPT\n"
//   bytes 8..15   manifest length M, uint64 little-endian
//   next M bytes  manifest, UTF-8 JSON
//   remainder     blob: every tensor as little-endian IEEE-754 float64,
//                 row-major, in manifest order
//
// The manifest records the format version, model hyperparameters, seed,
// training step, vocabulary, and for each tensor its name, shape, dtype,
// byte offset and size. Offsets tile the blob exactly; a FNV-1a 64-bit
// digest of the blob guards against corruption.
inline constexpr int kCheckpointFormatVersion = 1;

struct CheckpointMetadata {
  std::uint64_t train_step = 0;
  std::size_t train_seq_len = 0;
  std::string vocab_mode = "byte";            // "byte" or "char"
  std::vector<std::uint32_t> vocab_symbols;   // char mode: code point of each id
};

struct LoadedCheckpoint {
  TnnModel model;
  CheckpointMetadata metadata;
};

struct TensorEntry {
  std::string name;
  std::vector<std::size_t> shape;
  std::string dtype;
  std::size_t offset = 0;
  std::size_t nbytes = 0;
};

// Raw serialized form; save_checkpoint writes exactly these bytes.
std::string serialize_checkpoint(const TnnModel& model, const CheckpointMetadata& metadata);
LoadedCheckpoint deserialize_checkpoint(const std::string& bytes);

void save_checkpoint(const TnnModel& model, const CheckpointMetadata& metadata,
                     const std::filesystem::path& path);
LoadedCheckpoint load_checkpoint(const std::filesystem::path& path);

// Tensor index of a serialized checkpoint, for inspection tools.
std::vector<TensorEntry> checkpoint_tensors(const std::string& bytes);

std::uint64_t fnv1a64(const void* data, std::size_t size);

}  // namespace tnn

#endif  // TNN_CHECKPOINT_H_
