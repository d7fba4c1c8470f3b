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

#include <string>

#include <gtest/gtest.h>

#include "support/synthetic_corpus.h"
#include "tnn/errors.h"

namespace tnn {
namespace {

ModelConfig small_config() {
  ModelConfig c;
  c.vocab_size = 11;
  c.layers = 2;
  c.block.feature_dim = 6;
  c.block.gtu_dim = 12;
  c.block.glu_dim = 6;
  c.block.tno.learnable_decay = true;
  c.block.rpe = RpeConfig{.layers = 2, .hidden_dim = 5, .out_dim = 12};
  return c;
}

CheckpointMetadata metadata() {
  CheckpointMetadata m;
  m.train_step = 17;
  m.train_seq_len = 32;
  m.vocab_mode = "char";
  m.vocab_symbols = {97, 98, 99, 100, 101, 102, 103, 104, 105, 106, 0x263A};
  return m;
}

const TokenBatch kTokens{1, 9, {0, 3, 10, 2, 2, 7, 1, 9, 4}};

TEST(Fnv1aTest, KnownDigests) {
  EXPECT_EQ(fnv1a64("", 0), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a", 1), 0xaf63dc4c8601ec8cULL);
}

TEST(CheckpointTest, SaveLoadSaveIsByteIdentical) {
  const TnnModel model(small_config(), 5);
  const std::string first = serialize_checkpoint(model, metadata());
  const LoadedCheckpoint loaded = deserialize_checkpoint(first);
  EXPECT_EQ(serialize_checkpoint(loaded.model, loaded.metadata), first);
  EXPECT_EQ(loaded.metadata.train_step, 17u);
  EXPECT_EQ(loaded.metadata.vocab_symbols, metadata().vocab_symbols);
}

TEST(CheckpointTest, LoadedLogitsAreBitEqual) {
  const TnnModel model(small_config(), 6);
  const LoadedCheckpoint loaded = deserialize_checkpoint(serialize_checkpoint(model, metadata()));
  EXPECT_EQ(model_forward(loaded.model, kTokens), model_forward(model, kTokens));
  EXPECT_EQ(loaded.model.parameter_names(), model.parameter_names());
}

TEST(CheckpointTest, FileRoundTrip) {
  testing::ScratchDir dir("ckpt");
  const TnnModel model(small_config(), 7);
  save_checkpoint(model, metadata(), dir / "m.ckpt");
  const LoadedCheckpoint loaded = load_checkpoint(dir / "m.ckpt");
  EXPECT_EQ(model_forward(loaded.model, kTokens), model_forward(model, kTokens));
  EXPECT_THROW(load_checkpoint(dir / "missing.ckpt"), InputError);
}

TEST(CheckpointTest, ManifestListsEveryTensor) {
  const TnnModel model(small_config(), 8);
  const auto entries = checkpoint_tensors(serialize_checkpoint(model, metadata()));
  const auto names = model.parameter_names();
  ASSERT_EQ(entries.size(), names.size());
  std::size_t offset = 0;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    EXPECT_EQ(entries[i].name, names[i]);
    EXPECT_EQ(entries[i].offset, offset);
    offset += entries[i].nbytes;
  }
}

TEST(CheckpointTest, TruncationIsCorruption) {
  const std::string bytes = serialize_checkpoint(TnnModel(small_config(), 9), metadata());
  for (std::size_t keep : {std::size_t{0}, std::size_t{10}, bytes.size() / 2, bytes.size() - 1}) {
    EXPECT_THROW(deserialize_checkpoint(bytes.substr(0, keep)), CorruptionError) << keep;
  }
}

TEST(CheckpointTest, FlippedBlobByteIsCorruption) {
  std::string bytes = serialize_checkpoint(TnnModel(small_config(), 10), metadata());
  bytes[bytes.size() - 3] ^= 0x40;
  EXPECT_THROW(deserialize_checkpoint(bytes), CorruptionError);
}

TEST(CheckpointTest, BadMagicIsCorruption) {
  std::string bytes = serialize_checkpoint(TnnModel(small_config(), 11), metadata());
  bytes[0] = 'X';
  EXPECT_THROW(deserialize_checkpoint(bytes), CorruptionError);
}

TEST(CheckpointTest, FutureVersionIsRejected) {
  std::string bytes = serialize_checkpoint(TnnModel(small_config(), 12), metadata());
  const std::string key = "\"format_version\": " + std::to_string(kCheckpointFormatVersion);
  const auto at = bytes.find(key);
  ASSERT_NE(at, std::string::npos);
  bytes[at + key.size() - 1] = '9';
  EXPECT_THROW(deserialize_checkpoint(bytes), VersionError);
}

}  // namespace
}  // namespace tnn
