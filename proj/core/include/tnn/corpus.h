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

#ifndef TNN_CORPUS_H_
#define TNN_CORPUS_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tnn/model.h"
#include "tnn/random.h"

namespace tnn {

// byte: every byte is a token (vocab 256). char: every UTF-8 code point is
// a token, ids assigned in ascending code point order.
enum class VocabMode { kByte, kChar };

std::string_view to_string(VocabMode mode);
VocabMode parse_vocab_mode(std::string_view name);

// Maps token ids to symbols. Byte mode needs no table.
struct Vocabulary {
  VocabMode mode = VocabMode::kByte;
  std::vector<std::uint32_t> symbols;  // char mode: id -> code point

  std::size_t size() const { return mode == VocabMode::kByte ? 256 : symbols.size(); }
};

struct Corpus {
  Vocabulary vocab;
  std::vector<std::int32_t> tokens;
  std::size_t source_bytes = 0;
};

// Throws InputError for empty input or, in char mode, invalid UTF-8.
Corpus tokenize_text(std::string_view text, VocabMode mode);
// Tokenizes with a fixed vocabulary; unknown symbols raise InputError.
std::vector<std::int32_t> tokenize_with(std::string_view text, const Vocabulary& vocab);
Corpus ingest_corpus(const std::filesystem::path& path, VocabMode mode);

std::string detokenize(std::span<const std::int32_t> tokens, const Vocabulary& vocab);

// Decodes UTF-8 strictly (no overlongs, surrogates or values > 0x10FFFF).
std::vector<std::uint32_t> decode_utf8(std::string_view text);
std::string encode_utf8(std::span<const std::uint32_t> code_points);

inline constexpr double kDefaultValidationFraction = 0.1;

// Contiguous split: the first (1 - f) share of tokens trains, the rest
// validates.
struct CorpusSplit {
  std::vector<std::int32_t> train;
  std::vector<std::int32_t> validation;
};

CorpusSplit split_corpus(std::span<const std::int32_t> tokens,
                         double validation_fraction = kDefaultValidationFraction);

struct CorpusStats {
  std::size_t source_bytes = 0;
  std::size_t tokens = 0;
  std::size_t distinct_tokens = 0;
  std::size_t vocab_size = 0;
  std::size_t train_tokens = 0;
  std::size_t validation_tokens = 0;
  double unigram_entropy_nats = 0.0;  // of the training split
};

CorpusStats corpus_stats(const Corpus& corpus, const CorpusSplit& split);

// `batch` random windows of `length` tokens.
TokenBatch sample_batch(std::span<const std::int32_t> tokens, std::size_t batch,
                        std::size_t length, Rng& rng);

// Consecutive non-overlapping windows of `length` tokens, at most
// `max_windows` of them (0 = all that fit).
std::vector<TokenBatch> evaluation_windows(std::span<const std::int32_t> tokens,
                                           std::size_t length, std::size_t max_windows = 0);

}  // namespace tnn

#endif  // TNN_CORPUS_H_
