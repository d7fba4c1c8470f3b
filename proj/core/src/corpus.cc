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

#include "tnn/corpus.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "tnn/errors.h"

namespace tnn {

std::string_view to_string(VocabMode mode) {
  return mode == VocabMode::kByte ? "byte" : "char";
}

VocabMode parse_vocab_mode(std::string_view name) {
  if (name == "byte") return VocabMode::kByte;
  if (name == "char") return VocabMode::kChar;
  throw ConfigError("unknown vocab mode '" + std::string(name) + "'");
}

std::vector<std::uint32_t> decode_utf8(std::string_view text) {
  std::vector<std::uint32_t> out;
  out.reserve(text.size());
  std::size_t i = 0;
  auto fail = [&](const char* why) {
    throw InputError("invalid UTF-8 at byte " + std::to_string(i) + ": " + why);
  };
  while (i < text.size()) {
    const auto lead = static_cast<unsigned char>(text[i]);
    std::size_t extra = 0;
    std::uint32_t cp = 0;
    std::uint32_t min = 0;
    if (lead < 0x80) {
      cp = lead;
    } else if ((lead & 0xe0) == 0xc0) {
      extra = 1, cp = lead & 0x1f, min = 0x80;
    } else if ((lead & 0xf0) == 0xe0) {
      extra = 2, cp = lead & 0x0f, min = 0x800;
    } else if ((lead & 0xf8) == 0xf0) {
      extra = 3, cp = lead & 0x07, min = 0x10000;
    } else {
      fail("bad lead byte");
    }
    if (extra > 0 && i + extra >= text.size()) fail("truncated sequence");
    for (std::size_t k = 1; k <= extra; ++k) {
      const auto cont = static_cast<unsigned char>(text[i + k]);
      if ((cont & 0xc0) != 0x80) fail("bad continuation byte");
      cp = (cp << 6) | (cont & 0x3f);
    }
    if (extra > 0 && cp < min) fail("overlong encoding");
    if (cp > 0x10ffff || (cp >= 0xd800 && cp <= 0xdfff)) fail("invalid code point");
    out.push_back(cp);
    i += extra + 1;
  }
  return out;
}

std::string encode_utf8(std::span<const std::uint32_t> code_points) {
  std::string out;
  for (std::uint32_t cp : code_points) {
    if (cp < 0x80) {
      out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
      out.push_back(static_cast<char>(0xc0 | (cp >> 6)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
    } else if (cp < 0x10000) {
      out.push_back(static_cast<char>(0xe0 | (cp >> 12)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
    } else {
      out.push_back(static_cast<char>(0xf0 | (cp >> 18)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3f)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
    }
  }
  return out;
}

Corpus tokenize_text(std::string_view text, VocabMode mode) {
  if (text.empty()) throw InputError("corpus is empty");
  Corpus corpus;
  corpus.vocab.mode = mode;
  corpus.source_bytes = text.size();
  if (mode == VocabMode::kByte) {
    corpus.tokens.reserve(text.size());
    for (char ch : text) corpus.tokens.push_back(static_cast<unsigned char>(ch));
    return corpus;
  }
  const auto code_points = decode_utf8(text);
  corpus.vocab.symbols = code_points;
  std::sort(corpus.vocab.symbols.begin(), corpus.vocab.symbols.end());
  corpus.vocab.symbols.erase(
      std::unique(corpus.vocab.symbols.begin(), corpus.vocab.symbols.end()),
      corpus.vocab.symbols.end());
  corpus.tokens = tokenize_with(text, corpus.vocab);
  return corpus;
}

std::vector<std::int32_t> tokenize_with(std::string_view text, const Vocabulary& vocab) {
  std::vector<std::int32_t> tokens;
  if (vocab.mode == VocabMode::kByte) {
    tokens.reserve(text.size());
    for (char ch : text) tokens.push_back(static_cast<unsigned char>(ch));
    return tokens;
  }
  for (std::uint32_t cp : decode_utf8(text)) {
    const auto it = std::lower_bound(vocab.symbols.begin(), vocab.symbols.end(), cp);
    if (it == vocab.symbols.end() || *it != cp) {
      throw InputError("code point U+" + std::to_string(cp) + " is not in the vocabulary");
    }
    tokens.push_back(static_cast<std::int32_t>(it - vocab.symbols.begin()));
  }
  return tokens;
}

Corpus ingest_corpus(const std::filesystem::path& path, VocabMode mode) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read corpus " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return tokenize_text(buffer.str(), mode);
}

std::string detokenize(std::span<const std::int32_t> tokens, const Vocabulary& vocab) {
  if (vocab.mode == VocabMode::kByte) {
    std::string out;
    out.reserve(tokens.size());
    for (auto t : tokens) {
      if (t < 0 || t > 255) throw RangeError("byte token out of range");
      out.push_back(static_cast<char>(static_cast<unsigned char>(t)));
    }
    return out;
  }
  std::vector<std::uint32_t> cps;
  cps.reserve(tokens.size());
  for (auto t : tokens) {
    if (t < 0 || static_cast<std::size_t>(t) >= vocab.symbols.size()) {
      throw RangeError("char token out of range");
    }
    cps.push_back(vocab.symbols[static_cast<std::size_t>(t)]);
  }
  return encode_utf8(cps);
}

CorpusSplit split_corpus(std::span<const std::int32_t> tokens, double validation_fraction) {
  if (!(validation_fraction > 0.0 && validation_fraction < 1.0)) {
    throw ConfigError("validation fraction must lie in (0, 1)");
  }
  const auto train_len = static_cast<std::size_t>(
      std::floor(static_cast<double>(tokens.size()) * (1.0 - validation_fraction)));
  CorpusSplit split;
  split.train.assign(tokens.begin(), tokens.begin() + static_cast<std::ptrdiff_t>(train_len));
  split.validation.assign(tokens.begin() + static_cast<std::ptrdiff_t>(train_len), tokens.end());
  return split;
}

CorpusStats corpus_stats(const Corpus& corpus, const CorpusSplit& split) {
  CorpusStats stats;
  stats.source_bytes = corpus.source_bytes;
  stats.tokens = corpus.tokens.size();
  stats.vocab_size = corpus.vocab.size();
  stats.train_tokens = split.train.size();
  stats.validation_tokens = split.validation.size();
  std::map<std::int32_t, std::size_t> all;
  for (auto t : corpus.tokens) ++all[t];
  stats.distinct_tokens = all.size();
  std::map<std::int32_t, std::size_t> train;
  for (auto t : split.train) ++train[t];
  const double total = static_cast<double>(split.train.size());
  for (const auto& [token, count] : train) {
    const double p = static_cast<double>(count) / total;
    stats.unigram_entropy_nats -= p * std::log(p);
  }
  return stats;
}

TokenBatch sample_batch(std::span<const std::int32_t> tokens, std::size_t batch,
                        std::size_t length, Rng& rng) {
  if (tokens.size() < length || length == 0 || batch == 0) {
    throw DimensionError("sample_batch: need at least " + std::to_string(length) +
                         " tokens, have " + std::to_string(tokens.size()));
  }
  TokenBatch out{batch, length, {}};
  out.tokens.reserve(batch * length);
  const std::size_t starts = tokens.size() - length + 1;
  for (std::size_t b = 0; b < batch; ++b) {
    const std::size_t start = rng.below(starts);
    out.tokens.insert(out.tokens.end(), tokens.begin() + static_cast<std::ptrdiff_t>(start),
                      tokens.begin() + static_cast<std::ptrdiff_t>(start + length));
  }
  return out;
}

std::vector<TokenBatch> evaluation_windows(std::span<const std::int32_t> tokens,
                                           std::size_t length, std::size_t max_windows) {
  if (length == 0) throw DimensionError("evaluation_windows: length must be positive");
  std::vector<TokenBatch> out;
  for (std::size_t start = 0; start + length <= tokens.size(); start += length) {
    if (max_windows > 0 && out.size() >= max_windows) break;
    out.push_back(TokenBatch{
        1, length,
        std::vector<std::int32_t>(tokens.begin() + static_cast<std::ptrdiff_t>(start),
                                  tokens.begin() + static_cast<std::ptrdiff_t>(start + length))});
  }
  return out;
}

}  // namespace tnn
