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

#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "support/oracles.h"
#include "support/synthetic_corpus.h"
#include "tnn/errors.h"

namespace tnn {
namespace {

TEST(CorpusTest, ByteTokens) {
  const Corpus c = tokenize_text("abab", VocabMode::kByte);
  EXPECT_EQ(c.tokens, (std::vector<std::int32_t>{97, 98, 97, 98}));
  EXPECT_EQ(c.vocab.size(), 256u);
  EXPECT_EQ(c.source_bytes, 4u);
}

TEST(CorpusTest, EmptyCorpusRejected) {
  EXPECT_THROW(tokenize_text("", VocabMode::kByte), InputError);
  EXPECT_THROW(tokenize_text("", VocabMode::kChar), InputError);
}

TEST(CorpusTest, CharVocabularyIsSortedCodePoints) {
  const std::string text = "b\xC3\xA9" "ab";  // "béab"
  const Corpus c = tokenize_text(text, VocabMode::kChar);
  EXPECT_EQ(c.vocab.symbols, (std::vector<std::uint32_t>{'a', 'b', 0xE9}));
  EXPECT_EQ(c.tokens, (std::vector<std::int32_t>{1, 2, 0, 1}));
  EXPECT_EQ(detokenize(c.tokens, c.vocab), text);
  EXPECT_THROW(tokenize_with("z", c.vocab), InputError);
}

TEST(CorpusTest, RoundTripBothModes) {
  const std::string text = testing::synthetic_english(5000, 3) + "\xE2\x98\xBA";
  for (auto mode : {VocabMode::kByte, VocabMode::kChar}) {
    const Corpus c = tokenize_text(text, mode);
    EXPECT_EQ(detokenize(c.tokens, c.vocab), text);
  }
}

TEST(CorpusTest, InvalidUtf8Rejected) {
  EXPECT_THROW(decode_utf8("\xC3"), InputError);
  EXPECT_THROW(decode_utf8("\xFF"), InputError);
  EXPECT_THROW(tokenize_text("a\x80", VocabMode::kChar), InputError);
  EXPECT_NO_THROW(tokenize_text("a\x80", VocabMode::kByte));
}

TEST(CorpusTest, Utf8EncodeDecode) {
  const std::vector<std::uint32_t> cps{0x41, 0xE9, 0x263A, 0x1F600};
  const std::string bytes = encode_utf8(cps);
  EXPECT_EQ(bytes, "A\xC3\xA9\xE2\x98\xBA\xF0\x9F\x98\x80");
  EXPECT_EQ(decode_utf8(bytes), cps);
}

TEST(CorpusTest, SplitKeepsTrailingValidation) {
  std::vector<std::int32_t> tokens(100);
  for (int i = 0; i < 100; ++i) tokens[i] = i;
  const auto split = split_corpus(tokens, 0.1);
  EXPECT_EQ(split.train.size(), 90u);
  EXPECT_EQ(split.validation.front(), 90);
  EXPECT_THROW(split_corpus(tokens, 0.0), ConfigError);
  EXPECT_THROW(split_corpus(tokens, 1.0), ConfigError);
}

TEST(CorpusTest, StatsMatchCountingOracle) {
  const Corpus c = tokenize_text(testing::synthetic_english(20000, 4), VocabMode::kByte);
  const auto split = split_corpus(c.tokens);
  const CorpusStats stats = corpus_stats(c, split);
  EXPECT_NEAR(stats.unigram_entropy_nats, testing::unigram_entropy_by_counting(split.train),
              1e-12);
  EXPECT_EQ(stats.train_tokens + stats.validation_tokens, stats.tokens);
  EXPECT_EQ(stats.vocab_size, 256u);
  EXPECT_GT(stats.distinct_tokens, 20u);
}

TEST(CorpusTest, UniformTokensHaveLogEntropy) {
  const std::vector<std::int32_t> tokens{0, 1, 2, 3, 0, 1, 2, 3, 9, 9};
  Corpus c;
  c.tokens = tokens;
  const auto stats = corpus_stats(c, split_corpus(tokens, 0.2));
  EXPECT_NEAR(stats.unigram_entropy_nats, std::log(4.0), 1e-15);
}

TEST(CorpusTest, BatchesAreContiguousWindows) {
  std::vector<std::int32_t> tokens(50);
  for (int i = 0; i < 50; ++i) tokens[i] = i;
  Rng rng(5);
  const TokenBatch b = sample_batch(tokens, 4, 10, rng);
  ASSERT_EQ(b.tokens.size(), 40u);
  for (std::size_t r = 0; r < 4; ++r) {
    for (std::size_t i = 1; i < 10; ++i) EXPECT_EQ(b.at(r, i), b.at(r, i - 1) + 1);
    EXPECT_LE(b.at(r, 9), 49);
  }
  EXPECT_THROW(sample_batch(tokens, 1, 51, rng), DimensionError);
}

TEST(CorpusTest, EvaluationWindowsDoNotOverlap) {
  std::vector<std::int32_t> tokens(35);
  for (int i = 0; i < 35; ++i) tokens[i] = i;
  const auto windows = evaluation_windows(tokens, 10);
  ASSERT_EQ(windows.size(), 3u);
  EXPECT_EQ(windows[2].tokens.front(), 20);
  EXPECT_EQ(evaluation_windows(tokens, 10, 2).size(), 2u);
  EXPECT_TRUE(evaluation_windows(tokens, 36).empty());
}

TEST(CorpusTest, IngestReadsFile) {
  testing::ScratchDir dir("corpus");
  testing::write_synthetic_corpus(dir / "c.txt", 3000, 6);
  const Corpus c = ingest_corpus(dir / "c.txt", VocabMode::kByte);
  EXPECT_EQ(c.source_bytes, 3000u);
  EXPECT_EQ(detokenize(c.tokens, c.vocab), testing::synthetic_english(3000, 6));
  EXPECT_THROW(ingest_corpus(dir / "missing.txt", VocabMode::kByte), InputError);
}

TEST(SyntheticCorpusTest, DeterministicAndSized) {
  EXPECT_EQ(testing::synthetic_english(4096, 1).size(), 4096u);
  EXPECT_EQ(testing::synthetic_english(4096, 1), testing::synthetic_english(4096, 1));
  EXPECT_NE(testing::synthetic_english(4096, 1), testing::synthetic_english(4096, 2));
}

}  // namespace
}  // namespace tnn
