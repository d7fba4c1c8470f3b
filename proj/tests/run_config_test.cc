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

#include <string>

#include <gtest/gtest.h>

#include "tnn/errors.h"

namespace tnn {
namespace {

TEST(RunConfigTest, ParsesKeysCommentsAndBlankLines) {
  const RunConfig c = parse_run_config(
      "# desk run\n"
      "layers = 3\n"
      "\n"
      "decay = 0.95   # lambda\n"
      "causal = false\n"
      "strategy = paper_2n\n"
      "corpus = data/text.txt\n");
  EXPECT_EQ(c.model.layers, 3u);
  EXPECT_EQ(c.model.block.tno.decay, 0.95);
  EXPECT_FALSE(c.model.block.tno.causal);
  EXPECT_EQ(c.model.block.tno.strategy, CirculantStrategy::kPaper2n);
  EXPECT_EQ(c.corpus, "data/text.txt");
  EXPECT_EQ(c.steps, RunConfig{}.steps);
}

TEST(RunConfigTest, FormatRoundTrips) {
  RunConfig c;
  c.model.block.tno.decay = 0.123456789012345;
  c.batch_size = 3;
  c.vocab_mode = VocabMode::kChar;
  const RunConfig back = parse_run_config(format_run_config(c));
  EXPECT_EQ(format_run_config(back), format_run_config(c));
  EXPECT_EQ(back.model.block.tno.decay, c.model.block.tno.decay);
}

TEST(RunConfigTest, SchemaCoversEveryKey) {
  const RunConfig defaults;
  for (const auto& key : run_config_schema()) {
    EXPECT_EQ(get_config_value(defaults, key.name), key.default_value) << key.name;
    EXPECT_FALSE(key.description.empty()) << key.name;
  }
}

TEST(RunConfigTest, Errors) {
  EXPECT_THROW(parse_run_config("bogus = 1\n"), ConfigError);
  EXPECT_THROW(parse_run_config("layers\n"), ConfigError);
  EXPECT_THROW(parse_run_config("layers = 2\nlayers = 3\n"), ConfigError);
  EXPECT_THROW(parse_run_config("layers = -1\n"), ConfigError);
  EXPECT_THROW(parse_run_config("layers = two\n"), ConfigError);
  EXPECT_THROW(parse_run_config("decay = 1.5\n"), ConfigError);
  EXPECT_THROW(parse_run_config("causal = maybe\n"), ConfigError);
  EXPECT_THROW(parse_run_config("norm = batchnorm\n"), ConfigError);
  EXPECT_THROW(parse_run_config("seq_len = 1\n"), ConfigError);
  EXPECT_THROW(parse_run_config("val_fraction = 1\n"), ConfigError);
  EXPECT_THROW(load_run_config("/nonexistent/tnn.cfg"), ConfigError);
}

TEST(RunConfigTest, ErrorsNameTheLine) {
  try {
    parse_run_config("layers = 2\n\nwidth = 3\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}

TEST(RunConfigTest, Precision) {
  EXPECT_EQ(parse_precision("f32"), Precision::kF32);
  EXPECT_EQ(parse_precision("f64"), Precision::kF64);
  EXPECT_THROW(parse_precision("f16"), ConfigError);
}

}  // namespace
}  // namespace tnn
