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


#include "tnn/commands.h"

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <json.hpp>

#include "support/synthetic_corpus.h"
#include "tnn/checkpoint.h"
#include "tnn/errors.h"

namespace tnn {
namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

RunConfig small_run(const testing::ScratchDir& dir, const std::string& tag) {
  RunConfig c;
  c.model.layers = 1;
  c.model.block.feature_dim = 8;
  c.model.block.gtu_dim = 16;
  c.model.block.glu_dim = 8;
  c.model.block.rpe.hidden_dim = 8;
  c.seq_len = 16;
  c.batch_size = 2;
  c.steps = 12;
  c.eval_every = 5;
  c.eval_windows = 4;
  c.log_every = 4;
  c.checkpoint_every = 0;
  c.adam.warmup_steps = 2;
  c.deterministic = true;
  c.corpus = dir / "corpus.txt";
  c.checkpoint = dir / (tag + ".ckpt");
  c.metrics = dir / (tag + ".jsonl");
  return c;
}

class CommandsTest : public ::testing::Test {
 protected:
  void SetUp() override { testing::write_synthetic_corpus(dir_ / "corpus.txt", 6000, 9); }
  testing::ScratchDir dir_{"commands"};
};

TEST_F(CommandsTest, TrainWritesMetricsAndCheckpoint) {
  const RunConfig c = small_run(dir_, "a");
  std::ostringstream log;
  const TrainSummary s = cmd_train(c, log);
  EXPECT_EQ(s.steps_completed, 12u);
  ASSERT_TRUE(s.final_val_loss.has_value());
  EXPECT_EQ(s.corpus.source_bytes, 6000u);

  std::ifstream metrics(c.metrics);
  std::string line;
  std::vector<nlohmann::json> rows;
  while (std::getline(metrics, line)) rows.push_back(nlohmann::json::parse(line));
  ASSERT_FALSE(rows.empty());
  std::vector<std::size_t> train_steps;
  for (const auto& r : rows) {
    EXPECT_EQ(r.at("wall_seconds").get<double>(), 0.0);
    if (r.at("split") == "train") train_steps.push_back(r.at("step").get<std::size_t>());
  }
  EXPECT_EQ(train_steps, (std::vector<std::size_t>{4, 8, 12}));
  EXPECT_EQ(rows.back().at("split"), "final_val");
  EXPECT_DOUBLE_EQ(rows.back().at("loss").get<double>(), *s.final_val_loss);

  const LoadedCheckpoint ckpt = load_checkpoint(c.checkpoint);
  EXPECT_EQ(ckpt.metadata.train_step, 12u);
  EXPECT_EQ(ckpt.metadata.train_seq_len, 16u);
}

TEST_F(CommandsTest, DeterministicRunsAreByteIdentical) {
  std::ostringstream log;
  cmd_train(small_run(dir_, "a"), log);
  cmd_train(small_run(dir_, "b"), log);
  EXPECT_EQ(read_file(dir_ / "a.jsonl"), read_file(dir_ / "b.jsonl"));
  EXPECT_EQ(read_file(dir_ / "a.ckpt"), read_file(dir_ / "b.ckpt"));
}

TEST_F(CommandsTest, ZeroStepsStillWritesCheckpoint) {
  RunConfig c = small_run(dir_, "z");
  c.steps = 0;
  std::ostringstream log;
  EXPECT_EQ(cmd_train(c, log).steps_completed, 0u);
  EXPECT_TRUE(std::filesystem::exists(c.checkpoint));
  EXPECT_TRUE(read_file(c.metrics).empty());
}

TEST_F(CommandsTest, EvalMatchesPerWindowLosses) {
  const RunConfig c = small_run(dir_, "e");
  std::ostringstream log;
  cmd_train(c, log);
  const LoadedCheckpoint ckpt = load_checkpoint(c.checkpoint);
  EvalOptions opts{.checkpoint = c.checkpoint, .data = c.corpus};
  const auto stream = evaluation_stream(ckpt, opts);
  EXPECT_EQ(stream.size(), 600u);

  const EvalResult r = cmd_eval(opts);
  double total = 0.0;
  std::size_t windows = 0;
  for (std::size_t start = 0; start + 16 <= stream.size(); start += 16, ++windows) {
    TokenBatch w{1, 16, {stream.begin() + start, stream.begin() + start + 16}};
    total += evaluate_loss(ckpt.model, w);
  }
  EXPECT_EQ(r.windows, windows);
  EXPECT_EQ(r.tokens_evaluated, windows * 15);
  EXPECT_NEAR(r.loss, total / static_cast<double>(windows), 1e-12);
}

TEST_F(CommandsTest, ExtrapolateReportsPerplexity) {
  const RunConfig c = small_run(dir_, "x");
  std::ostringstream log;
  cmd_train(c, log);
  EvalOptions opts{.checkpoint = c.checkpoint, .data = c.corpus, .whole_file = true};
  const auto rows = cmd_extrapolate(opts, {64, 16, 32});
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].length, 64u);
  EXPECT_EQ(rows[1].length, 16u);
  for (const auto& r : rows) EXPECT_DOUBLE_EQ(r.perplexity, std::exp(r.loss));
  EXPECT_DOUBLE_EQ(rows[1].loss, cmd_eval(EvalOptions{.checkpoint = c.checkpoint,
                                                      .data = c.corpus,
                                                      .length = 16,
                                                      .whole_file = true})
                                     .loss);
  std::ostringstream csv;
  write_extrapolation_csv(rows, csv);
  EXPECT_EQ(csv.str().substr(0, csv.str().find('\n')), "length,loss,perplexity,tokens_evaluated");
  EXPECT_THROW(cmd_extrapolate(opts, {}), ConfigError);
  EXPECT_THROW(cmd_extrapolate(opts, {1}), ConfigError);
}

TEST_F(CommandsTest, ExtrapolateNeedsCausalModel) {
  RunConfig c = small_run(dir_, "nc");
  c.model.block.tno.causal = false;
  c.steps = 0;
  std::ostringstream log;
  cmd_train(c, log);
  EXPECT_THROW(cmd_extrapolate(EvalOptions{.checkpoint = c.checkpoint, .data = c.corpus}, {16}),
               ConfigError);
}

TEST_F(CommandsTest, DumpShowsDecayEnvelope) {
  RunConfig c = small_run(dir_, "d");
  c.model.block.tno.decay = 0.5;
  c.steps = 0;
  std::ostringstream log;
  cmd_train(c, log);
  DumpOptions opts{.checkpoint = c.checkpoint, .n = 4, .unit_rpe = true,
                   .per_channel = dir_ / "pc.csv", .coefficients = dir_ / "cf.csv"};
  std::ostringstream out;
  cmd_dump_toeplitz(opts, out);
  EXPECT_EQ(out.str(), "1,0,0,0\n0.5,1,0,0\n0.25,0.5,1,0\n0.125,0.25,0.5,1\n");
  const std::string pc = read_file(dir_ / "pc.csv");
  EXPECT_EQ(pc.substr(0, pc.find('\n')), "channel,row,col,value");
  const std::string cf = read_file(dir_ / "cf.csv");
  EXPECT_EQ(cf.substr(0, cf.find('\n')), "offset,channel,value");
  opts.layer = 1;
  EXPECT_THROW(cmd_dump_toeplitz(opts, out), RangeError);
}

TEST(AveragedToeplitzTest, AveragesChannels) {
  RelPosCoefficients<double> c(2, 2, {1.0, 3.0, 2.0, 4.0, 5.0, 7.0});
  const Matrix m = averaged_toeplitz(c, 2);
  EXPECT_EQ(m(0, 0), 3.0);
  EXPECT_EQ(m(1, 0), 6.0);
  EXPECT_EQ(m(0, 1), 2.0);
}

}  // namespace
}  // namespace tnn
