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

#ifndef TNN_COMMANDS_H_
#define TNN_COMMANDS_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "tnn/checkpoint.h"
#include "tnn/corpus.h"
#include "tnn/model.h"
#include "tnn/run_config.h"

namespace tnn {

struct TrainSummary {
  std::size_t steps_completed = 0;
  std::optional<double> last_train_loss;
  std::optional<double> final_val_loss;  // over the whole validation stream
  CorpusStats corpus;
};

// Trains from scratch per `config`. Writes the checkpoint and a metrics log
// of JSON lines; progress goes to `log`. On a non-finite loss or gradient
// the last good model is saved and the NumericAbort is rethrown.
//
// Metrics records:
//   {"step", "split": "train", "loss", "lr", "grad_norm", "wall_seconds"}
//   {"step", "split": "val" | "final_val", "loss", "tokens", "wall_seconds"}
// wall_seconds is 0 in deterministic mode so that logs compare equal.
TrainSummary cmd_train(const RunConfig& config, std::ostream& log);

struct EvalResult {
  double loss = 0.0;  // mean next-token cross-entropy, nats
  std::size_t tokens_evaluated = 0;
  std::size_t windows = 0;
};

// Mean token loss over non-overlapping windows of `length`.
EvalResult evaluate_stream(const TnnModel& model, std::span<const std::int32_t> tokens,
                           std::size_t length, std::size_t max_windows = 0);

struct EvalOptions {
  std::filesystem::path checkpoint;
  std::filesystem::path data;
  std::size_t length = 0;  // 0: the checkpoint's training length
  std::size_t max_windows = 0;
  double val_fraction = kDefaultValidationFraction;
  bool whole_file = false;  // evaluate every token instead of the validation split
};

// Tokenizes `options.data` with the checkpoint's vocabulary and returns the
// stream evaluation runs over.
std::vector<std::int32_t> evaluation_stream(const LoadedCheckpoint& checkpoint,
                                            const EvalOptions& options);

EvalResult cmd_eval(const EvalOptions& options);

struct ExtrapolationRow {
  std::size_t length = 0;
  double loss = 0.0;
  double perplexity = 0.0;  // exp(loss)
  std::size_t tokens_evaluated = 0;
};

// Rows come back in the order of `lengths`. Requires a causal checkpoint.
std::vector<ExtrapolationRow> cmd_extrapolate(const EvalOptions& options,
                                              const std::vector<std::size_t>& lengths);

// Header: length,loss,perplexity,tokens_evaluated
void write_extrapolation_csv(const std::vector<ExtrapolationRow>& rows, std::ostream& out);

struct DumpOptions {
  std::filesystem::path checkpoint;
  std::size_t layer = 0;
  std::size_t n = 64;
  // Replace the RPE output by 1 so the dump shows the decay envelope alone.
  bool unit_rpe = false;
  std::filesystem::path per_channel;  // optional long-format CSV
  std::filesystem::path coefficients; // optional offset,channel,value CSV
};

// Effective (decayed, masked) coefficients the dump is built from.
RelPosCoefficients<double> dump_coefficients(const TnnModel& model, const DumpOptions& options);

// Channel-averaged n x n matrix; entry (i, j) is the mean over channels of
// t_{i-j}.
Matrix averaged_toeplitz(const RelPosCoefficients<double>& coeffs, std::size_t n);

// Writes the averaged matrix (n rows of n comma-separated values) to `out`
// and the optional side files. Per-channel header: channel,row,col,value.
void cmd_dump_toeplitz(const DumpOptions& options, std::ostream& out);

}  // namespace tnn

#endif  // TNN_COMMANDS_H_
