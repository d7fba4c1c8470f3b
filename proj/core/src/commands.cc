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

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>

#include "json.hpp"
#include "tnn/errors.h"
#include "tnn/optimizer.h"
#include "tnn/parallel.h"
#include "tnn/random.h"
#include "tnn/tno.h"

namespace tnn {
namespace {

using nlohmann::ordered_json;

// Batch sampling draws from its own stream so that changing the model size
// does not shift the data order.
constexpr std::uint64_t kDataStreamSalt = 0x9e3779b97f4a7c15ULL;

class Stopwatch {
 public:
  explicit Stopwatch(bool frozen) : frozen_(frozen), start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    if (frozen_) return 0.0;
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  bool frozen_;
  std::chrono::steady_clock::time_point start_;
};

void write_line(std::ostream& out, const ordered_json& record) {
  out << record.dump() << '\n';
  out.flush();
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot open '" + path.string() + "' for writing");
  return out;
}

Vocabulary vocabulary_of(const CheckpointMetadata& meta) {
  Vocabulary vocab;
  vocab.mode = parse_vocab_mode(meta.vocab_mode);
  vocab.symbols = meta.vocab_symbols;
  return vocab;
}

}  // namespace

TrainSummary cmd_train(const RunConfig& config, std::ostream& log) {
  config.validate();
  if (config.deterministic) set_max_threads(1);
  if (config.corpus.empty()) throw ConfigError("train: corpus path is required");

  const Corpus corpus = ingest_corpus(config.corpus, config.vocab_mode);
  const CorpusSplit split = split_corpus(corpus.tokens, config.val_fraction);
  TrainSummary summary;
  summary.corpus = corpus_stats(corpus, split);
  const CorpusStats& st = summary.corpus;
  log << "corpus: " << st.source_bytes << " bytes, " << st.tokens << " tokens, "
      << st.distinct_tokens << " distinct, vocab " << st.vocab_size << ", train "
      << st.train_tokens << ", validation " << st.validation_tokens
      << ", unigram entropy " << std::setprecision(6) << st.unigram_entropy_nats << " nats\n";

  if (split.train.size() < config.seq_len) {
    throw InputError("training split has " + std::to_string(split.train.size()) +
                     " tokens, fewer than seq_len " + std::to_string(config.seq_len));
  }
  const bool can_validate = split.validation.size() >= config.seq_len;
  if (!can_validate) {
    log << "validation split shorter than seq_len; validation disabled\n";
  }

  ModelConfig model_config = config.model;
  model_config.vocab_size = corpus.vocab.size();
  TnnModel model(model_config, config.seed);
  OptimizerState state = init_optimizer(model);
  Rng data_rng(config.seed ^ kDataStreamSalt);

  CheckpointMetadata meta;
  meta.train_seq_len = config.seq_len;
  meta.vocab_mode = std::string(to_string(corpus.vocab.mode));
  meta.vocab_symbols = corpus.vocab.symbols;

  std::ofstream metrics = open_output(config.metrics);
  const Stopwatch clock(config.deterministic);
  log << "model: " << model.parameter_count() << " parameters\n";

  auto validate = [&](std::size_t step, std::size_t max_windows, const char* split_name) {
    const EvalResult r = evaluate_stream(model, split.validation, config.seq_len, max_windows);
    ordered_json rec;
    rec["step"] = step;
    rec["split"] = split_name;
    rec["loss"] = r.loss;
    rec["tokens"] = r.tokens_evaluated;
    rec["wall_seconds"] = clock.seconds();
    write_line(metrics, rec);
    log << "step " << step << " " << split_name << " loss " << std::setprecision(6) << r.loss
        << "\n";
    return r.loss;
  };

  for (std::size_t step = 0; step < config.steps; ++step) {
    const TokenBatch batch = sample_batch(split.train, config.batch_size, config.seq_len, data_rng);
    StepMetrics m;
    try {
      m = train_step(model, state, batch, config.adam);
    } catch (const NumericAbort& abort) {
      meta.train_step = step;
      save_checkpoint(model, meta, config.checkpoint);
      log << "numeric abort at step " << step << ": " << abort.what()
          << "; last good checkpoint written to " << config.checkpoint.string() << "\n";
      throw;
    }
    summary.steps_completed = step + 1;
    summary.last_train_loss = m.loss;
    const bool last = step + 1 == config.steps;
    if ((config.log_every > 0 && (step + 1) % config.log_every == 0) || last) {
      ordered_json rec;
      rec["step"] = step + 1;
      rec["split"] = "train";
      rec["loss"] = m.loss;
      rec["lr"] = m.lr;
      rec["grad_norm"] = m.grad_norm;
      rec["wall_seconds"] = clock.seconds();
      write_line(metrics, rec);
      log << "step " << step + 1 << " train loss " << std::setprecision(6) << m.loss << " lr "
          << m.lr << "\n";
    }
    if (can_validate && config.eval_every > 0 && (step + 1) % config.eval_every == 0 && !last) {
      validate(step + 1, config.eval_windows, "val");
    }
    if (config.checkpoint_every > 0 && (step + 1) % config.checkpoint_every == 0 && !last) {
      meta.train_step = step + 1;
      save_checkpoint(model, meta, config.checkpoint);
    }
    if (last && can_validate) {
      summary.final_val_loss = validate(step + 1, 0, "final_val");
    }
  }

  meta.train_step = summary.steps_completed;
  save_checkpoint(model, meta, config.checkpoint);
  log << "checkpoint written to " << config.checkpoint.string() << "\n";
  return summary;
}

EvalResult evaluate_stream(const TnnModel& model, std::span<const std::int32_t> tokens,
                           std::size_t length, std::size_t max_windows) {
  if (length < 2) throw ConfigError("evaluation length must be >= 2");
  const std::vector<TokenBatch> windows = evaluation_windows(tokens, length, max_windows);
  if (windows.empty()) {
    throw InputError("stream of " + std::to_string(tokens.size()) +
                     " tokens is shorter than evaluation length " + std::to_string(length));
  }
  double total = 0.0;
  for (const TokenBatch& w : windows) {
    total += evaluate_loss(model, w) * static_cast<double>(length - 1);
  }
  EvalResult r;
  r.windows = windows.size();
  r.tokens_evaluated = windows.size() * (length - 1);
  r.loss = total / static_cast<double>(r.tokens_evaluated);
  return r;
}

std::vector<std::int32_t> evaluation_stream(const LoadedCheckpoint& checkpoint,
                                            const EvalOptions& options) {
  std::ifstream in(options.data, std::ios::binary);
  if (!in) throw InputError("cannot read '" + options.data.string() + "'");
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (text.empty()) throw InputError("'" + options.data.string() + "' is empty");
  std::vector<std::int32_t> tokens = tokenize_with(text, vocabulary_of(checkpoint.metadata));
  if (options.whole_file) return tokens;
  return split_corpus(tokens, options.val_fraction).validation;
}

EvalResult cmd_eval(const EvalOptions& options) {
  const LoadedCheckpoint ckpt = load_checkpoint(options.checkpoint);
  const std::size_t length = options.length > 0 ? options.length : ckpt.metadata.train_seq_len;
  return evaluate_stream(ckpt.model, evaluation_stream(ckpt, options), length,
                         options.max_windows);
}

std::vector<ExtrapolationRow> cmd_extrapolate(const EvalOptions& options,
                                              const std::vector<std::size_t>& lengths) {
  if (lengths.empty()) throw ConfigError("extrapolate: no lengths given");
  for (const std::size_t n : lengths) {
    if (n < 2) throw ConfigError("extrapolate: lengths must be >= 2");
  }
  const LoadedCheckpoint ckpt = load_checkpoint(options.checkpoint);
  if (!ckpt.model.config().block.tno.causal) {
    throw ConfigError("extrapolate: checkpoint is not causal");
  }
  const std::vector<std::int32_t> stream = evaluation_stream(ckpt, options);
  std::vector<ExtrapolationRow> rows;
  for (const std::size_t n : lengths) {
    const EvalResult r = evaluate_stream(ckpt.model, stream, n, options.max_windows);
    rows.push_back({n, r.loss, std::exp(r.loss), r.tokens_evaluated});
  }
  return rows;
}

void write_extrapolation_csv(const std::vector<ExtrapolationRow>& rows, std::ostream& out) {
  out << "length,loss,perplexity,tokens_evaluated\n";
  out << std::setprecision(10);
  for (const auto& r : rows) {
    out << r.length << ',' << r.loss << ',' << r.perplexity << ',' << r.tokens_evaluated << '\n';
  }
}

RelPosCoefficients<double> dump_coefficients(const TnnModel& model, const DumpOptions& options) {
  if (options.layer >= model.blocks().size()) {
    throw RangeError("layer " + std::to_string(options.layer) + " out of range; model has " +
                     std::to_string(model.blocks().size()));
  }
  if (options.n < 1) throw ConfigError("dump-toeplitz: n must be >= 1");
  const ToeplitzOperator& op = model.mixing_operator(options.layer);
  if (!options.unit_rpe) return effective_coeffs(op, options.n);
  RelPosCoefficients<double> ones(options.n, op.channels(),
                                  std::vector<double>((2 * options.n - 1) * op.channels(), 1.0));
  return apply_decay_and_mask(ones, op.decay(), op.causal());
}

Matrix averaged_toeplitz(const RelPosCoefficients<double>& coeffs, std::size_t n) {
  const std::size_t channels = coeffs.channels();
  Matrix out(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const auto k = static_cast<std::ptrdiff_t>(i) - static_cast<std::ptrdiff_t>(j);
      double sum = 0.0;
      for (std::size_t c = 0; c < channels; ++c) sum += coeffs.at(k, c);
      out(i, j) = sum / static_cast<double>(channels);
    }
  }
  return out;
}

void cmd_dump_toeplitz(const DumpOptions& options, std::ostream& out) {
  const LoadedCheckpoint ckpt = load_checkpoint(options.checkpoint);
  const RelPosCoefficients<double> coeffs = dump_coefficients(ckpt.model, options);
  const Matrix avg = averaged_toeplitz(coeffs, options.n);
  out << std::setprecision(17);
  for (Eigen::Index i = 0; i < avg.rows(); ++i) {
    for (Eigen::Index j = 0; j < avg.cols(); ++j) {
      if (j > 0) out << ',';
      out << avg(i, j);
    }
    out << '\n';
  }
  if (!options.per_channel.empty()) {
    std::ofstream pc = open_output(options.per_channel);
    pc << "channel,row,col,value\n" << std::setprecision(17);
    for (std::size_t c = 0; c < coeffs.channels(); ++c) {
      for (std::size_t i = 0; i < options.n; ++i) {
        for (std::size_t j = 0; j < options.n; ++j) {
          const auto k = static_cast<std::ptrdiff_t>(i) - static_cast<std::ptrdiff_t>(j);
          pc << c << ',' << i << ',' << j << ',' << coeffs.at(k, c) << '\n';
        }
      }
    }
  }
  if (!options.coefficients.empty()) {
    std::ofstream cf = open_output(options.coefficients);
    write_coefficients_csv(coeffs, cf);
  }
}

}  // namespace tnn
