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

// Command-line entry point: train, eval, extrapolate, bench, dump-toeplitz,
// selftest.
//
// Exit codes: 0 success, 1 self-test failure, 2 usage or input error,
// 3 numeric abort.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tnn/bench.h"
#include "tnn/commands.h"
#include "tnn/errors.h"
#include "tnn/optimizer.h"
#include "tnn/parallel.h"
#include "tnn/run_config.h"
#include "tnn/selftest.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string precision;
  bool deterministic = false;
  std::string out;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config, "Run configuration file (key = value)");
  cmd->add_option("--seed", flags.seed, "Random seed");
  cmd->add_option("--precision", flags.precision, "Arithmetic precision")
      ->check(CLI::IsMember({"f32", "f64"}));
  cmd->add_flag("--deterministic", flags.deterministic, "Single-threaded, reproducible output");
  cmd->add_option("--out", flags.out, "Output path");
}

// The config file supplies defaults; explicit flags win.
tnn::RunConfig resolve(const CommonFlags& flags) {
  tnn::RunConfig cfg;
  if (!flags.config.empty()) cfg = tnn::load_run_config(flags.config);
  if (flags.seed) cfg.seed = *flags.seed;
  if (!flags.precision.empty()) cfg.precision = tnn::parse_precision(flags.precision);
  if (flags.deterministic) cfg.deterministic = true;
  if (cfg.deterministic) tnn::set_max_threads(1);
  return cfg;
}

// Writes through `fn` to --out, or stdout when --out is empty.
template <typename F>
void emit(const std::string& path, F&& fn) {
  if (path.empty()) {
    fn(std::cout);
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw tnn::InputError("cannot open '" + path + "' for writing");
  fn(out);
}

void require_f64(const tnn::RunConfig& cfg, const char* command) {
  if (cfg.precision != tnn::Precision::kF64) {
    throw tnn::ConfigError(std::string(command) +
                           ": the model runs in f64 only; --precision f32 applies to bench");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Toeplitz neural network toolkit"};
  app.require_subcommand(1);

  // train
  CommonFlags train_flags;
  std::string train_corpus, train_metrics;
  std::optional<std::size_t> train_steps;
  std::vector<std::string> overrides;
  auto* train = app.add_subcommand("train", "Train a model and write a checkpoint");
  add_common(train, train_flags);
  train->add_option("--corpus", train_corpus, "Training text file");
  train->add_option("--steps", train_steps, "Number of optimizer steps");
  train->add_option("--metrics", train_metrics, "Metrics log (JSON lines)");
  train->add_option("--set", overrides, "Override a config key: key=value");
  train->footer("--out sets the checkpoint path.");

  // eval and extrapolate share their data flags.
  CommonFlags eval_flags, extra_flags;
  tnn::EvalOptions eval_opts, extra_opts;
  std::string eval_ckpt, eval_data, extra_ckpt, extra_data;
  std::vector<std::size_t> lengths{128, 256, 512, 1024};
  auto* eval = app.add_subcommand("eval", "Mean validation loss of a checkpoint");
  auto* extra = app.add_subcommand("extrapolate", "Loss table over evaluation lengths");
  for (auto [cmd, flags, opts, ckpt, data] :
       {std::tuple{eval, &eval_flags, &eval_opts, &eval_ckpt, &eval_data},
        std::tuple{extra, &extra_flags, &extra_opts, &extra_ckpt, &extra_data}}) {
    add_common(cmd, *flags);
    cmd->add_option("--checkpoint", *ckpt, "Checkpoint file")->required();
    cmd->add_option("--data", *data, "Text file to evaluate on")->required();
    cmd->add_option("--max-windows", opts->max_windows, "Cap on windows per length (0 = all)");
    cmd->add_option("--val-fraction", opts->val_fraction, "Validation split fraction");
    cmd->add_flag("--whole-file", opts->whole_file, "Evaluate every token of --data");
  }
  eval->add_option("--length", eval_opts.length, "Window length (default: training length)");
  extra->add_option("--lengths", lengths, "Comma-separated lengths")->delimiter(',');

  // bench
  CommonFlags bench_flags;
  tnn::BenchOptions bench_opts;
  std::vector<std::string> bench_methods;
  auto* bench = app.add_subcommand("bench", "Time naive and FFT Toeplitz products");
  add_common(bench, bench_flags);
  bench->add_option("--min-n", bench_opts.min_n, "Smallest n (>= 16)");
  bench->add_option("--max-n", bench_opts.max_n, "Largest n");
  bench->add_option("--d", bench_opts.d, "Channels");
  bench->add_option("--trials", bench_opts.trials, "Timed trials per size (>= 5)");
  bench->add_option("--warmup", bench_opts.warmup, "Discarded warm-up runs");
  bench->add_option("--methods", bench_methods, "naive,fft_paper2n,fft_pow2")->delimiter(',');
  bench->add_option("--naive-time-limit", bench_opts.naive_time_limit_n,
                    "Verify but do not time naive above this n (0 = no limit)");

  // dump-toeplitz
  CommonFlags dump_flags;
  tnn::DumpOptions dump_opts;
  std::string dump_ckpt, dump_per_channel, dump_coeffs;
  auto* dump = app.add_subcommand("dump-toeplitz", "Write a layer's effective Toeplitz matrix");
  add_common(dump, dump_flags);
  dump->add_option("--checkpoint", dump_ckpt, "Checkpoint file")->required();
  dump->add_option("--layer", dump_opts.layer, "Block index");
  dump->add_option("--n", dump_opts.n, "Matrix size");
  dump->add_flag("--unit-rpe", dump_opts.unit_rpe, "Replace the RPE output by 1");
  dump->add_option("--per-channel", dump_per_channel, "Long-format per-channel CSV");
  dump->add_option("--coefficients", dump_coeffs, "offset,channel,value CSV");

  // selftest
  CommonFlags self_flags;
  bool skip_timing = false;
  std::string inject;
  auto* self = app.add_subcommand("selftest", "Run the property suite");
  add_common(self, self_flags);
  self->add_flag("--skip-timing", skip_timing, "Skip the scaling property");
  self->add_option("--inject-fault", inject, "Corrupt one kernel path (testing only)")
      ->check(CLI::IsMember({"paper2n", "pow2"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*train) {
      tnn::RunConfig cfg = resolve(train_flags);
      for (const std::string& kv : overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw tnn::ConfigError("--set expects key=value: " + kv);
        tnn::set_config_value(cfg, kv.substr(0, eq), kv.substr(eq + 1));
      }
      if (!train_corpus.empty()) cfg.corpus = train_corpus;
      if (train_steps) cfg.steps = *train_steps;
      if (!train_flags.out.empty()) cfg.checkpoint = train_flags.out;
      if (!train_metrics.empty()) cfg.metrics = train_metrics;
      if (cfg.deterministic) tnn::set_max_threads(1);
      require_f64(cfg, "train");
      const auto summary = tnn::cmd_train(cfg, std::cerr);
      if (summary.final_val_loss) {
        std::cout << "final validation loss " << *summary.final_val_loss << " nats (unigram "
                  << summary.corpus.unigram_entropy_nats << ")\n";
      }
    } else if (*eval) {
      require_f64(resolve(eval_flags), "eval");
      eval_opts.checkpoint = eval_ckpt;
      eval_opts.data = eval_data;
      const auto r = tnn::cmd_eval(eval_opts);
      emit(eval_flags.out, [&](std::ostream& out) {
        out.precision(10);
        out << "loss,perplexity,tokens_evaluated\n"
            << r.loss << ',' << std::exp(r.loss) << ',' << r.tokens_evaluated << '\n';
      });
    } else if (*extra) {
      require_f64(resolve(extra_flags), "extrapolate");
      extra_opts.checkpoint = extra_ckpt;
      extra_opts.data = extra_data;
      const auto rows = tnn::cmd_extrapolate(extra_opts, lengths);
      emit(extra_flags.out, [&](std::ostream& out) { tnn::write_extrapolation_csv(rows, out); });
    } else if (*bench) {
      const tnn::RunConfig cfg = resolve(bench_flags);
      bench_opts.precision = cfg.precision;
      bench_opts.seed = cfg.seed;
      if (!bench_methods.empty()) {
        bench_opts.methods.clear();
        for (const auto& m : bench_methods) {
          bench_opts.methods.push_back(tnn::parse_bench_method(m));
        }
      }
      const auto records = tnn::run_bench(bench_opts);
      emit(bench_flags.out, [&](std::ostream& out) { tnn::write_bench_csv(records, out); });
    } else if (*dump) {
      resolve(dump_flags);
      dump_opts.checkpoint = dump_ckpt;
      dump_opts.per_channel = dump_per_channel;
      dump_opts.coefficients = dump_coeffs;
      emit(dump_flags.out, [&](std::ostream& out) { tnn::cmd_dump_toeplitz(dump_opts, out); });
    } else if (*self) {
      const tnn::RunConfig cfg = resolve(self_flags);
      tnn::SelftestOptions opts;
      opts.timing = !skip_timing;
      opts.seed = self_flags.seed.value_or(opts.seed);
      if (inject == "paper2n") opts.fault = tnn::fault::KernelFault::kPaper2n;
      if (inject == "pow2") opts.fault = tnn::fault::KernelFault::kPaddedPow2;
      (void)cfg;
      const auto results = tnn::run_selftest(opts, &std::cerr);
      tnn::print_selftest_table(results, std::cout);
      if (!self_flags.out.empty()) {
        emit(self_flags.out, [&](std::ostream& out) { tnn::print_selftest_table(results, out); });
      }
      return tnn::all_passed(results) ? kExitOk : kExitFailure;
    }
  } catch (const tnn::NumericError& e) {
    std::cerr << "numeric abort: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitOk;
}
