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

#include "tnn/selftest.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <sstream>

#include "tnn/bench.h"
#include "tnn/checkpoint.h"
#include "tnn/commands.h"
#include "tnn/equivalence.h"
#include "tnn/errors.h"
#include "tnn/gradcheck.h"
#include "tnn/random.h"
#include "tnn/rpe.h"
#include "tnn/tno.h"

namespace tnn {
namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(3) << std::scientific << v;
  return s.str();
}

Outcome bound(const std::string& what, double value, double limit) {
  return {value <= limit, what + " " + fmt(value) + " (limit " + fmt(limit) + ")"};
}

template <typename T>
RelPosCoefficients<T> random_coeffs(std::size_t n, std::size_t d, Rng& rng) {
  std::vector<T> v((2 * n - 1) * d);
  for (auto& e : v) e = static_cast<T>(rng.uniform(-1.0, 1.0));
  return RelPosCoefficients<T>(n, d, std::move(v));
}

template <typename T>
Sequence<T> random_sequence(std::size_t n, std::size_t d, Rng& rng) {
  std::vector<T> v(n * d);
  for (auto& e : v) e = static_cast<T>(rng.uniform(-1.0, 1.0));
  return Sequence<T>(n, d, std::move(v));
}

// max over channels of max|a - b| / max|b|.
template <typename T>
double channel_error(const Sequence<T>& a, const Sequence<T>& b) {
  double worst = 0.0;
  for (std::size_t c = 0; c < a.channels(); ++c) {
    double diff = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < a.length(); ++i) {
      diff = std::max(diff, std::abs(double(a.at(i, c)) - double(b.at(i, c))));
      scale = std::max(scale, std::abs(double(b.at(i, c))));
    }
    worst = std::max(worst, scale == 0.0 ? diff : diff / scale);
  }
  return worst;
}

double vector_error(std::span<const double> a, std::span<const double> b) {
  double diff = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff = std::max(diff, std::abs(a[i] - b[i]));
    scale = std::max(scale, std::abs(b[i]));
  }
  return scale == 0.0 ? diff : diff / scale;
}

template <typename T>
Outcome oracle_equivalence(CirculantStrategy strategy, std::uint64_t seed, std::size_t trials) {
  const double tol = std::is_same_v<T, float> ? 1e-4 : 1e-9;
  Rng rng(seed);
  double worst = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    // Mostly small sizes, with the full range represented.
    const std::size_t n = t % 10 == 0 ? 1 + rng.below(512) : 1 + rng.below(64);
    const std::size_t d = 1 + rng.below(8);
    const auto coeffs = random_coeffs<T>(n, d, rng);
    const auto x = random_sequence<T>(n, d, rng);
    worst = std::max(worst, channel_error(fft_matvec(coeffs, x, strategy), naive_matvec(coeffs, x)));
  }
  return bound("max relative error", worst, tol);
}

Outcome linearity(std::uint64_t seed) {
  Rng rng(seed);
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 1 + rng.below(200), d = 1 + rng.below(4);
    const auto coeffs = random_coeffs<double>(n, d, rng);
    const auto x = random_sequence<double>(n, d, rng);
    const auto z = random_sequence<double>(n, d, rng);
    const double alpha = rng.uniform(-2.0, 2.0), beta = rng.uniform(-2.0, 2.0);
    Sequence<double> mix(n, d), expect(n, d);
    const auto yx = fft_matvec(coeffs, x), yz = fft_matvec(coeffs, z);
    for (std::size_t i = 0; i < n * d; ++i) {
      mix.values()[i] = alpha * x.values()[i] + beta * z.values()[i];
      expect.values()[i] = alpha * yx.values()[i] + beta * yz.values()[i];
    }
    worst = std::max(worst, channel_error(fft_matvec(coeffs, mix), expect));
  }
  return bound("max relative error", worst, 1e-10);
}

Outcome embedding_round_trip(std::uint64_t seed) {
  Rng rng(seed);
  for (int t = 0; t < 40; ++t) {
    const std::size_t n = 1 + rng.below(100), d = 1 + rng.below(3);
    const auto coeffs = random_coeffs<double>(n, d, rng);
    for (const auto strategy : {CirculantStrategy::kPaper2n, CirculantStrategy::kPaddedPow2}) {
      const auto spec = build_circulant(coeffs, strategy);
      for (std::size_t c = 0; c < d; ++c) {
        const auto dense = dense_toeplitz(coeffs, c);
        for (std::size_t r = 0; r < n; ++r) {
          for (std::size_t s = 0; s < n; ++s) {
            if (spec.entry(r, s, c) != dense[r * n + s]) {
              return {false, std::string(to_string(strategy)) + " differs at n=" +
                                 std::to_string(n) + " (" + std::to_string(r) + "," +
                                 std::to_string(s) + ")"};
            }
          }
        }
      }
    }
  }
  return {true, "40 instances bit-equal, both strategies"};
}

Outcome adjoint_identity(std::uint64_t seed) {
  Rng rng(seed);
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 1 + rng.below(300), d = 1 + rng.below(4);
    const auto coeffs = random_coeffs<double>(n, d, rng);
    const auto x = random_sequence<double>(n, d, rng);
    const auto g = random_sequence<double>(n, d, rng);
    for (const auto strategy : {CirculantStrategy::kPaper2n, CirculantStrategy::kPaddedPow2}) {
      const ToeplitzPlan<double> plan(coeffs, strategy);
      ToeplitzPlan<double>::Workspace ws;
      std::vector<double> tx(n), tg(n);
      for (std::size_t c = 0; c < d; ++c) {
        plan.apply(c, {x.values().data() + c, n, d}, {tx.data(), n, 1}, ws);
        plan.apply_transpose(c, {g.values().data() + c, n, d}, {tg.data(), n, 1}, ws);
        double lhs = 0.0, rhs = 0.0, mag = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          lhs += tx[i] * g.at(i, c);
          rhs += x.at(i, c) * tg[i];
          mag += std::abs(tx[i] * g.at(i, c));
        }
        worst = std::max(worst, std::abs(lhs - rhs) / std::max(mag, 1e-300));
      }
    }
  }
  return bound("max relative gap", worst, 1e-10);
}

Outcome kernel_gradients(std::uint64_t seed) {
  // L = <g, T x>: dL/dx = T^T g, dL/dt_k = sum_{i-j=k} g_i x_j.
  Rng rng(seed);
  double worst = 0.0;
  const double h = 1e-6;
  for (int t = 0; t < 10; ++t) {
    const std::size_t n = 1 + rng.below(12), d = 1 + rng.below(3);
    auto coeffs = random_coeffs<double>(n, d, rng);
    auto x = random_sequence<double>(n, d, rng);
    const auto g = random_sequence<double>(n, d, rng);
    const auto grads = matvec_backward(coeffs, x, g);
    auto loss = [&]() {
      const auto y = naive_matvec(coeffs, x);
      double s = 0.0;
      for (std::size_t i = 0; i < n * d; ++i) s += y.values()[i] * g.values()[i];
      return s;
    };
    auto probe = [&](double& v, double analytic) {
      const double keep = v;
      v = keep + h;
      const double plus = loss();
      v = keep - h;
      const double minus = loss();
      v = keep;
      worst = std::max(worst, relative_error(analytic, (plus - minus) / (2 * h)));
    };
    for (std::size_t i = 0; i < n * d; ++i) probe(x.values()[i], grads.grad_x.values()[i]);
    for (std::size_t i = 0; i < coeffs.values().size(); ++i) {
      probe(coeffs.values()[i], grads.grad_coeffs.values()[i]);
    }
  }
  return bound("max relative error", worst, 1e-6);
}

Outcome scaling(std::uint64_t seed) {
  BenchOptions fast;
  fast.min_n = 2048;
  fast.max_n = 16384;
  fast.d = 64;
  fast.trials = 20;
  fast.seed = seed;
  fast.methods = {BenchMethod::kFftPow2};
  BenchOptions slow = fast;
  slow.min_n = 512;
  slow.max_n = 4096;
  slow.methods = {BenchMethod::kNaive};
  double fft_worst = 0.0, naive_worst = 1e300;
  std::string detail;
  for (const auto& r : run_bench(fast)) {
    if (r.status != "ok") return {false, "fft run " + r.status + " at n=" + std::to_string(r.n)};
    if (r.doubling_ratio) fft_worst = std::max(fft_worst, *r.doubling_ratio);
  }
  for (const auto& r : run_bench(slow)) {
    if (r.status != "ok") return {false, "naive run " + r.status + " at n=" + std::to_string(r.n)};
    if (r.doubling_ratio) naive_worst = std::min(naive_worst, *r.doubling_ratio);
  }
  std::ostringstream s;
  s << std::fixed << std::setprecision(2) << "fft max ratio " << fft_worst
    << " (<= 2.6), naive min ratio " << naive_worst << " (>= 3.5)";
  return {fft_worst <= 2.6 && naive_worst >= 3.5, s.str()};
}

RpeConfig small_rpe(std::size_t out_dim, RpeInputMode mode = RpeInputMode::kRawInteger) {
  RpeConfig c;
  c.layers = 3;
  c.hidden_dim = 8;
  c.out_dim = out_dim;
  c.input_mode = mode;
  return c;
}

Outcome rpe_length_independence(std::uint64_t seed) {
  Rng rng(seed);
  const RpeNet net(small_rpe(4), rng);
  const auto small = rpe_forward(net, 17);
  const auto large = rpe_forward(net, 301);
  for (std::ptrdiff_t k = -16; k <= 16; ++k) {
    for (std::size_t c = 0; c < 4; ++c) {
      if (small.at(k, c) != large.at(k, c)) {
        return {false, "offset " + std::to_string(k) + " differs"};
      }
    }
  }
  return {true, "offsets |k| <= 16 bit-equal at n=17 and n=301"};
}

Outcome rpe_parameter_count(std::uint64_t seed) {
  Rng rng(seed);
  const RpeConfig cfg = small_rpe(6);
  RpeNet net(cfg, rng);
  std::size_t counted = 0;
  net.for_each_parameter([&](const std::string&, const Matrix& m) {
    counted += static_cast<std::size_t>(m.size());
  });
  // in*h + h + (layers - 2) (h*h + h) + h*out + out with in = 1.
  const std::size_t expect = 8 + 8 + (8 * 8 + 8) + 8 * 6 + 6;
  const std::size_t before = net.parameter_count();
  for (const std::size_t n : {2u, 50u, 700u}) rpe_forward(net, n);
  const bool ok = counted == expect && RpeNet::parameter_count(cfg) == expect &&
                  net.parameter_count() == before;
  return {ok, std::to_string(counted) + " parameters at every n"};
}

Outcome rpe_gradients(std::uint64_t seed) {
  Rng rng(seed);
  double worst = 0.0;
  for (const auto mode :
       {RpeInputMode::kRawInteger, RpeInputMode::kNormalized, RpeInputMode::kSinCos}) {
    RpeNet net(small_rpe(3, mode), rng);
    const std::size_t n = 5;
    RelPosCoefficients<double> g(n, 3);
    for (auto& v : g.values()) v = rng.uniform(-1.0, 1.0);
    const RpeGradients grads = rpe_backward(net, n, g);
    auto loss = [&]() {
      const auto t = rpe_forward(net, n);
      double s = 0.0;
      for (std::size_t i = 0; i < t.values().size(); ++i) s += t.values()[i] * g.values()[i];
      return s;
    };
    std::vector<const Matrix*> analytic;
    for (const Linear& lin : grads) {
      analytic.push_back(&lin.weight);
      analytic.push_back(&lin.bias);
    }
    std::size_t index = 0;
    net.for_each_parameter([&](const std::string&, Matrix& m) {
      const Matrix& a = *analytic[index++];
      for (Eigen::Index i = 0; i < m.size(); ++i) {
        double& v = m.data()[i];
        const double keep = v;
        v = keep + 1e-6;
        const double plus = loss();
        v = keep - 1e-6;
        const double minus = loss();
        v = keep;
        worst = std::max(worst, relative_error(a.data()[i], (plus - minus) / 2e-6));
      }
    });
  }
  return bound("max relative error", worst, 1e-5);
}

Outcome rpe_determinism(std::uint64_t seed) {
  Rng a(seed), b(seed);
  const RpeNet net_a(small_rpe(5), a), net_b(small_rpe(5), b);
  const bool ok = rpe_forward(net_a, 40) == rpe_forward(net_a, 40) &&
                  rpe_forward(net_a, 40) == rpe_forward(net_b, 40);
  return {ok, "repeat and re-seeded tables bit-identical"};
}

ToeplitzOperator test_operator(std::size_t d, bool causal, Rng& rng, double decay = 0.9) {
  TnoOptions opts;
  opts.decay = decay;
  opts.causal = causal;
  return ToeplitzOperator(RpeNet(small_rpe(d), rng), opts);
}

Matrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(-1.0, 1.0);
  return m;
}

Outcome tno_causality(std::uint64_t seed) {
  Rng rng(seed);
  for (const std::size_t n : {7u, 32u, 33u, 100u, 257u}) {
    const ToeplitzOperator op = test_operator(3, true, rng);
    const Matrix x = random_matrix(n, 3, rng);
    const Matrix y = tno_forward(op, x, 1);
    for (int t = 0; t < 10; ++t) {
      const std::size_t j = rng.below(n);
      Matrix xp = x;
      for (std::size_t r = j; r < n; ++r) {
        for (Eigen::Index c = 0; c < 3; ++c) xp(r, c) = rng.uniform(-5.0, 5.0);
      }
      const Matrix yp = tno_forward(op, xp, 1);
      if (j > 0 && yp.topRows(j) != y.topRows(j)) {
        return {false, "prefix changed at n=" + std::to_string(n) + ", j=" + std::to_string(j)};
      }
    }
  }
  return {true, "prefix outputs bit-identical under 50 suffix perturbations"};
}

Outcome decay_monotonicity() {
  for (const double lambda : {0.0, 0.5, 0.9, 0.99, 1.0}) {
    const std::size_t n = 64;
    RelPosCoefficients<double> ones(n, 2, std::vector<double>((2 * n - 1) * 2, 1.0));
    const auto eff = apply_decay_and_mask(ones, lambda, false);
    double prev = 2.0;
    for (std::ptrdiff_t k = 0; k < 64; ++k) {
      for (const std::ptrdiff_t s : {k, -k}) {
        const double expect = std::pow(lambda, static_cast<double>(k));
        if (eff.at(s, 0) != expect || eff.at(s, 1) != expect) {
          return {false, "lambda^|k| mismatch at k=" + std::to_string(s)};
        }
      }
      if (std::abs(eff.at(k, 0)) > prev) return {false, "increase at k=" + std::to_string(k)};
      prev = std::abs(eff.at(k, 0));
    }
  }
  return {true, "rpe = 1 gives |t_k| = lambda^|k| exactly, non-increasing"};
}

Outcome alibi_correspondence(std::uint64_t seed) {
  Rng rng(seed);
  double worst = 0.0;
  for (int t = 0; t < 200; ++t) {
    const double s = rng.uniform(-3.0, 3.0);
    const double m = -rng.uniform(0.0, 0.5);
    const double lambda = std::exp(m);
    RelPosCoefficients<double> table(64, 1, std::vector<double>(127, std::exp(s)));
    const auto eff = apply_decay_and_mask(table, lambda, false);
    for (std::ptrdiff_t k = 0; k < 64; ++k) {
      const double expect = std::exp(s + m * static_cast<double>(k));
      worst = std::max(worst, std::abs(eff.at(k, 0) - expect) / expect);
      worst = std::max(worst, std::abs(eff.at(-k, 0) - expect) / expect);
    }
  }
  return bound("max relative error", worst, 1e-12);
}

Outcome batch_consistency(std::uint64_t seed) {
  Rng rng(seed);
  for (const bool causal : {false, true}) {
    const ToeplitzOperator op = test_operator(4, causal, rng);
    const std::size_t n = 45, batch = 3;
    const Matrix x = random_matrix(n * batch, 4, rng);
    const Matrix y = tno_forward(op, x, batch);
    for (std::size_t b = 0; b < batch; ++b) {
      const Matrix xb = x.middleRows(static_cast<Eigen::Index>(b * n), n);
      if (tno_forward(op, xb, 1) != y.middleRows(static_cast<Eigen::Index>(b * n), n)) {
        return {false, "item " + std::to_string(b) + " differs"};
      }
    }
  }
  return {true, "batched and single-item outputs bit-identical"};
}

TokenBatch random_tokens(std::size_t batch, std::size_t n, std::size_t vocab, Rng& rng) {
  TokenBatch t{batch, n, {}};
  for (std::size_t i = 0; i < batch * n; ++i) {
    t.tokens.push_back(static_cast<std::int32_t>(rng.below(vocab)));
  }
  return t;
}

Outcome model_gradients(std::uint64_t seed) {
  const TnnModel model(gradient_check_config(), seed);
  Rng rng(seed + 1);
  const TokenBatch tokens = random_tokens(2, 6, 5, rng);
  const auto summary = check_model_gradients(model, tokens);
  double worst = 0.0;
  std::string classes;
  for (const auto& [name, s] : summary) {
    worst = std::max(worst, s.max_relative_error);
    classes += (classes.empty() ? "" : ",") + name;
  }
  Outcome o = bound("max relative error over " + classes, worst, 1e-4);
  for (const char* required : {"embedding", "gtu", "glu", "rpe", "norm", "head", "decay"}) {
    if (!summary.count(required)) return {false, std::string("class missing: ") + required};
  }
  return o;
}

ModelConfig small_causal_model() {
  ModelConfig c;
  c.vocab_size = 11;
  c.layers = 2;
  c.block.feature_dim = 8;
  c.block.gtu_dim = 12;
  c.block.glu_dim = 8;
  c.block.rpe.hidden_dim = 8;
  c.block.rpe.out_dim = 12;
  return c;
}

Outcome model_causality(std::uint64_t seed) {
  const TnnModel model(small_causal_model(), seed);
  Rng rng(seed + 2);
  const std::size_t n = 70;
  const TokenBatch base = random_tokens(1, n, 11, rng);
  const Matrix logits = model_forward(model, base);
  for (int t = 0; t < 100; ++t) {
    const std::size_t j = 1 + rng.below(n - 1);
    TokenBatch pert = base;
    for (std::size_t i = j; i < n; ++i) pert.tokens[i] = static_cast<std::int32_t>(rng.below(11));
    if (model_forward(model, pert).topRows(j) != logits.topRows(j)) {
      return {false, "prefix logits changed for suffix at " + std::to_string(j)};
    }
  }
  return {true, "100 suffix perturbations, prefix logits bit-identical"};
}

Outcome variable_length(std::uint64_t seed) {
  const TnnModel model(small_causal_model(), seed);
  const std::size_t before = model.parameter_count();
  Rng rng(seed + 3);
  const TokenBatch longest = random_tokens(1, 300, 11, rng);
  const Matrix reference = model_forward(model, longest);
  for (const std::size_t n : {1u, 2u, 31u, 32u, 33u, 64u, 129u, 200u}) {
    TokenBatch prefix{1, n, {longest.tokens.begin(), longest.tokens.begin() + n}};
    const Matrix logits = model_forward(model, prefix);
    if (logits != reference.topRows(static_cast<Eigen::Index>(n))) {
      return {false, "prefix logits differ at n=" + std::to_string(n)};
    }
  }
  if (model.parameter_count() != before) return {false, "parameter count changed"};
  return {true, "n in 1..300, shared-prefix logits bit-identical"};
}

Outcome parameter_formula(std::uint64_t seed) {
  for (const bool share : {false, true}) {
    for (const bool tie : {false, true}) {
      ModelConfig cfg = small_causal_model();
      cfg.share_rpe = share;
      cfg.tie_embeddings = tie;
      const TnnModel model(cfg, seed);
      std::size_t counted = 0;
      model.for_each_parameter([&](const std::string&, const Matrix& m) {
        counted += static_cast<std::size_t>(m.size());
      });
      if (counted != TnnModel::parameter_count(cfg)) {
        return {false, "formula " + std::to_string(TnnModel::parameter_count(cfg)) +
                           " vs counted " + std::to_string(counted)};
      }
    }
  }
  return {true, "closed form equals counted tensors for 4 configs"};
}

Outcome checkpoint_round_trip(std::uint64_t seed) {
  const TnnModel model(small_causal_model(), seed);
  CheckpointMetadata meta;
  meta.train_seq_len = 16;
  const std::string first = serialize_checkpoint(model, meta);
  const LoadedCheckpoint loaded = deserialize_checkpoint(first);
  const std::string second = serialize_checkpoint(loaded.model, loaded.metadata);
  Rng rng(seed + 4);
  const TokenBatch tokens = random_tokens(2, 40, 11, rng);
  const bool logits_equal = model_forward(model, tokens) == model_forward(loaded.model, tokens);
  return {first == second && logits_equal,
          std::string(first == second ? "bytes identical" : "bytes differ") +
              (logits_equal ? ", logits bit-equal" : ", logits differ")};
}

Outcome cnn_equivalence(std::uint64_t seed, bool through_fft, CirculantStrategy strategy) {
  Rng rng(seed);
  double worst = 0.0;
  for (int t = 0; t < 200; ++t) {
    const std::size_t m = 1 + rng.below(8), n = 1 + rng.below(64);
    ConvKernel k;
    for (std::size_t i = 0; i < m; ++i) k.taps.push_back(rng.uniform(-1.0, 1.0));
    std::vector<double> x(n);
    for (auto& v : x) v = rng.uniform(-1.0, 1.0);
    const ConvToeplitz op = conv_to_toeplitz(k, n);
    const Sequence<double> z = op.pad(x);
    const Sequence<double> y =
        through_fft ? fft_matvec(op.coeffs, z, strategy) : naive_matvec(op.coeffs, z);
    const auto expect = direct_convolution(k.taps, x);
    worst = std::max(worst, vector_error(y.values(), expect));
  }
  return bound("max relative error", worst, through_fft ? 1e-9 : 1e-12);
}

Outcome ssm_equivalence(std::uint64_t seed, bool through_fft, CirculantStrategy strategy) {
  Rng rng(seed);
  double worst = 0.0;
  for (int t = 0; t < 200; ++t) {
    const std::size_t h = 1 + rng.below(4), n = 1 + rng.below(128);
    const StateSpaceParams p = random_stable_system(h, rng);
    std::vector<double> x(n);
    for (auto& v : x) v = rng.uniform(-1.0, 1.0);
    const auto coeffs = ssm_to_toeplitz(p, n);
    const Sequence<double> xs(n, 1, x);
    const Sequence<double> y =
        through_fft ? fft_matvec(coeffs, xs, strategy) : naive_matvec(coeffs, xs);
    worst = std::max(worst, vector_error(y.values(), simulate_recurrence(p, x)));
  }
  return bound("max relative error", worst, through_fft ? 1e-9 : 1e-10);
}

// A small corpus with enough structure for a few training steps.
std::string synthetic_text(std::size_t bytes, std::uint64_t seed) {
  static const char* words[] = {"the", "toeplitz", "matrix", "mixes", "tokens", "with",
                                "a",   "decay",    "bias",   "and",   "relative", "positions"};
  Rng rng(seed);
  std::string out;
  while (out.size() < bytes) {
    out += words[rng.below(12)];
    out += rng.below(8) == 0 ? ".\n" : " ";
  }
  return out;
}

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(std::uint64_t seed) {
    path = std::filesystem::temp_directory_path() /
           ("tnn-selftest-" + std::to_string(seed) + "-" +
            std::to_string(std::chrono::steady_clock::now().time_since_epoch().count()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
};

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

RunConfig tiny_run(const TempDir& dir, std::uint64_t seed) {
  RunConfig cfg;
  cfg.model = small_causal_model();
  cfg.seq_len = 24;
  cfg.batch_size = 2;
  cfg.steps = 6;
  cfg.eval_every = 3;
  cfg.eval_windows = 2;
  cfg.log_every = 1;
  cfg.checkpoint_every = 0;
  cfg.adam.warmup_steps = 2;
  cfg.seed = seed;
  cfg.deterministic = true;
  cfg.corpus = dir.path / "corpus.txt";
  std::ofstream(cfg.corpus, std::ios::binary) << synthetic_text(4000, seed);
  return cfg;
}

Outcome deterministic_training(std::uint64_t seed) {
  TempDir dir(seed);
  RunConfig cfg = tiny_run(dir, seed);
  std::ostringstream log;
  std::string metrics[2], ckpt[2];
  for (int r = 0; r < 2; ++r) {
    cfg.metrics = dir.path / ("metrics" + std::to_string(r) + ".jsonl");
    cfg.checkpoint = dir.path / ("model" + std::to_string(r) + ".ckpt");
    cmd_train(cfg, log);
    metrics[r] = read_file(cfg.metrics);
    ckpt[r] = read_file(cfg.checkpoint);
  }
  const bool ok = !metrics[0].empty() && metrics[0] == metrics[1] && ckpt[0] == ckpt[1];
  return {ok, ok ? "metrics and checkpoints byte-identical across runs" : "runs differ"};
}

Outcome csv_schema(std::uint64_t seed) {
  TempDir dir(seed + 1);
  RunConfig cfg = tiny_run(dir, seed);
  cfg.metrics = dir.path / "metrics.jsonl";
  cfg.checkpoint = dir.path / "model.ckpt";
  std::ostringstream log;
  cmd_train(cfg, log);

  std::ostringstream bench_csv, extra_csv;
  BenchOptions bo;
  bo.min_n = 16;
  bo.max_n = 32;
  bo.d = 2;
  bo.trials = 5;
  write_bench_csv(run_bench(bo), bench_csv);
  EvalOptions eo;
  eo.checkpoint = cfg.checkpoint;
  eo.data = cfg.corpus;
  const std::vector<std::size_t> lengths{24, 12, 48};
  const auto rows = cmd_extrapolate(eo, lengths);
  write_extrapolation_csv(rows, extra_csv);

  const std::string bench = bench_csv.str(), extra = extra_csv.str();
  const std::string metrics = read_file(cfg.metrics);
  std::vector<std::string> problems;
  if (bench.rfind("method,n,d,trials,median_seconds,doubling_ratio,checksum,status\n", 0) != 0) {
    problems.push_back("bench header");
  }
  if (std::count(bench.begin(), bench.end(), '\n') != 1 + 3 * 2) problems.push_back("bench rows");
  if (extra.rfind("length,loss,perplexity,tokens_evaluated\n", 0) != 0) {
    problems.push_back("extrapolate header");
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].length != lengths[i]) problems.push_back("extrapolate order");
  }
  for (const std::string* s : {&bench, &extra, &metrics}) {
    if (s->find('\r') != std::string::npos) problems.push_back("CR line ending");
  }
  std::istringstream lines(metrics);
  for (std::string line; std::getline(lines, line);) {
    const bool train = line.find("\"split\":\"train\"") != std::string::npos;
    const char* keys_train[] = {"\"step\"", "\"loss\"", "\"lr\"", "\"grad_norm\"",
                                "\"wall_seconds\""};
    const char* keys_val[] = {"\"step\"", "\"loss\"", "\"tokens\"", "\"wall_seconds\""};
    if (train) {
      for (const char* k : keys_train) {
        if (line.find(k) == std::string::npos) problems.push_back("metrics key");
      }
    } else {
      for (const char* k : keys_val) {
        if (line.find(k) == std::string::npos) problems.push_back("metrics key");
      }
    }
  }
  if (problems.empty()) return {true, "bench, extrapolate and metrics schemas as documented"};
  std::string detail;
  for (const auto& p : problems) detail += (detail.empty() ? "" : "; ") + p;
  return {false, detail};
}

Outcome bench_gate(std::uint64_t seed, fault::KernelFault configured) {
  fault::set_kernel_fault(fault::KernelFault::kPaper2n);
  BenchOptions bo;
  bo.min_n = 16;
  bo.max_n = 64;
  bo.d = 3;
  bo.trials = 5;
  bo.seed = seed;
  const auto records = run_bench(bo);
  fault::set_kernel_fault(configured);
  for (const auto& r : records) {
    const bool broken = r.method == BenchMethod::kFftPaper2n;
    if (broken && (r.status != "failed" || r.median_seconds)) {
      return {false, "timing reported for a failed output"};
    }
    if (!broken && (r.status != "ok" || !r.median_seconds)) {
      return {false, "healthy method not timed"};
    }
  }
  return {true, "sabotaged method reported failed without timing"};
}

}  // namespace

ModelConfig gradient_check_config() {
  ModelConfig c;
  c.vocab_size = 5;
  c.layers = 1;
  c.block.feature_dim = 4;
  c.block.gtu_dim = 8;
  c.block.glu_dim = 4;
  c.block.tno.causal = true;
  c.block.tno.learnable_decay = true;
  c.block.rpe.layers = 3;
  c.block.rpe.hidden_dim = 8;
  c.block.rpe.out_dim = 8;
  return c;
}

std::vector<PropertyResult> run_selftest(const SelftestOptions& options, std::ostream* progress) {
  fault::set_kernel_fault(options.fault);
  const std::uint64_t s = options.seed;
  using P = CirculantStrategy;
  struct Entry {
    const char* module;
    std::string name;
    std::function<Outcome()> run;
    bool timing = false;
  };
  const std::vector<Entry> entries = {
      {"toeplitz_kernel", "oracle_equivalence.paper_2n.f64",
       [&] { return oracle_equivalence<double>(P::kPaper2n, s, 500); }},
      {"toeplitz_kernel", "oracle_equivalence.padded_pow2.f64",
       [&] { return oracle_equivalence<double>(P::kPaddedPow2, s, 500); }},
      {"toeplitz_kernel", "oracle_equivalence.paper_2n.f32",
       [&] { return oracle_equivalence<float>(P::kPaper2n, s, 300); }},
      {"toeplitz_kernel", "oracle_equivalence.padded_pow2.f32",
       [&] { return oracle_equivalence<float>(P::kPaddedPow2, s, 300); }},
      {"toeplitz_kernel", "linearity", [&] { return linearity(s); }},
      {"toeplitz_kernel", "embedding_round_trip", [&] { return embedding_round_trip(s); }},
      {"toeplitz_kernel", "adjoint_identity", [&] { return adjoint_identity(s); }},
      {"toeplitz_kernel", "gradient_correctness", [&] { return kernel_gradients(s); }},
      {"toeplitz_kernel", "scaling", [&] { return scaling(s); }, true},
      {"rpe", "length_independence", [&] { return rpe_length_independence(s); }},
      {"rpe", "parameter_count_independent_of_n", [&] { return rpe_parameter_count(s); }},
      {"rpe", "gradient_correctness", [&] { return rpe_gradients(s); }},
      {"rpe", "determinism", [&] { return rpe_determinism(s); }},
      {"tno", "causality", [&] { return tno_causality(s); }},
      {"tno", "decay_monotonicity", [&] { return decay_monotonicity(); }},
      {"tno", "alibi_correspondence", [&] { return alibi_correspondence(s); }},
      {"tno", "batch_consistency", [&] { return batch_consistency(s); }},
      {"model", "end_to_end_gradients", [&] { return model_gradients(s); }},
      {"model", "causality", [&] { return model_causality(s); }},
      {"model", "variable_length_inference", [&] { return variable_length(s); }},
      {"model", "parameter_count_formula", [&] { return parameter_formula(s); }},
      {"model", "checkpoint_round_trip", [&] { return checkpoint_round_trip(s); }},
      {"equivalence", "cnn_equivalence", [&] { return cnn_equivalence(s, false, P::kPaddedPow2); }},
      {"equivalence", "state_space_equivalence",
       [&] { return ssm_equivalence(s, false, P::kPaddedPow2); }},
      {"equivalence", "cnn_via_fft.paper_2n", [&] { return cnn_equivalence(s, true, P::kPaper2n); }},
      {"equivalence", "cnn_via_fft.padded_pow2",
       [&] { return cnn_equivalence(s, true, P::kPaddedPow2); }},
      {"equivalence", "state_space_via_fft.paper_2n",
       [&] { return ssm_equivalence(s, true, P::kPaper2n); }},
      {"equivalence", "state_space_via_fft.padded_pow2",
       [&] { return ssm_equivalence(s, true, P::kPaddedPow2); }},
      {"cli", "deterministic_commands", [&] { return deterministic_training(s); }},
      {"cli", "schema_stable_outputs", [&] { return csv_schema(s); }},
      {"cli", "bench_correctness_gate", [&] { return bench_gate(s, options.fault); }},
  };

  std::vector<PropertyResult> results;
  for (const Entry& e : entries) {
    PropertyResult r{e.module, e.name, "", "", 0.0};
    if (e.timing && !options.timing) {
      r.status = "skip";
      r.detail = "timing disabled";
    } else {
      const auto start = std::chrono::steady_clock::now();
      try {
        const Outcome o = e.run();
        r.status = o.passed ? "pass" : "fail";
        r.detail = o.detail;
      } catch (const std::exception& ex) {
        r.status = "fail";
        r.detail = std::string("exception: ") + ex.what();
      }
      r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
    if (progress) {
      *progress << std::left << std::setw(6) << r.status << r.module << "/" << r.name << "\n";
      progress->flush();
    }
    results.push_back(std::move(r));
  }
  fault::set_kernel_fault(fault::KernelFault::kNone);
  return results;
}

void print_selftest_table(const std::vector<PropertyResult>& results, std::ostream& out) {
  std::size_t width = 8;
  for (const auto& r : results) width = std::max(width, r.module.size() + r.name.size() + 1);
  out << std::left << std::setw(static_cast<int>(width) + 2) << "property" << std::setw(7)
      << "status" << std::setw(10) << "seconds" << "detail\n";
  for (const auto& r : results) {
    out << std::left << std::setw(static_cast<int>(width) + 2) << (r.module + "/" + r.name)
        << std::setw(7) << r.status << std::setw(10) << std::fixed << std::setprecision(2)
        << r.seconds << r.detail << "\n";
  }
  std::size_t passed = 0, failed = 0, skipped = 0;
  for (const auto& r : results) {
    (r.status == "pass" ? passed : r.status == "fail" ? failed : skipped)++;
  }
  out << passed << " passed, " << failed << " failed, " << skipped << " skipped\n";
  out << std::defaultfloat;
}

bool all_passed(const std::vector<PropertyResult>& results) {
  return std::none_of(results.begin(), results.end(),
                      [](const PropertyResult& r) { return r.status == "fail"; });
}

}  // namespace tnn
