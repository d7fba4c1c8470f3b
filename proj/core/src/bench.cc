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

#include "tnn/bench.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <map>
#include <new>

#include "tnn/errors.h"
#include "tnn/random.h"
#include "tnn/toeplitz.h"

namespace tnn {
namespace {

template <typename T>
double normwise_error(const Sequence<T>& actual, const Sequence<T>& expected) {
  double diff = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < actual.values().size(); ++i) {
    diff = std::max(diff, std::abs(static_cast<double>(actual.values()[i]) -
                                   static_cast<double>(expected.values()[i])));
    scale = std::max(scale, std::abs(static_cast<double>(expected.values()[i])));
  }
  return scale == 0.0 ? diff : diff / scale;
}

template <typename T>
double checksum(const Sequence<T>& y) {
  double s = 0.0;
  for (const T v : y.values()) s += static_cast<double>(v);
  return s;
}

template <typename T>
Sequence<T> run_method(BenchMethod method, const RelPosCoefficients<T>& coeffs,
                       const Sequence<T>& x) {
  switch (method) {
    case BenchMethod::kNaive:
      return naive_matvec(coeffs, x);
    case BenchMethod::kFftPaper2n:
      return fft_matvec(coeffs, x, CirculantStrategy::kPaper2n);
    case BenchMethod::kFftPow2:
      return fft_matvec(coeffs, x, CirculantStrategy::kPaddedPow2);
  }
  throw Error("unknown bench method");
}

template <typename T>
struct SizeCase {
  std::size_t n = 0;
  std::optional<RelPosCoefficients<T>> coeffs;
  std::optional<Sequence<T>> x;
};

// Verification runs size by size; timing then runs in rounds that visit
// every (size, method) pair once, so slow periods on a shared machine spread
// over all sizes instead of skewing one of them.
template <typename T>
std::vector<BenchRecord> sweep(const BenchOptions& options) {
  using Clock = std::chrono::steady_clock;
  const double tolerance = std::is_same_v<T, float> ? 1e-4 : 1e-9;
  const std::size_t d = options.d;
  std::vector<BenchRecord> records;
  std::vector<SizeCase<T>> cases;
  Rng rng(options.seed);

  for (std::size_t n = options.min_n; n <= options.max_n; n *= 2) {
    SizeCase<T> sc;
    sc.n = n;
    std::optional<Sequence<T>> reference;
    bool out_of_memory = false;
    try {
      std::vector<T> tv((2 * n - 1) * d), xv(n * d);
      for (auto& v : tv) v = static_cast<T>(rng.uniform(-1.0, 1.0));
      for (auto& v : xv) v = static_cast<T>(rng.uniform(-1.0, 1.0));
      sc.coeffs.emplace(n, d, std::move(tv));
      sc.x.emplace(n, d, std::move(xv));
      reference.emplace(naive_matvec(*sc.coeffs, *sc.x));
    } catch (const std::bad_alloc&) {
      out_of_memory = true;
    }
    for (const BenchMethod method : options.methods) {
      BenchRecord rec;
      rec.method = method;
      rec.n = n;
      rec.d = d;
      rec.status = "ok";
      if (out_of_memory) {
        rec.status = "skipped";
      } else {
        try {
          const Sequence<T> y = run_method(method, *sc.coeffs, *sc.x);
          rec.checksum = checksum(y);
          if (!(normwise_error(y, *reference) <= tolerance)) {
            rec.status = "failed";
          } else if (method == BenchMethod::kNaive && options.naive_time_limit_n > 0 &&
                     n > options.naive_time_limit_n) {
            rec.status = "skipped";
          }
        } catch (const std::bad_alloc&) {
          rec.status = "skipped";
        }
      }
      records.push_back(rec);
    }
    cases.push_back(std::move(sc));
  }

  const std::size_t methods = options.methods.size();
  std::vector<std::vector<double>> times(records.size());
  auto for_each_timed = [&](auto&& body) {
    for (std::size_t s = 0; s < cases.size(); ++s) {
      for (std::size_t m = 0; m < methods; ++m) {
        const std::size_t r = s * methods + m;
        if (records[r].status == "ok") body(r, cases[s], records[r]);
      }
    }
  };
  for (std::size_t w = 0; w < options.warmup; ++w) {
    for_each_timed([&](std::size_t, SizeCase<T>& sc, BenchRecord& rec) {
      run_method(rec.method, *sc.coeffs, *sc.x);
    });
  }
  for (std::size_t t = 0; t < options.trials; ++t) {
    for_each_timed([&](std::size_t r, SizeCase<T>& sc, BenchRecord& rec) {
      const auto start = Clock::now();
      const Sequence<T> out = run_method(rec.method, *sc.coeffs, *sc.x);
      times[r].push_back(std::chrono::duration<double>(Clock::now() - start).count());
      if (checksum(out) != rec.checksum) {
        throw NumericError("bench: non-deterministic output");
      }
    });
  }

  std::map<BenchMethod, double> previous;
  for (std::size_t r = 0; r < records.size(); ++r) {
    BenchRecord& rec = records[r];
    if (rec.status != "ok") {
      previous.erase(rec.method);
      continue;
    }
    std::vector<double>& v = times[r];
    std::sort(v.begin(), v.end());
    const std::size_t mid = v.size() / 2;
    const double median = v.size() % 2 == 1 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
    rec.trials = v.size();
    rec.median_seconds = median;
    if (auto it = previous.find(rec.method); it != previous.end() && it->second > 0.0) {
      rec.doubling_ratio = median / it->second;
    }
    previous[rec.method] = median;
  }
  return records;
}

}  // namespace

std::string_view to_string(BenchMethod method) {
  switch (method) {
    case BenchMethod::kNaive:
      return "naive";
    case BenchMethod::kFftPaper2n:
      return "fft_paper2n";
    case BenchMethod::kFftPow2:
      return "fft_pow2";
  }
  return "unknown";
}

BenchMethod parse_bench_method(std::string_view name) {
  if (name == "naive") return BenchMethod::kNaive;
  if (name == "fft_paper2n") return BenchMethod::kFftPaper2n;
  if (name == "fft_pow2") return BenchMethod::kFftPow2;
  throw ConfigError("unknown bench method '" + std::string(name) + "'");
}

void BenchOptions::validate() const {
  if (min_n < 16) throw ConfigError("bench: min_n must be >= 16");
  if (max_n < min_n) throw ConfigError("bench: max_n must be >= min_n");
  if (d < 1) throw ConfigError("bench: d must be >= 1");
  if (trials < kMinBenchTrials) {
    throw ConfigError("bench: trials must be >= " + std::to_string(kMinBenchTrials));
  }
  if (methods.empty()) throw ConfigError("bench: no methods selected");
}

std::vector<BenchRecord> run_bench(const BenchOptions& options) {
  options.validate();
  return options.precision == Precision::kF32 ? sweep<float>(options) : sweep<double>(options);
}

void write_bench_csv(const std::vector<BenchRecord>& records, std::ostream& out) {
  out << "method,n,d,trials,median_seconds,doubling_ratio,checksum,status\n";
  for (const auto& r : records) {
    out << to_string(r.method) << ',' << r.n << ',' << r.d << ',' << r.trials << ',';
    if (r.median_seconds) {
      out << std::setprecision(6) << std::scientific << *r.median_seconds;
    } else {
      out << '-';
    }
    out << ',';
    if (r.doubling_ratio) {
      out << std::setprecision(4) << std::fixed << *r.doubling_ratio;
    } else {
      out << '-';
    }
    out << ',';
    if (r.status == "skipped" && r.checksum == 0.0) {
      out << '-';
    } else {
      out << std::setprecision(9) << std::scientific << r.checksum;
    }
    out << ',' << r.status << '\n';
    out << std::defaultfloat;
  }
}

}  // namespace tnn
