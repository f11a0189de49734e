// Copyright 2026 Tailcut Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

/**
 * Automatic text-quality metrics (rep-n, diversity, HIT@k) and the pooled
 * candidate-set statistics reported by hyperparameter sweeps. All pure; the
 * stats accumulator merges commutatively (count/sum/sum-of-squares), so
 * partial reductions can run in parallel.
 */

#include <cstdint>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tailcut/trace.hpp"

namespace tailcut::metrics {

/// A metric was asked of a sequence too short to define it.
struct MetricUndefinedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Per-step truncation diagnostics recorded during generation.
struct StepDiag {
  int k = 0;
  double cumulative_prob = 0.0;
  double conf_at_k = 0.0;
};

/// One generated continuation plus its per-step diagnostics.
struct GenerationRecord {
  std::vector<int32_t> prefix_tokens;
  std::vector<int32_t> continuation_tokens;
  std::vector<StepDiag> per_step;  // same length as continuation_tokens
};

/// Pooled mean/std (population) over all steps; prob and conf scaled x100.
struct SweepStats {
  double mean_k = 0.0, std_k = 0.0;
  double mean_cumprob = 0.0, std_cumprob = 0.0;
  double mean_conf = 0.0, std_conf = 0.0;
};

/**
 * rep-n: 100 * (1 - unique n-grams / total n-grams).
 * Throws MetricUndefinedError when the sequence is shorter than n.
 */
template <class Token>
double rep_n(std::span<const Token> tokens, int n) {
  if (n < 2) {
    throw std::invalid_argument("rep_n: n must be >= 2");
  }
  if (tokens.size() < static_cast<size_t>(n)) {
    throw MetricUndefinedError("rep_n undefined: sequence shorter than n");
  }
  std::set<std::vector<Token>> unique;
  const size_t total = tokens.size() - n + 1;
  for (size_t i = 0; i < total; ++i) {
    unique.emplace(tokens.begin() + i, tokens.begin() + i + n);
  }
  return 100.0 * (1.0 - static_cast<double>(unique.size()) / static_cast<double>(total));
}

/**
 * diversity: 100 * prod_{n=2..4} (1 - rep_n/100).
 * Throws MetricUndefinedError when the sequence is shorter than 4.
 */
template <class Token>
double diversity(std::span<const Token> tokens) {
  if (tokens.size() < 4) {
    throw MetricUndefinedError("diversity undefined: sequence shorter than 4");
  }
  double acc = 100.0;
  for (int n = 2; n <= 4; ++n) {
    acc *= 1.0 - rep_n(tokens, n) / 100.0;
  }
  return acc;
}

/// Whitespace-split words, the default n-gram unit for text output.
std::vector<std::string> split_words(std::string_view text);

/**
 * HIT@k: percentage of trace steps whose gold token ranks among the k most
 * probable (ties by ascending token id). Throws std::invalid_argument when
 * any step lacks a gold token or the trace is empty.
 */
double hit_at_k(const lm::LogitTrace& trace, int k);

/// Streaming pooled-stats accumulator; merge() is commutative.
class StatsAccumulator {
 public:
  void add(const StepDiag& d);
  void merge(const StatsAccumulator& other);
  uint64_t count() const { return n_; }
  SweepStats finalize() const;  // throws std::invalid_argument if empty

 private:
  uint64_t n_ = 0;
  double sum_k_ = 0, sumsq_k_ = 0;
  double sum_p_ = 0, sumsq_p_ = 0;
  double sum_c_ = 0, sumsq_c_ = 0;
};

/// Pooled statistics over every step of every record.
SweepStats aggregate(std::span<const GenerationRecord> records);

}  // namespace tailcut::metrics
