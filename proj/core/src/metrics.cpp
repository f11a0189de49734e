// Copyright 2026 Tailcut Authors
// SPDX-License-Identifier: Apache-2.0

#include "tailcut/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace tailcut::metrics {

std::vector<std::string> split_words(std::string_view text) {
  std::vector<std::string> words;
  size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    size_t start = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i > start) words.emplace_back(text.substr(start, i - start));
  }
  return words;
}

double hit_at_k(const lm::LogitTrace& trace, int k) {
  if (k < 1) {
    throw std::invalid_argument("hit_at_k: k must be >= 1");
  }
  if (trace.steps.empty()) {
    throw std::invalid_argument("hit_at_k: empty trace");
  }
  size_t hits = 0;
  for (const lm::TraceStep& step : trace.steps) {
    if (!step.gold) {
      throw std::invalid_argument("hit_at_k: step without gold token");
    }
    const dist::TokenDistribution d = lm::expand(step);
    const int32_t gold = *step.gold;
    const double gold_p = d.probs[gold];
    // rank = tokens strictly more probable, plus equal-probability tokens
    // with a smaller id (the deterministic tie order).
    int rank = 0;
    for (int32_t t = 0; t < d.vocab_size(); ++t) {
      if (d.probs[t] > gold_p || (d.probs[t] == gold_p && t < gold)) ++rank;
    }
    if (rank < k) ++hits;
  }
  return 100.0 * static_cast<double>(hits) / static_cast<double>(trace.steps.size());
}

void StatsAccumulator::add(const StepDiag& d) {
  ++n_;
  sum_k_ += d.k;
  sumsq_k_ += static_cast<double>(d.k) * d.k;
  sum_p_ += d.cumulative_prob;
  sumsq_p_ += d.cumulative_prob * d.cumulative_prob;
  sum_c_ += d.conf_at_k;
  sumsq_c_ += d.conf_at_k * d.conf_at_k;
}

void StatsAccumulator::merge(const StatsAccumulator& other) {
  n_ += other.n_;
  sum_k_ += other.sum_k_;
  sumsq_k_ += other.sumsq_k_;
  sum_p_ += other.sum_p_;
  sumsq_p_ += other.sumsq_p_;
  sum_c_ += other.sum_c_;
  sumsq_c_ += other.sumsq_c_;
}

SweepStats StatsAccumulator::finalize() const {
  if (n_ == 0) {
    throw std::invalid_argument("StatsAccumulator: no steps");
  }
  const double n = static_cast<double>(n_);
  auto pop_std = [n](double sum, double sumsq) {
    const double mean = sum / n;
    return std::sqrt(std::max(0.0, sumsq / n - mean * mean));
  };
  SweepStats out;
  out.mean_k = sum_k_ / n;
  out.std_k = pop_std(sum_k_, sumsq_k_);
  out.mean_cumprob = 100.0 * sum_p_ / n;
  out.std_cumprob = 100.0 * pop_std(sum_p_, sumsq_p_);
  out.mean_conf = 100.0 * sum_c_ / n;
  out.std_conf = 100.0 * pop_std(sum_c_, sumsq_c_);
  return out;
}

SweepStats aggregate(std::span<const GenerationRecord> records) {
  if (records.empty()) {
    throw std::invalid_argument("aggregate: no records");
  }
  StatsAccumulator acc;
  for (const GenerationRecord& rec : records) {
    for (const StepDiag& d : rec.per_step) {
      acc.add(d);
    }
  }
  return acc.finalize();
}

}  // namespace tailcut::metrics
