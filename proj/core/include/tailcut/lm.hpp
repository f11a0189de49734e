// Copyright 2026 Tailcut Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

/**
 * Desk-scale distribution source: a trainable byte-level n-gram language
 * model with add-k smoothing. Byte tokens (vocabulary 256) keep everything
 * tokenizer-free; smoothing guarantees full support, so predict() always
 * returns a valid distribution.
 */

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "tailcut/dist.hpp"

namespace tailcut::lm {

class NgramModel {
 public:
  static constexpr int kVocabSize = 256;
  static constexpr int kMaxOrder = 8;

  /**
   * Count all m-grams of the corpus for every context length 0..order-1,
   * so prediction can fall back to shorter contexts near sequence starts.
   *
   * Throws std::invalid_argument for an empty corpus, corpus shorter than
   * order, order outside [1, kMaxOrder], or smoothing_k <= 0.
   */
  static NgramModel train(std::span<const uint8_t> corpus, int order, double smoothing_k);

  /**
   * Next-byte distribution given the trailing bytes of context:
   *   P(b | ctx) = (count(ctx, b) + k) / (total(ctx) + k * 256)
   * using the last min(|context|, order-1) bytes. Unseen contexts yield
   * the uniform distribution.
   */
  dist::TokenDistribution predict(std::span<const uint8_t> context) const;

  int order() const { return order_; }
  double smoothing_k() const { return smoothing_k_; }

  /// Serialization is byte-deterministic: identical models produce
  /// identical files regardless of training-time hash ordering.
  void save(std::ostream& out) const;
  static NgramModel load(std::istream& in);

  bool operator==(const NgramModel& other) const;

 private:
  struct Row {
    std::vector<std::pair<uint8_t, uint64_t>> counts;  // sorted by byte
    uint64_t total = 0;
  };

  NgramModel(int order, double smoothing_k) : order_(order), smoothing_k_(smoothing_k) {}

  int order_;
  double smoothing_k_;
  // tables_[L]: contexts of exactly L bytes (as raw byte strings).
  std::vector<std::unordered_map<std::string, Row>> tables_;
};

}  // namespace tailcut::lm
