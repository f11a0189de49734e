// Copyright 2026 Tailcut Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

/**
 * Replayable logit traces: a recorded sequence of per-step next-token
 * distributions, optionally with the gold (teacher-forced) token, so any
 * truncation policy can run offline against externally dumped model output.
 *
 * File format: newline-delimited JSON. The first record is a header
 *   {"format_version": 1, "vocab_size": V}
 * and every following record is one step, either
 *   {"vocab_size": V, "full": [p0, ...], "gold": g?}            (full vector)
 *   {"vocab_size": V, "ids": [...], "probs": [...],
 *    "tail_mass": t, "gold": g?}                                 (compact)
 * Compact records store the top-m probabilities in descending order; the
 * remaining mass t spreads uniformly over the untracked tokens on
 * expansion, which is exactly the known/unknown decomposition behind the
 * confidence state metric. Floats are 64-bit decimal text.
 */

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tailcut/dist.hpp"

namespace tailcut::lm {

struct TraceStep {
  int vocab_size = 0;
  bool full = false;             // full probability vector in probs
  std::vector<int32_t> ids;      // compact only: tracked token ids
  std::vector<double> probs;     // tracked (compact) or all (full) probabilities
  double tail_mass = 0.0;        // compact only
  std::optional<int32_t> gold;
};

struct LogitTrace {
  int vocab_size = 0;
  std::vector<TraceStep> steps;
};

/// Parse error with the 1-based line number of the offending record.
struct TraceFormatError : std::runtime_error {
  TraceFormatError(int line, const std::string& what)
      : std::runtime_error("trace line " + std::to_string(line) + ": " + what), line(line) {}
  int line;
};

/**
 * Reconstruct the full distribution of one step: tracked probabilities at
 * their ids, tail_mass/(V-m) everywhere else. Full records pass through
 * unchanged. Throws std::invalid_argument if tail_mass is negative beyond
 * tolerance (small negatives clamp to 0) or the record is inconsistent.
 */
dist::TokenDistribution expand(const TraceStep& step);

/**
 * Compact a distribution to its top_m probabilities (ties by ascending
 * token id) plus the aggregated tail mass.
 */
TraceStep compact(const dist::TokenDistribution& d, int top_m,
                  std::optional<int32_t> gold = std::nullopt);

LogitTrace read_trace(std::istream& in);
LogitTrace read_trace_file(const std::string& path);
void write_trace(std::ostream& out, const LogitTrace& trace);
void write_trace_file(const std::string& path, const LogitTrace& trace);

}  // namespace tailcut::lm
