// Copyright 2026 Tailcut Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

/**
 * Probability-vector math for next-token distributions: normalization,
 * entropy, confidence, and the per-rank confidence increments that drive
 * adaptive truncation.
 *
 * Conventions (applied uniformly):
 * - Natural logarithm everywhere. Confidence is base-invariant as long as
 *   numerator and denominator share a base, so nats are used throughout.
 * - 0 * ln 0 := 0, and probabilities below 1e-15 contribute nothing to
 *   entropy sums (guards ln of denormals).
 * - Ties in probability sort by ascending original token id, so the whole
 *   pipeline is deterministic.
 */

#include <cstdint>
#include <span>
#include <vector>

namespace tailcut::dist {

/// Absolute tolerance for probability mass checks (sum-to-one, residuals).
inline constexpr double kMassTolerance = 1e-9;

/// Probabilities below this contribute 0 to entropy-style sums.
inline constexpr double kEntropyFloor = 1e-15;

/**
 * A full probability vector over a vocabulary.
 *
 * Invariants (enforced by from_probs):
 * - every entry is finite and >= 0
 * - entries sum to 1 within kMassTolerance
 * - vocab_size >= 2
 */
struct TokenDistribution {
  std::vector<double> probs;

  int vocab_size() const { return static_cast<int>(probs.size()); }

  /// Validating factory; throws std::invalid_argument on any violation.
  static TokenDistribution from_probs(std::vector<double> probs);
};

/**
 * A distribution sorted by descending probability, keeping the permutation
 * back to original token ids and the prefix sums of the sorted entries.
 *
 * perm[i] is the original token id of the i-th largest probability; equal
 * probabilities order by ascending token id.
 */
struct SortedDistribution {
  std::vector<double> sorted_probs;  // nonincreasing
  std::vector<int32_t> perm;         // original ids, |V| entries
  std::vector<double> cumsum;        // cumsum[i] = sum of sorted_probs[0..i]

  int vocab_size() const { return static_cast<int>(sorted_probs.size()); }

  static SortedDistribution from(const TokenDistribution& d);

  /// For inputs already in descending order (identity permutation).
  /// Validates ordering and mass like from_probs.
  static SortedDistribution from_sorted(std::vector<double> sorted);
};

/**
 * The confidence ladder of a sorted distribution.
 *
 * conf_states[k] is the confidence of the system when the top-k
 * probabilities are known and the residual mass is spread uniformly over
 * the remaining |V|-k tokens:
 *
 *   Conf_k = 1 + (sum_{i<=k} p_i ln p_i
 *                 + (1 - sum_{i<=k} p_i) ln((1 - sum_{i<=k} p_i)/(|V|-k)))
 *                / ln |V|
 *
 * with the k=|V| unknown term defined as 0. conf_states[0] = 0 and
 * conf_states[|V|] = confidence(d). delta_conf is the exact first
 * difference; it is provably nonnegative, so conf_states is nondecreasing.
 *
 * lower_bound / upper_bound hold the analytic envelope
 *   lower[k-1] = p_k ln(|V|-k+1) / ln|V|
 *   upper[k-1] = (1 - sum_{i<=k-1} p_i) ln(|V|-k+1) / ln|V|
 * Both shrink to zero as k grows. delta_conf <= upper holds pointwise;
 * the lower expression is *not* a pointwise minorant of delta_conf (it is
 * tight only when the tail past k is empty; the guaranteed floor is 0).
 * The vectors are kept as reported diagnostics.
 */
struct ConfProfile {
  std::vector<double> conf_states;  // |V|+1 entries, in [0,1], nondecreasing
  std::vector<double> delta_conf;   // |V| entries, delta at k = index+1
  std::vector<double> lower_bound;  // |V| entries
  std::vector<double> upper_bound;  // |V| entries
};

/**
 * Temperature softmax with the usual max-shift for stability:
 *   probs[i] = exp(logits[i]/T - m) / sum_j exp(logits[j]/T - m),
 * m = max_j logits[j]/T.
 *
 * Throws std::invalid_argument for non-finite logits or T <= 0.
 */
TokenDistribution softmax(std::span<const double> logits, double temperature);

/// Shannon entropy in nats: H = -sum p ln p, in [0, ln |V|].
double entropy(const TokenDistribution& d);

/// Min-max scaled entropy: Conf = 1 - H/ln|V|, in [0,1].
/// 0 for uniform, 1 for one-hot.
double confidence(const TokenDistribution& d);

/**
 * Full confidence ladder in one O(|V|) pass over the sorted entries.
 * Matches a per-k re-evaluation of the state formula to ~1e-12.
 *
 * Residual masses 1 - cumsum that land in (-kMassTolerance, 0) from
 * floating-point cancellation clamp to 0; anything more negative throws
 * std::runtime_error (inconsistent input).
 */
ConfProfile conf_profile(const SortedDistribution& s);

/// Conf_k for a single k in O(k), same conventions as conf_profile.
double conf_state_at(const SortedDistribution& s, int k);

}  // namespace tailcut::dist
