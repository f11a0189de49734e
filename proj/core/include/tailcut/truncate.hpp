// Copyright 2026 Tailcut Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

/**
 * Candidate-set selection policies. Every policy maps a sorted next-token
 * distribution to the allowed set A with renormalized probabilities
 *
 *   P_trunc(x) = P(x) / Z  for x in A,  0 otherwise,  Z = sum_{x in A} P(x)
 *
 * and always keeps at least the top-1 token, so generation can proceed even
 * when the first increment already fails a threshold.
 *
 * Boundary comparisons are strict/inclusive exactly as documented per
 * policy, so goldens are bit-stable.
 */

#include <cstdint>
#include <vector>

#include "tailcut/dist.hpp"

namespace tailcut::truncate {

/**
 * The allowed set A, in descending original-probability order.
 *
 * renorm_probs[i] is the original probability of token_ids[i] divided by
 * cumulative_prob (the mass Z of the set before renormalization).
 * conf_at_k is the confidence state at k known tokens for the source
 * distribution.
 */
struct CandidateSet {
  std::vector<int32_t> token_ids;
  std::vector<double> renorm_probs;
  int k = 0;
  double cumulative_prob = 0.0;
  double conf_at_k = 0.0;
};

/**
 * How the adaptive policy consumes the increment ladder.
 *
 * kLastIndex (default): k = 1 + the largest index whose increment exceeds
 * epsilon (the vectorized released-code rule). kFirstBreak: stop at the
 * first increment below epsilon and keep what came before (the iterative
 * pseudocode rule). The two agree whenever the increments are
 * nonincreasing, which they need not be.
 */
enum class AdaptiveRule { kLastIndex, kFirstBreak };

/**
 * State for perplexity-controlled truncation: admit tokens whose surprise
 * -ln p is at most mu, then move mu toward a target cross-entropy based on
 * the surprise actually observed. The state is an explicit value threaded
 * by the caller; truncation itself never mutates it.
 */
struct MirostatState {
  double mu = 6.0;             // current surprise ceiling, nats
  double target_entropy = 3.0; // nats
  double learning_rate = 0.1;
};

/**
 * Adaptive truncation on the confidence-increment ladder.
 *
 * Under kLastIndex, A holds the first (1 + last index with
 * delta_conf > epsilon) tokens, or just the top token when no increment
 * qualifies. Under kFirstBreak, A holds the tokens before the first
 * delta_conf < epsilon, floored at the top token; if no increment falls
 * below epsilon the whole vocabulary is kept.
 *
 * Throws std::invalid_argument unless 0 < epsilon < 1.
 */
CandidateSet adaptive_truncate(const dist::SortedDistribution& s, double epsilon,
                               AdaptiveRule rule = AdaptiveRule::kLastIndex);

/// First k sorted tokens. Throws unless 1 <= k <= |V|.
CandidateSet top_k_truncate(const dist::SortedDistribution& s, int k);

/// Smallest prefix whose cumulative mass is >= p. Throws unless 0 < p <= 1.
CandidateSet top_p_truncate(const dist::SortedDistribution& s, double p);

/**
 * Locally typical selection: rank tokens by |H + ln p| ascending (ties by
 * higher probability, then lower token id; zero-probability tokens are
 * excluded before ranking) and keep the shortest prefix of that ranking
 * with mass >= tau. The returned set lists its tokens in descending
 * probability order. Throws unless 0 < tau <= 1.
 */
CandidateSet typical_truncate(const dist::SortedDistribution& s, double tau);

/**
 * Entropy-dependent probability floor: A = { x : p(x) > eta } with
 * eta = min(eps, sqrt(eps) * exp(-H)), floored at the top token.
 * Throws unless 0 < eps < 1.
 */
CandidateSet eta_truncate(const dist::SortedDistribution& s, double eps);

/// A = { x : -ln p(x) <= state.mu }, floored at the top token.
CandidateSet mirostat_truncate(const dist::SortedDistribution& s, const MirostatState& state);

/// Feedback step after sampling: mu' = mu - lr * (observed_surprise - target).
MirostatState mirostat_update(const MirostatState& state, double observed_surprise);

}  // namespace tailcut::truncate
