// Copyright 2026 Tailcut Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

/**
 * Drawing a token from a candidate set, with a counter-based seeding
 * contract: the value drawn depends only on (seed, stream_position), never
 * on how many draws happened before. Sequences and sweep cells derive their
 * seeds with derive(), so parallel execution cannot reorder randomness.
 */

#include <cstdint>

#include "tailcut/truncate.hpp"

namespace tailcut::sample {

/// multinomial: proportional to renorm_probs; random: uniform over the set.
enum class Way { kMultinomial, kRandom };

struct SamplerConfig {
  Way way = Way::kMultinomial;
  uint64_t seed = 0;
};

/// SplitMix64 finalizer; the keyed primitive behind all randomness here.
uint64_t mix64(uint64_t x);

/// Derive a child seed, e.g. per (cell, prefix, repeat). Chainable.
uint64_t derive(uint64_t seed, uint64_t index);

/// Uniform double in [0,1) keyed by (seed, stream_position).
double unit_uniform(uint64_t seed, uint64_t stream_position);

/**
 * Draw one token id from the set.
 *
 * Multinomial uses inverse-CDF over the stored renorm_probs (descending),
 * with any residual float mass absorbed by the last positive-probability
 * bucket. Identical (seed, stream_position, set) always yields the same
 * token.
 */
int32_t draw(const truncate::CandidateSet& set, const SamplerConfig& cfg,
             uint64_t stream_position);

}  // namespace tailcut::sample
