// Copyright 2026 Tailcut Authors
// SPDX-License-Identifier: Apache-2.0

#include "tailcut/sample.hpp"

namespace tailcut::sample {

namespace {
constexpr uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

uint64_t mix64(uint64_t x) {
  uint64_t z = x + kGolden;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

uint64_t derive(uint64_t seed, uint64_t index) {
  return mix64(seed + kGolden * (index + 1));
}

double unit_uniform(uint64_t seed, uint64_t stream_position) {
  // 53 high bits of the mixed counter -> [0,1)
  return static_cast<double>(mix64(seed + kGolden * (stream_position + 1)) >> 11) * 0x1.0p-53;
}

int32_t draw(const truncate::CandidateSet& set, const SamplerConfig& cfg,
             uint64_t stream_position) {
  const int k = set.k;
  if (k == 1) {
    return set.token_ids[0];
  }
  const double u = unit_uniform(cfg.seed, stream_position);

  if (cfg.way == Way::kRandom) {
    int idx = static_cast<int>(u * k);
    if (idx >= k) idx = k - 1;
    return set.token_ids[idx];
  }

  double acc = 0.0;
  int last_positive = 0;
  for (int i = 0; i < k; ++i) {
    if (set.renorm_probs[i] > 0.0) last_positive = i;
    acc += set.renorm_probs[i];
    if (u < acc) {
      return set.token_ids[i];
    }
  }
  return set.token_ids[last_positive];  // residual float mass
}

}  // namespace tailcut::sample
