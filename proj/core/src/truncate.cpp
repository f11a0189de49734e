// Copyright 2026 Tailcut Authors
// SPDX-License-Identifier: Apache-2.0

#include "tailcut/truncate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace tailcut::truncate {

namespace {

// Candidate set made of the first k sorted tokens.
CandidateSet prefix_set(const dist::SortedDistribution& s, int k, double conf_at_k) {
  CandidateSet out;
  out.k = k;
  out.cumulative_prob = s.cumsum[k - 1];
  out.conf_at_k = conf_at_k;
  out.token_ids.assign(s.perm.begin(), s.perm.begin() + k);
  out.renorm_probs.resize(k);
  for (int i = 0; i < k; ++i) {
    out.renorm_probs[i] = s.sorted_probs[i] / out.cumulative_prob;
  }
  return out;
}

CandidateSet prefix_set(const dist::SortedDistribution& s, int k) {
  return prefix_set(s, k, dist::conf_state_at(s, k));
}

double entropy_sorted(const dist::SortedDistribution& s) {
  double h = 0.0;
  for (double p : s.sorted_probs) {
    if (p > dist::kEntropyFloor) h -= p * std::log(p);
  }
  return h < 0.0 ? 0.0 : h;
}

}  // namespace

CandidateSet adaptive_truncate(const dist::SortedDistribution& s, double epsilon,
                               AdaptiveRule rule) {
  if (!(epsilon > 0.0) || !(epsilon < 1.0)) {
    throw std::invalid_argument("adaptive_truncate: epsilon must be in (0,1)");
  }
  const dist::ConfProfile profile = dist::conf_profile(s);
  const int n = s.vocab_size();

  int k = 1;
  if (rule == AdaptiveRule::kLastIndex) {
    for (int i = n - 1; i >= 0; --i) {
      if (profile.delta_conf[i] > epsilon) {
        k = i + 1;
        break;
      }
    }
  } else {
    k = n;  // no increment below epsilon: keep everything
    for (int j = 1; j <= n; ++j) {
      if (profile.delta_conf[j - 1] < epsilon) {
        k = std::max(1, j - 1);
        break;
      }
    }
  }
  return prefix_set(s, k, profile.conf_states[k]);
}

CandidateSet top_k_truncate(const dist::SortedDistribution& s, int k) {
  if (k < 1 || k > s.vocab_size()) {
    throw std::invalid_argument("top_k_truncate: k must be in [1, |V|], got " +
                                std::to_string(k));
  }
  return prefix_set(s, k);
}

CandidateSet top_p_truncate(const dist::SortedDistribution& s, double p) {
  if (!(p > 0.0) || p > 1.0) {
    throw std::invalid_argument("top_p_truncate: p must be in (0,1]");
  }
  const int n = s.vocab_size();
  int k = n;  // cumsum may stay below p by rounding; fall back to everything
  for (int i = 0; i < n; ++i) {
    if (s.cumsum[i] >= p) {
      k = i + 1;
      break;
    }
  }
  return prefix_set(s, k);
}

CandidateSet typical_truncate(const dist::SortedDistribution& s, double tau) {
  if (!(tau > 0.0) || tau > 1.0) {
    throw std::invalid_argument("typical_truncate: tau must be in (0,1]");
  }
  const int n = s.vocab_size();
  const double h = entropy_sorted(s);

  // Rank positive-probability tokens by |H + ln p| ascending;
  // ties by higher probability, then lower original token id.
  struct Scored {
    double score;
    double prob;
    int32_t id;
    int rank;  // position in the sorted order, for prefix reconstruction
  };
  std::vector<Scored> scored;
  scored.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double p = s.sorted_probs[i];
    if (p <= 0.0) continue;
    scored.push_back({std::abs(h + std::log(p)), p, s.perm[i], i});
  }
  std::stable_sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
    if (a.score != b.score) return a.score < b.score;
    if (a.prob != b.prob) return a.prob > b.prob;
    return a.id < b.id;
  });

  double mass = 0.0;
  std::vector<int> chosen_ranks;
  for (const Scored& c : scored) {
    chosen_ranks.push_back(c.rank);
    mass += c.prob;
    if (mass >= tau) break;
  }
  std::sort(chosen_ranks.begin(), chosen_ranks.end());

  CandidateSet out;
  out.k = static_cast<int>(chosen_ranks.size());
  out.cumulative_prob = mass;
  out.conf_at_k = dist::conf_state_at(s, out.k);
  out.token_ids.reserve(out.k);
  out.renorm_probs.reserve(out.k);
  for (int r : chosen_ranks) {
    out.token_ids.push_back(s.perm[r]);
    out.renorm_probs.push_back(s.sorted_probs[r] / mass);
  }
  return out;
}

CandidateSet eta_truncate(const dist::SortedDistribution& s, double eps) {
  if (!(eps > 0.0) || !(eps < 1.0)) {
    throw std::invalid_argument("eta_truncate: eps must be in (0,1)");
  }
  const double h = entropy_sorted(s);
  const double eta = std::min(eps, std::sqrt(eps) * std::exp(-h));
  const int n = s.vocab_size();
  int k = 0;
  while (k < n && s.sorted_probs[k] > eta) ++k;
  return prefix_set(s, std::max(1, k));
}

CandidateSet mirostat_truncate(const dist::SortedDistribution& s, const MirostatState& state) {
  if (!std::isfinite(state.mu) || !(state.learning_rate > 0.0)) {
    throw std::invalid_argument("mirostat_truncate: invalid state");
  }
  const int n = s.vocab_size();
  int k = 0;
  while (k < n) {
    const double p = s.sorted_probs[k];
    const double surprise = p > 0.0 ? -std::log(p) : std::numeric_limits<double>::infinity();
    if (surprise > state.mu) break;
    ++k;
  }
  return prefix_set(s, std::max(1, k));
}

MirostatState mirostat_update(const MirostatState& state, double observed_surprise) {
  MirostatState next = state;
  next.mu = state.mu - state.learning_rate * (observed_surprise - state.target_entropy);
  return next;
}

}  // namespace tailcut::truncate
