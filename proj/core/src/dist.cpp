// Copyright 2026 Tailcut Authors
// SPDX-License-Identifier: Apache-2.0

#include "tailcut/dist.hpp"

#include <algorithm>
#include <cstring>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace tailcut::dist {

namespace {

void validate_mass(const std::vector<double>& probs) {
  if (probs.size() < 2) {
    throw std::invalid_argument("TokenDistribution: vocab_size must be >= 2, got " +
                                std::to_string(probs.size()));
  }
  double sum = 0.0;
  for (double p : probs) {
    if (!std::isfinite(p) || p < 0.0) {
      throw std::invalid_argument("TokenDistribution: entries must be finite and >= 0");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > kMassTolerance) {
    throw std::invalid_argument("TokenDistribution: entries sum to " + std::to_string(sum) +
                                ", expected 1 within 1e-9");
  }
}

// p ln p with the 0 ln 0 := 0 convention and the denormal guard.
inline double plogp(double p) {
  return p > kEntropyFloor ? p * std::log(p) : 0.0;
}

// Unknown-part term of the state formula: r ln(r / n_unknown).
// r below the entropy floor (or n_unknown == 0) contributes 0.
inline double unknown_term(double residual, int n_unknown) {
  if (n_unknown <= 0 || residual <= kEntropyFloor) {
    return 0.0;
  }
  return residual * std::log(residual / n_unknown);
}

// Residual mass 1 - cumsum, clamped per the documented tolerance rules.
inline double residual_mass(double cumsum_prefix) {
  double r = 1.0 - cumsum_prefix;
  if (r < 0.0) {
    if (r < -kMassTolerance) {
      throw std::runtime_error("conf_profile: residual mass " + std::to_string(r) +
                               " below -1e-9; inconsistent cumulative sums");
    }
    r = 0.0;
  }
  return r;
}

}  // namespace

TokenDistribution TokenDistribution::from_probs(std::vector<double> probs) {
  validate_mass(probs);
  return TokenDistribution{std::move(probs)};
}

namespace {

// Comparator sort: descending probability, ties by ascending original id.
void sort_by_prob(const std::vector<double>& probs, std::vector<double>& sorted,
                  std::vector<int32_t>& perm) {
  const int n = static_cast<int>(probs.size());
  std::vector<std::pair<double, int32_t>> v(n);
  for (int i = 0; i < n; ++i) v[i] = {probs[i], i};
  std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  for (int i = 0; i < n; ++i) {
    sorted[i] = v[i].first;
    perm[i] = v[i].second;
  }
}

// LSD radix sort on inverted IEEE bits. Nonnegative doubles order exactly
// like their bit patterns, and the stable passes preserve the ascending-id
// input order within ties, so this matches sort_by_prob bit for bit while
// staying well under the per-step latency budget at vocabulary scale.
void radix_sort_by_prob(const std::vector<double>& probs, std::vector<double>& sorted,
                        std::vector<int32_t>& perm) {
  const int n = static_cast<int>(probs.size());
  struct Entry {
    uint64_t key;
    int32_t id;
  };
  std::vector<Entry> a(n), b(n);
  for (int i = 0; i < n; ++i) {
    uint64_t bits;
    std::memcpy(&bits, &probs[i], 8);
    if (bits == 0x8000000000000000ULL) bits = 0;  // -0.0 sorts as +0.0
    a[i] = {~bits, i};
  }
  std::vector<uint32_t> histogram(1u << 16);
  Entry* src = a.data();
  Entry* dst = b.data();
  for (int pass = 0; pass < 4; ++pass) {
    const int shift = pass * 16;
    std::fill(histogram.begin(), histogram.end(), 0u);
    for (int i = 0; i < n; ++i) ++histogram[(src[i].key >> shift) & 0xFFFF];
    uint32_t offset = 0;
    for (uint32_t& h : histogram) {
      const uint32_t count = h;
      h = offset;
      offset += count;
    }
    for (int i = 0; i < n; ++i) dst[histogram[(src[i].key >> shift) & 0xFFFF]++] = src[i];
    std::swap(src, dst);
  }
  for (int i = 0; i < n; ++i) {
    const uint64_t bits = ~src[i].key;
    std::memcpy(&sorted[i], &bits, 8);
    perm[i] = src[i].id;
  }
}

constexpr int kRadixThreshold = 4096;

}  // namespace

SortedDistribution SortedDistribution::from(const TokenDistribution& d) {
  const int n = d.vocab_size();
  SortedDistribution s;
  s.sorted_probs.resize(n);
  s.perm.resize(n);
  s.cumsum.resize(n);
  if (n >= kRadixThreshold) {
    radix_sort_by_prob(d.probs, s.sorted_probs, s.perm);
  } else {
    sort_by_prob(d.probs, s.sorted_probs, s.perm);
  }
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    acc += s.sorted_probs[i];
    s.cumsum[i] = acc;
  }
  return s;
}

SortedDistribution SortedDistribution::from_sorted(std::vector<double> sorted) {
  validate_mass(sorted);
  for (size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i] > sorted[i - 1]) {
      throw std::invalid_argument("SortedDistribution: input is not nonincreasing");
    }
  }
  SortedDistribution s;
  const int n = static_cast<int>(sorted.size());
  s.sorted_probs = std::move(sorted);
  s.perm.resize(n);
  std::iota(s.perm.begin(), s.perm.end(), 0);
  s.cumsum.resize(n);
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    acc += s.sorted_probs[i];
    s.cumsum[i] = acc;
  }
  return s;
}

TokenDistribution softmax(std::span<const double> logits, double temperature) {
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw std::invalid_argument("softmax: temperature must be positive and finite");
  }
  if (logits.size() < 2) {
    throw std::invalid_argument("softmax: need at least 2 logits");
  }
  std::vector<double> scaled(logits.size());
  double m = -std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < logits.size(); ++i) {
    if (!std::isfinite(logits[i])) {
      throw std::invalid_argument("softmax: logit " + std::to_string(i) + " is not finite");
    }
    scaled[i] = logits[i] / temperature;
    m = std::max(m, scaled[i]);
  }
  double z = 0.0;
  for (double& v : scaled) {
    v = std::exp(v - m);
    z += v;
  }
  for (double& v : scaled) {
    v /= z;
  }
  return TokenDistribution{std::move(scaled)};
}

double entropy(const TokenDistribution& d) {
  double acc = 0.0;
  for (double p : d.probs) {
    acc -= plogp(p);
  }
  return acc < 0.0 ? 0.0 : acc;
}

double confidence(const TokenDistribution& d) {
  return 1.0 - entropy(d) / std::log(static_cast<double>(d.vocab_size()));
}

ConfProfile conf_profile(const SortedDistribution& s) {
  const int n = s.vocab_size();
  const double ln_v = std::log(static_cast<double>(n));

  ConfProfile out;
  out.conf_states.resize(n + 1);
  out.delta_conf.resize(n);
  out.lower_bound.resize(n);
  out.upper_bound.resize(n);

  // State 0: nothing known, all mass spread over |V| slots.
  out.conf_states[0] = 1.0 + unknown_term(1.0, n) / ln_v;

  double known = 0.0;  // running sum of p_i ln p_i over the sorted head
  for (int k = 1; k <= n; ++k) {
    const double p_k = s.sorted_probs[k - 1];
    known += plogp(p_k);
    const double unknown =
        (k == n) ? 0.0 : unknown_term(residual_mass(s.cumsum[k - 1]), n - k);
    out.conf_states[k] = 1.0 + (known + unknown) / ln_v;
    out.delta_conf[k - 1] = out.conf_states[k] - out.conf_states[k - 1];

    const double r_prev = (k == 1) ? 1.0 : residual_mass(s.cumsum[k - 2]);
    const double span = std::log(static_cast<double>(n - k + 1));
    out.lower_bound[k - 1] = p_k * span / ln_v;
    out.upper_bound[k - 1] = r_prev * span / ln_v;
  }
  return out;
}

double conf_state_at(const SortedDistribution& s, int k) {
  const int n = s.vocab_size();
  if (k < 0 || k > n) {
    throw std::invalid_argument("conf_state_at: k out of [0, |V|]");
  }
  const double ln_v = std::log(static_cast<double>(n));
  double known = 0.0;
  for (int i = 0; i < k; ++i) {
    known += plogp(s.sorted_probs[i]);
  }
  const double unknown =
      (k == 0)   ? unknown_term(1.0, n)
      : (k == n) ? 0.0
                 : unknown_term(residual_mass(s.cumsum[k - 1]), n - k);
  return 1.0 + (known + unknown) / ln_v;
}

}  // namespace tailcut::dist
