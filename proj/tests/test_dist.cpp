// Copyright 2026 Tailcut Authors
// SPDX-License-Identifier: Apache-2.0

#include "tailcut/dist.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "support/oracles.hpp"

using namespace tailcut;
using tailcut::testing::naive_conf_states;
using tailcut::testing::zipf_probs;

namespace {

dist::TokenDistribution uniform_dist(int v) {
  return dist::TokenDistribution::from_probs(std::vector<double>(v, 1.0 / v));
}

dist::TokenDistribution one_hot(int v, int hot = 0) {
  std::vector<double> p(v, 0.0);
  p[hot] = 1.0;
  return dist::TokenDistribution::from_probs(std::move(p));
}

const std::vector<double> kFixture{0.5, 0.25, 0.125, 0.125};

}  // namespace

TEST_SUITE_BEGIN("dist");

TEST_CASE("TokenDistribution validation") {
  CHECK_THROWS_AS(dist::TokenDistribution::from_probs({1.0}), std::invalid_argument);
  CHECK_THROWS_AS(dist::TokenDistribution::from_probs({0.6, 0.6}), std::invalid_argument);
  CHECK_THROWS_AS(dist::TokenDistribution::from_probs({-0.1, 1.1}), std::invalid_argument);
  CHECK_THROWS_AS(dist::TokenDistribution::from_probs({0.5, std::nan("")}),
                  std::invalid_argument);
  // within tolerance is fine
  CHECK_NOTHROW(dist::TokenDistribution::from_probs({0.5, 0.5 + 5e-10}));
}

TEST_CASE("softmax analytic cases") {
  auto d = dist::softmax(std::vector<double>{0.0, 0.0, 0.0}, 1.0);
  for (double p : d.probs) CHECK(p == doctest::Approx(1.0 / 3).epsilon(1e-12));

  auto d2 = dist::softmax(std::vector<double>{std::log(2.0), 0.0}, 1.0);
  CHECK(d2.probs[0] == doctest::Approx(2.0 / 3).epsilon(1e-12));
  CHECK(d2.probs[1] == doctest::Approx(1.0 / 3).epsilon(1e-12));
}

TEST_CASE("softmax frozen high-precision reference") {
  // direct extended-precision evaluation of exp((l_i - m)/T)/Z
  auto d = dist::softmax(std::vector<double>{3.1, -0.7, 0.2, 1.5}, 0.6);
  CHECK(std::abs(d.probs[0] - 0.9265955639990355) < 1e-12);
  CHECK(std::abs(d.probs[1] - 0.0016457296666804334) < 1e-12);
  CHECK(std::abs(d.probs[2] - 0.007375648659892804) < 1e-12);
  CHECK(std::abs(d.probs[3] - 0.06438305767439126) < 1e-12);
}

TEST_CASE("softmax errors") {
  CHECK_THROWS_AS(dist::softmax(std::vector<double>{1.0, 2.0}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(dist::softmax(std::vector<double>{1.0, 2.0}, -1.0), std::invalid_argument);
  const double inf = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(dist::softmax(std::vector<double>{1.0, inf}, 1.0), std::invalid_argument);
  // large logits must not overflow thanks to the max shift
  auto d = dist::softmax(std::vector<double>{5000.0, 4999.0}, 1.0);
  CHECK(d.probs[0] > d.probs[1]);
  CHECK(d.probs[0] + d.probs[1] == doctest::Approx(1.0));
}

TEST_CASE("entropy bounds and references") {
  CHECK(std::abs(dist::entropy(uniform_dist(1000)) - 6.907755278982137) < 1e-9);
  CHECK(dist::entropy(one_hot(17)) == 0.0);
  // term-by-term: 1.75 * ln 2
  CHECK(std::abs(dist::entropy(dist::TokenDistribution::from_probs(kFixture)) -
                 1.2130075659799042) < 1e-12);
}

TEST_CASE("confidence endpoints and fixture") {
  for (int v : {4, 1024}) {
    CHECK(std::abs(dist::confidence(uniform_dist(v))) < 1e-12);
    CHECK(std::abs(dist::confidence(one_hot(v)) - 1.0) < 1e-12);
  }
  CHECK(std::abs(dist::confidence(dist::TokenDistribution::from_probs(kFixture)) - 0.125) <
        1e-12);
}

TEST_CASE("sorting is deterministic with ties by id") {
  auto d = dist::TokenDistribution::from_probs({0.125, 0.5, 0.125, 0.25});
  auto s = dist::SortedDistribution::from(d);
  CHECK(s.perm == std::vector<int32_t>{1, 3, 0, 2});
  CHECK(s.sorted_probs == std::vector<double>{0.5, 0.25, 0.125, 0.125});
  CHECK(s.cumsum.back() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("radix and comparator sorts agree (ties, zeros, large V)") {
  std::mt19937_64 rng(2024);
  // force many exact ties and zero entries at a vocabulary over the radix
  // threshold, then compare against from_sorted on the comparator ordering
  const int v = 5000;
  std::vector<double> p(v, 0.0);
  std::uniform_int_distribution<int> bucket(0, 9);
  double sum = 0.0;
  for (int i = 0; i < v; ++i) {
    p[i] = bucket(rng);  // many duplicates
    sum += p[i];
  }
  for (double& x : p) x /= sum;
  auto d = dist::TokenDistribution::from_probs(p);
  auto s = dist::SortedDistribution::from(d);
  for (int i = 1; i < v; ++i) {
    CHECK(s.sorted_probs[i] <= s.sorted_probs[i - 1]);
    if (s.sorted_probs[i] == s.sorted_probs[i - 1]) {
      CHECK(s.perm[i] > s.perm[i - 1]);  // tie order by ascending id
    }
  }
  // perm is a permutation
  std::vector<bool> seen(v, false);
  for (int32_t id : s.perm) {
    CHECK(!seen[id]);
    seen[id] = true;
  }
}

TEST_CASE("conf_profile fixture matches naive per-k evaluation and frozen values") {
  auto s = dist::SortedDistribution::from_sorted(kFixture);
  auto prof = dist::conf_profile(s);

  const std::vector<double> naive = naive_conf_states(kFixture);
  for (size_t k = 0; k < naive.size(); ++k) {
    CHECK(std::abs(prof.conf_states[k] - naive[k]) < 1e-12);
  }
  CHECK(std::abs(prof.conf_states[0] - 0.0) < 1e-12);
  CHECK(std::abs(prof.conf_states[1] - 0.10375937481971095) < 1e-12);
  CHECK(std::abs(prof.conf_states[2] - 0.125) < 1e-12);
  CHECK(std::abs(prof.conf_states[4] - 0.125) < 1e-12);
  CHECK(std::abs(prof.delta_conf[0] - 0.10375937481971095) < 1e-12);
  CHECK(std::abs(prof.delta_conf[1] - 0.021240625180289047) < 1e-12);
  CHECK(std::abs(prof.delta_conf[2]) < 1e-12);
  CHECK(std::abs(prof.delta_conf[3]) < 1e-12);
  // deltas are exactly the first difference
  for (int k = 1; k <= 4; ++k) {
    CHECK(prof.delta_conf[k - 1] == prof.conf_states[k] - prof.conf_states[k - 1]);
  }
}

TEST_CASE("conf_profile uniform gives zero increments") {
  for (int v : {4, 100, 1024}) {
    auto prof = dist::conf_profile(dist::SortedDistribution::from(uniform_dist(v)));
    for (double d : prof.delta_conf) CHECK(std::abs(d) < 1e-12);
    for (double st : prof.conf_states) CHECK(std::abs(st) < 1e-9);
  }
}

TEST_CASE("conf_profile one-hot") {
  for (int v : {2, 8, 1024}) {
    auto prof = dist::conf_profile(dist::SortedDistribution::from(one_hot(v, v / 2)));
    CHECK(std::abs(prof.conf_states[0]) < 1e-12);
    for (int k = 1; k <= v; ++k) CHECK(std::abs(prof.conf_states[k] - 1.0) < 1e-12);
    CHECK(std::abs(prof.delta_conf[0] - 1.0) < 1e-12);
    for (int k = 2; k <= v; ++k) CHECK(std::abs(prof.delta_conf[k - 1]) < 1e-12);
  }
}

TEST_CASE("profile properties on a random corpus") {
  std::mt19937_64 rng(777);
  int checked = 0;
  for (int rep = 0; rep < 400; ++rep) {
    const int v = std::vector<int>{4, 64, 1024}[rep % 3];
    const double conc = std::vector<double>{0.01, 0.1, 1.0, 10.0}[rep % 4];
    auto probs = testing::dirichlet_probs(rng, v, conc);
    auto d = dist::TokenDistribution::from_probs(probs);
    auto s = dist::SortedDistribution::from(d);
    auto prof = dist::conf_profile(s);
    ++checked;

    // endpoints
    CHECK(std::abs(prof.conf_states[0]) < 1e-9);
    CHECK(std::abs(prof.conf_states[v] - dist::confidence(d)) < 1e-9);

    const double ln_v = std::log(static_cast<double>(v));
    for (int k = 1; k <= v; ++k) {
      const double delta = prof.delta_conf[k - 1];
      // monotone increase
      CHECK(delta >= -1e-12);
      // upper envelope holds pointwise
      CHECK(delta <= prof.upper_bound[k - 1] + 1e-9);
      // bound fields carry the documented formulas, lower <= upper
      const double p_k = s.sorted_probs[k - 1];
      const double r_prev = k == 1 ? 1.0 : std::max(0.0, 1.0 - s.cumsum[k - 2]);
      const double span = std::log(static_cast<double>(v - k + 1));
      CHECK(prof.lower_bound[k - 1] == doctest::Approx(p_k * span / ln_v).epsilon(1e-12));
      CHECK(prof.upper_bound[k - 1] == doctest::Approx(r_prev * span / ln_v).epsilon(1e-12));
      CHECK(prof.lower_bound[k - 1] <= prof.upper_bound[k - 1] + 1e-15);
      // sorted-order witness: p_k >= residual/(V-k+1)
      CHECK(p_k >= r_prev / (v - k + 1) - 1e-12);
      // mass witness: residual before k covers p_k
      CHECK(r_prev >= p_k - 1e-12);
    }
  }
  CHECK(checked == 400);
}

TEST_CASE("vectorized profile matches naive per-k oracle") {
  std::mt19937_64 rng(31337);
  for (int rep = 0; rep < 60; ++rep) {
    const int v = std::vector<int>{4, 64, 257, 1024}[rep % 4];
    auto probs = testing::dirichlet_probs(rng, v, std::vector<double>{0.05, 0.5, 5.0}[rep % 3]);
    std::sort(probs.begin(), probs.end(), std::greater<>());
    auto s = dist::SortedDistribution::from_sorted(probs);
    auto prof = dist::conf_profile(s);
    auto naive = naive_conf_states(probs);
    for (int k = 0; k <= v; ++k) {
      CHECK(std::abs(prof.conf_states[k] - naive[k]) < 1e-9);
    }
  }
}

TEST_CASE("confidence is base-invariant") {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 50; ++rep) {
    auto probs = testing::dirichlet_probs(rng, 64, 0.5);
    auto d = dist::TokenDistribution::from_probs(probs);
    double h2 = 0.0;  // base-2 route
    for (double p : probs) {
      if (p > 1e-15) h2 -= p * std::log2(p);
    }
    const double conf2 = 1.0 - h2 / std::log2(64.0);
    CHECK(std::abs(dist::confidence(d) - conf2) < 1e-12);
  }
}

TEST_CASE("truncated-entropy tail shrinks with Zipf exponent") {
  // decomposition H = head + tail is exact; the tail at the adaptive cutoff
  // falls as the distribution concentrates
  const int v = 50257;
  double prev_tail = std::numeric_limits<double>::infinity();
  for (double s_exp : {1.05, 1.2, 1.5, 2.0}) {
    auto probs = zipf_probs(v, s_exp);
    auto s = dist::SortedDistribution::from_sorted(probs);
    auto prof = dist::conf_profile(s);
    int k = 1;
    for (int i = v - 1; i >= 0; --i) {
      if (prof.delta_conf[i] > 0.001) {
        k = i + 1;
        break;
      }
    }
    double head = 0.0, tail = 0.0, total = 0.0;
    for (int i = 0; i < v; ++i) {
      const double term = -probs[i] * std::log(probs[i]);
      total += term;
      (i < k ? head : tail) += term;
    }
    CHECK(std::abs(head + tail - total) < 1e-9);
    CHECK(tail < prev_tail);
    prev_tail = tail;
  }
}

TEST_CASE("conf_state_at agrees with the full profile") {
  auto probs = zipf_probs(512, 1.3);
  auto s = dist::SortedDistribution::from_sorted(probs);
  auto prof = dist::conf_profile(s);
  for (int k : {0, 1, 2, 50, 511, 512}) {
    CHECK(std::abs(dist::conf_state_at(s, k) - prof.conf_states[k]) < 1e-12);
  }
  CHECK_THROWS_AS(dist::conf_state_at(s, -1), std::invalid_argument);
  CHECK_THROWS_AS(dist::conf_state_at(s, 513), std::invalid_argument);
}

TEST_SUITE_END();
