// Copyright 2026 Tailcut Authors
// SPDX-License-Identifier: Apache-2.0

#include "tailcut/lm.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "support/oracles.hpp"
#include "tailcut/trace.hpp"

using namespace tailcut;

namespace {

std::span<const uint8_t> bytes_of(const std::string& s) {
  return {reinterpret_cast<const uint8_t*>(s.data()), s.size()};
}

const std::string kAbab8 = "abababab";  // a->b four times, b->a three times
const std::string kAbab7 = "abababa";   // a->b three times, b->a three times

}  // namespace

TEST_SUITE_BEGIN("lm");

TEST_CASE("bigram counts give the add-k prediction") {
  auto model = lm::NgramModel::train(bytes_of(kAbab8), 2, 0.01);
  auto d = model.predict(bytes_of("a"));
  // hand count: 'a' is followed by 'b' 4 times out of 4
  CHECK(std::abs(d.probs['b'] - (4 + 0.01) / (4 + 0.01 * 256)) < 1e-12);
  int argmax = 0;
  for (int b = 1; b < 256; ++b) {
    if (d.probs[b] > d.probs[argmax]) argmax = b;
  }
  CHECK(argmax == 'b');

  // the 7-byte variant has 3 of 3
  auto model7 = lm::NgramModel::train(bytes_of(kAbab7), 2, 0.01);
  auto d7 = model7.predict(bytes_of("a"));
  CHECK(std::abs(d7.probs['b'] - (3 + 0.01) / (3 + 0.01 * 256)) < 1e-12);
  CHECK(std::abs(d7.probs['b'] - 0.5413669064748201) < 1e-12);
}

TEST_CASE("unseen context is uniform") {
  auto model = lm::NgramModel::train(bytes_of(kAbab8), 2, 0.01);
  auto d = model.predict(bytes_of("z"));
  for (double p : d.probs) CHECK(p == doctest::Approx(1.0 / 256).epsilon(1e-12));
}

TEST_CASE("prediction has full support and is deterministic") {
  auto model = lm::NgramModel::train(bytes_of("the cat sat on the mat . the dog sat"), 3, 0.01);
  for (const std::string& ctx : {std::string("th"), std::string("at"), std::string("qq")}) {
    auto d = model.predict(bytes_of(ctx));
    double sum = 0.0;
    for (double p : d.probs) {
      CHECK(p > 0.0);
      sum += p;
    }
    CHECK(std::abs(sum - 1.0) < 1e-9);
    auto again = model.predict(bytes_of(ctx));
    CHECK(d.probs == again.probs);
  }
}

TEST_CASE("shorter contexts fall back to shorter tables") {
  auto model = lm::NgramModel::train(bytes_of(kAbab8), 3, 0.01);
  // empty context: unigram counts, 'a' appears 4 times, 'b' 4 times of 8
  auto d0 = model.predict({});
  CHECK(std::abs(d0.probs['a'] - (4 + 0.01) / (8 + 2.56)) < 1e-12);
  // one byte of context uses the bigram table
  auto d1 = model.predict(bytes_of("a"));
  CHECK(std::abs(d1.probs['b'] - (4 + 0.01) / (4 + 2.56)) < 1e-12);
}

TEST_CASE("training input validation") {
  CHECK_THROWS_AS(lm::NgramModel::train({}, 2, 0.01), std::invalid_argument);
  CHECK_THROWS_AS(lm::NgramModel::train(bytes_of("a"), 2, 0.01), std::invalid_argument);
  CHECK_THROWS_AS(lm::NgramModel::train(bytes_of("abc"), 0, 0.01), std::invalid_argument);
  CHECK_THROWS_AS(lm::NgramModel::train(bytes_of("abc"), 9, 0.01), std::invalid_argument);
  CHECK_THROWS_AS(lm::NgramModel::train(bytes_of("abc"), 2, 0.0), std::invalid_argument);
}

TEST_CASE("save/load round trip is exact and deterministic") {
  const std::string corpus = testing::synthetic_corpus({.sentences = 50, .vocabulary = 40});
  auto model = lm::NgramModel::train(bytes_of(corpus), 3, 0.01);

  std::ostringstream buf1(std::ios::binary), buf2(std::ios::binary);
  model.save(buf1);
  model.save(buf2);
  CHECK(buf1.str() == buf2.str());  // deterministic bytes

  // a model retrained on the same corpus serializes identically
  auto model_again = lm::NgramModel::train(bytes_of(corpus), 3, 0.01);
  std::ostringstream buf3(std::ios::binary);
  model_again.save(buf3);
  CHECK(buf1.str() == buf3.str());

  std::istringstream in(buf1.str());
  auto loaded = lm::NgramModel::load(in);
  CHECK(loaded == model);
  // predictions are bitwise identical
  for (const std::string& ctx : {std::string("a "), std::string("zz"), std::string("")}) {
    CHECK(loaded.predict(bytes_of(ctx)).probs == model.predict(bytes_of(ctx)).probs);
  }
}

TEST_CASE("load rejects corrupt input") {
  std::istringstream bad("not a model");
  CHECK_THROWS_AS(lm::NgramModel::load(bad), std::runtime_error);
}

TEST_CASE("expand: full record passes through") {
  lm::TraceStep step;
  step.vocab_size = 4;
  step.full = true;
  step.probs = {0.5, 0.25, 0.125, 0.125};
  auto d = lm::expand(step);
  CHECK(d.probs == step.probs);
}

TEST_CASE("expand: compact tail spreads uniformly") {
  lm::TraceStep step;
  step.vocab_size = 12;
  step.ids = {5, 9};
  step.probs = {0.6, 0.3};
  step.tail_mass = 0.1;
  auto d = lm::expand(step);
  CHECK(d.probs[5] == 0.6);
  CHECK(d.probs[9] == 0.3);
  for (int t = 0; t < 12; ++t) {
    if (t != 5 && t != 9) CHECK(d.probs[t] == doctest::Approx(0.01).epsilon(1e-12));
  }
}

TEST_CASE("expand validation") {
  lm::TraceStep step;
  step.vocab_size = 4;
  step.ids = {0, 1};
  step.probs = {0.5, 0.6};  // not descending
  step.tail_mass = -0.1;
  CHECK_THROWS_AS(lm::expand(step), std::invalid_argument);
  step.probs = {0.6, 0.5};
  CHECK_THROWS_AS(lm::expand(step), std::invalid_argument);  // tail still negative
  step.tail_mass = 0.2;
  CHECK_THROWS_AS(lm::expand(step), std::invalid_argument);  // mass sums to 1.3
}

TEST_CASE("compact/expand round trip") {
  std::mt19937_64 rng(8);
  for (int rep = 0; rep < 30; ++rep) {
    auto probs = testing::dirichlet_probs(rng, 64, 0.4);
    auto d = dist::TokenDistribution::from_probs(probs);
    const int m = 8 + static_cast<int>(rep) % 16;
    auto step = lm::compact(d, m, 3);
    auto back = lm::compact(lm::expand(step), m, 3);
    CHECK(back.ids == step.ids);
    CHECK(back.tail_mass == doctest::Approx(step.tail_mass).epsilon(1e-9));
    for (int i = 0; i < m; ++i) {
      CHECK(back.probs[i] == doctest::Approx(step.probs[i]).epsilon(1e-9));
    }
  }
}

TEST_CASE("compact trace is the known/unknown decomposition") {
  // Conf of the expanded compact record equals the confidence state at m
  std::mt19937_64 rng(21);
  for (int rep = 0; rep < 20; ++rep) {
    auto probs = testing::dirichlet_probs(rng, 256, 0.3);
    auto d = dist::TokenDistribution::from_probs(probs);
    auto s = dist::SortedDistribution::from(d);
    for (int m : {4, 32, 128}) {
      auto expanded = lm::expand(lm::compact(d, m));
      CHECK(std::abs(dist::confidence(expanded) - dist::conf_state_at(s, m)) < 1e-6);
    }
  }
}

TEST_CASE("trace file round trip") {
  lm::LogitTrace trace;
  trace.vocab_size = 12;
  lm::TraceStep full;
  full.vocab_size = 12;
  full.full = true;
  full.probs.assign(12, 1.0 / 12);
  full.gold = 7;
  trace.steps.push_back(full);
  lm::TraceStep comp;
  comp.vocab_size = 12;
  comp.ids = {5, 9};
  comp.probs = {0.6, 0.3};
  comp.tail_mass = 0.1;
  trace.steps.push_back(comp);

  std::ostringstream out;
  lm::write_trace(out, trace);
  std::istringstream in(out.str());
  auto back = lm::read_trace(in);
  REQUIRE(back.steps.size() == 2);
  CHECK(back.vocab_size == 12);
  CHECK(back.steps[0].full);
  CHECK(back.steps[0].probs == full.probs);
  CHECK(back.steps[0].gold == 7);
  CHECK(back.steps[1].ids == comp.ids);
  CHECK(back.steps[1].probs == comp.probs);
  CHECK(back.steps[1].tail_mass == comp.tail_mass);
}

TEST_CASE("trace format errors carry line numbers") {
  {
    std::istringstream in("{\"format_version\":1,\"vocab_size\":8}\nnot json\n");
    try {
      lm::read_trace(in);
      FAIL("expected TraceFormatError");
    } catch (const lm::TraceFormatError& e) {
      CHECK(e.line == 2);
    }
  }
  {
    // header must come first
    std::istringstream in("{\"ids\":[0],\"probs\":[1.0],\"tail_mass\":0.0,\"vocab_size\":4}\n");
    CHECK_THROWS_AS(lm::read_trace(in), lm::TraceFormatError);
  }
  {
    std::istringstream in("{\"format_version\":2,\"vocab_size\":8}\n");
    CHECK_THROWS_AS(lm::read_trace(in), lm::TraceFormatError);
  }
  {
    // negative tail beyond tolerance -> format error at line 2
    std::istringstream in(
        "{\"format_version\":1,\"vocab_size\":4}\n"
        "{\"ids\":[0],\"probs\":[1.1],\"tail_mass\":-0.1,\"vocab_size\":4}\n");
    try {
      lm::read_trace(in);
      FAIL("expected TraceFormatError");
    } catch (const lm::TraceFormatError& e) {
      CHECK(e.line == 2);
    }
  }
  {
    // gold outside the vocabulary
    std::istringstream in(
        "{\"format_version\":1,\"vocab_size\":4}\n"
        "{\"full\":[0.25,0.25,0.25,0.25],\"gold\":9,\"vocab_size\":4}\n");
    CHECK_THROWS_AS(lm::read_trace(in), lm::TraceFormatError);
  }
}

TEST_SUITE_END();
