// Copyright 2026 Tailcut Authors
// SPDX-License-Identifier: Apache-2.0

#include "tailcut/trace.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>

#include "json.hpp"

namespace tailcut::lm {

namespace {

using nlohmann::json;

constexpr double kStepMassTolerance = 1e-6;

void validate_step(const TraceStep& step) {
  if (step.vocab_size < 2) {
    throw std::invalid_argument("trace step: vocab_size must be >= 2");
  }
  if (step.gold && (*step.gold < 0 || *step.gold >= step.vocab_size)) {
    throw std::invalid_argument("trace step: gold token out of range");
  }
  if (step.full) {
    if (static_cast<int>(step.probs.size()) != step.vocab_size) {
      throw std::invalid_argument("trace step: full vector length != vocab_size");
    }
    return;
  }
  if (step.ids.size() != step.probs.size()) {
    throw std::invalid_argument("trace step: ids and probs length mismatch");
  }
  if (step.ids.empty() || static_cast<int>(step.ids.size()) > step.vocab_size) {
    throw std::invalid_argument("trace step: tracked set size out of range");
  }
  std::vector<bool> seen(step.vocab_size, false);
  double mass = 0.0;
  for (size_t i = 0; i < step.ids.size(); ++i) {
    const int32_t id = step.ids[i];
    if (id < 0 || id >= step.vocab_size) {
      throw std::invalid_argument("trace step: tracked id out of range");
    }
    if (seen[id]) {
      throw std::invalid_argument("trace step: duplicate tracked id");
    }
    seen[id] = true;
    if (i > 0 && step.probs[i] > step.probs[i - 1]) {
      throw std::invalid_argument("trace step: tracked probs not descending");
    }
    if (step.probs[i] < 0.0) {
      throw std::invalid_argument("trace step: negative probability");
    }
    mass += step.probs[i];
  }
  if (step.tail_mass < -dist::kMassTolerance) {
    throw std::invalid_argument("trace step: tail_mass is negative");
  }
  if (std::abs(mass + std::max(step.tail_mass, 0.0) - 1.0) > kStepMassTolerance) {
    throw std::invalid_argument("trace step: stored probs plus tail_mass do not sum to 1");
  }
}

json step_to_json(const TraceStep& step) {
  json rec;
  rec["vocab_size"] = step.vocab_size;
  if (step.full) {
    rec["full"] = step.probs;
  } else {
    rec["ids"] = step.ids;
    rec["probs"] = step.probs;
    rec["tail_mass"] = step.tail_mass;
  }
  if (step.gold) {
    rec["gold"] = *step.gold;
  }
  return rec;
}

TraceStep step_from_json(const json& rec, int default_vocab, int line) {
  TraceStep step;
  try {
    step.vocab_size = rec.value("vocab_size", default_vocab);
    if (rec.contains("gold")) step.gold = rec.at("gold").get<int32_t>();
    if (rec.contains("full")) {
      step.full = true;
      step.probs = rec.at("full").get<std::vector<double>>();
    } else {
      step.full = false;
      step.ids = rec.at("ids").get<std::vector<int32_t>>();
      step.probs = rec.at("probs").get<std::vector<double>>();
      step.tail_mass = rec.at("tail_mass").get<double>();
    }
  } catch (const json::exception& e) {
    throw TraceFormatError(line, e.what());
  }
  try {
    validate_step(step);
  } catch (const std::invalid_argument& e) {
    throw TraceFormatError(line, e.what());
  }
  return step;
}

}  // namespace

dist::TokenDistribution expand(const TraceStep& step) {
  validate_step(step);
  if (step.full) {
    return dist::TokenDistribution::from_probs(step.probs);
  }
  const int v = step.vocab_size;
  const int m = static_cast<int>(step.ids.size());
  const double tail = std::max(step.tail_mass, 0.0);
  const double fill = (m < v) ? tail / (v - m) : 0.0;
  std::vector<double> probs(v, fill);
  for (int i = 0; i < m; ++i) {
    probs[step.ids[i]] = step.probs[i];
  }
  return dist::TokenDistribution::from_probs(std::move(probs));
}

TraceStep compact(const dist::TokenDistribution& d, int top_m, std::optional<int32_t> gold) {
  const int v = d.vocab_size();
  if (top_m < 1 || top_m > v) {
    throw std::invalid_argument("compact: top_m must be in [1, vocab_size]");
  }
  const dist::SortedDistribution s = dist::SortedDistribution::from(d);
  TraceStep step;
  step.vocab_size = v;
  step.full = false;
  step.gold = gold;
  step.ids.assign(s.perm.begin(), s.perm.begin() + top_m);
  step.probs.assign(s.sorted_probs.begin(), s.sorted_probs.begin() + top_m);
  step.tail_mass = std::max(0.0, 1.0 - s.cumsum[top_m - 1]);
  return step;
}

LogitTrace read_trace(std::istream& in) {
  std::string line;
  int line_no = 0;
  LogitTrace trace;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::exception& e) {
      throw TraceFormatError(line_no, e.what());
    }
    if (!have_header) {
      if (!rec.contains("format_version")) {
        throw TraceFormatError(line_no, "missing header record with format_version");
      }
      if (rec.at("format_version").get<int>() != 1) {
        throw TraceFormatError(line_no, "unsupported format_version");
      }
      if (!rec.contains("vocab_size")) {
        throw TraceFormatError(line_no, "header missing vocab_size");
      }
      trace.vocab_size = rec.at("vocab_size").get<int>();
      if (trace.vocab_size < 2) {
        throw TraceFormatError(line_no, "header vocab_size must be >= 2");
      }
      have_header = true;
      continue;
    }
    trace.steps.push_back(step_from_json(rec, trace.vocab_size, line_no));
  }
  if (!have_header) {
    throw TraceFormatError(line_no, "empty trace: no header record");
  }
  return trace;
}

LogitTrace read_trace_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open trace file: " + path);
  }
  return read_trace(in);
}

void write_trace(std::ostream& out, const LogitTrace& trace) {
  json header;
  header["format_version"] = 1;
  header["vocab_size"] = trace.vocab_size;
  out << header.dump() << '\n';
  for (const TraceStep& step : trace.steps) {
    out << step_to_json(step).dump() << '\n';
  }
}

void write_trace_file(const std::string& path, const LogitTrace& trace) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open trace file for writing: " + path);
  }
  write_trace(out, trace);
  if (!out) {
    throw std::runtime_error("failed writing trace file: " + path);
  }
}

}  // namespace tailcut::lm
