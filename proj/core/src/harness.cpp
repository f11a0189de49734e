// Copyright 2026 Tailcut Authors
// SPDX-License-Identifier: Apache-2.0

#include "tailcut/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"

namespace tailcut::harness {

namespace {
using nlohmann::json;
}  // namespace

std::string way_name(sample::Way way) {
  return way == sample::Way::kMultinomial ? "multinomial" : "random";
}

sample::Way way_from_name(const std::string& name) {
  if (name == "multinomial") return sample::Way::kMultinomial;
  if (name == "random") return sample::Way::kRandom;
  throw std::invalid_argument("unknown sampling way: " + name);
}

std::string decoder_name(Decoder d) {
  switch (d) {
    case Decoder::kAdaptive: return "adaptive";
    case Decoder::kTopK: return "top_k";
    case Decoder::kTopP: return "top_p";
    case Decoder::kTypical: return "typical";
    case Decoder::kEta: return "eta";
    case Decoder::kMirostat: return "mirostat";
    case Decoder::kGreedy: return "greedy";
  }
  throw std::logic_error("unreachable");
}

Decoder decoder_from_name(const std::string& name) {
  if (name == "adaptive") return Decoder::kAdaptive;
  if (name == "top_k") return Decoder::kTopK;
  if (name == "top_p") return Decoder::kTopP;
  if (name == "typical") return Decoder::kTypical;
  if (name == "eta") return Decoder::kEta;
  if (name == "mirostat") return Decoder::kMirostat;
  if (name == "greedy") return Decoder::kGreedy;
  throw std::invalid_argument("unknown decoder: " + name);
}

void RunConfig::validate() const {
  if (max_new_tokens < 1) throw std::invalid_argument("max_new_tokens must be >= 1");
  if (repeats < 1) throw std::invalid_argument("repeats must be >= 1");
  if (prefix_length < 1) throw std::invalid_argument("prefix_length must be >= 1");
}

double RunConfig::hyperparameter() const {
  switch (decoder) {
    case Decoder::kAdaptive: return epsilon;
    case Decoder::kTopK: return static_cast<double>(top_k);
    case Decoder::kTopP: return top_p;
    case Decoder::kTypical: return tau;
    case Decoder::kEta: return eta;
    case Decoder::kMirostat: return mirostat_target;
    case Decoder::kGreedy: return 1.0;
  }
  throw std::logic_error("unreachable");
}

void RunConfig::set_hyperparameter(double value) {
  switch (decoder) {
    case Decoder::kAdaptive: epsilon = value; return;
    case Decoder::kTopK: top_k = static_cast<int>(value); return;
    case Decoder::kTopP: top_p = value; return;
    case Decoder::kTypical: tau = value; return;
    case Decoder::kEta: eta = value; return;
    case Decoder::kMirostat: mirostat_target = value; return;
    case Decoder::kGreedy: return;  // greedy has no hyperparameter
  }
  throw std::logic_error("unreachable");
}

DecoderSession::DecoderSession(const RunConfig& cfg) : cfg_(cfg) {
  mirostat_.target_entropy = cfg.mirostat_target;
  mirostat_.learning_rate = cfg.mirostat_lr;
  mirostat_.mu = 2.0 * cfg.mirostat_target;  // conventional warm start
}

truncate::CandidateSet DecoderSession::step(const dist::SortedDistribution& s) {
  switch (cfg_.decoder) {
    case Decoder::kAdaptive: return truncate::adaptive_truncate(s, cfg_.epsilon, cfg_.rule);
    case Decoder::kTopK: return truncate::top_k_truncate(s, std::min(cfg_.top_k, s.vocab_size()));
    case Decoder::kTopP: return truncate::top_p_truncate(s, cfg_.top_p);
    case Decoder::kTypical: return truncate::typical_truncate(s, cfg_.tau);
    case Decoder::kEta: return truncate::eta_truncate(s, cfg_.eta);
    case Decoder::kMirostat: return truncate::mirostat_truncate(s, mirostat_);
    case Decoder::kGreedy: return truncate::top_k_truncate(s, 1);
  }
  throw std::logic_error("unreachable");
}

void DecoderSession::observe(double surprise) {
  if (cfg_.decoder == Decoder::kMirostat) {
    mirostat_ = truncate::mirostat_update(mirostat_, surprise);
  }
}

double observed_surprise(const truncate::CandidateSet& set, int32_t token) {
  for (int i = 0; i < set.k; ++i) {
    if (set.token_ids[i] == token) {
      const double p = set.renorm_probs[i] * set.cumulative_prob;
      return -std::log(std::max(p, 1e-300));
    }
  }
  throw std::logic_error("observed_surprise: token not in candidate set");
}

metrics::GenerationRecord generate_one(const lm::NgramModel& model,
                                       std::span<const uint8_t> prefix, const RunConfig& cfg,
                                       uint64_t sequence_seed) {
  cfg.validate();
  metrics::GenerationRecord rec;
  rec.prefix_tokens.assign(prefix.begin(), prefix.end());

  std::vector<uint8_t> context(prefix.begin(), prefix.end());
  DecoderSession session(cfg);
  const sample::SamplerConfig sampler{cfg.way, sequence_seed};

  for (int t = 0; t < cfg.max_new_tokens; ++t) {
    const dist::TokenDistribution d = model.predict(context);
    const dist::SortedDistribution s = dist::SortedDistribution::from(d);
    const truncate::CandidateSet set = session.step(s);
    const int32_t token = sample::draw(set, sampler, static_cast<uint64_t>(t));
    session.observe(observed_surprise(set, token));

    rec.continuation_tokens.push_back(token);
    rec.per_step.push_back({set.k, set.cumulative_prob, set.conf_at_k});
    context.push_back(static_cast<uint8_t>(token));
  }
  return rec;
}

metrics::GenerationRecord replay_one(const lm::LogitTrace& trace, const RunConfig& cfg,
                                     uint64_t sequence_seed) {
  cfg.validate();
  metrics::GenerationRecord rec;
  DecoderSession session(cfg);
  const sample::SamplerConfig sampler{cfg.way, sequence_seed};

  const size_t steps = std::min<size_t>(trace.steps.size(),
                                        static_cast<size_t>(cfg.max_new_tokens));
  for (size_t t = 0; t < steps; ++t) {
    const dist::TokenDistribution d = lm::expand(trace.steps[t]);
    const dist::SortedDistribution s = dist::SortedDistribution::from(d);
    const truncate::CandidateSet set = session.step(s);
    const int32_t token = sample::draw(set, sampler, t);
    session.observe(observed_surprise(set, token));

    rec.continuation_tokens.push_back(token);
    rec.per_step.push_back({set.k, set.cumulative_prob, set.conf_at_k});
  }
  return rec;
}

Source Source::from_model(lm::NgramModel m) {
  Source s;
  s.model = std::move(m);
  return s;
}

Source Source::from_trace(lm::LogitTrace t) {
  Source s;
  s.trace = std::move(t);
  return s;
}

Source Source::from_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open model file: " + path);
  return from_model(lm::NgramModel::load(in));
}

Source Source::from_trace_file(const std::string& path) {
  return from_trace(lm::read_trace_file(path));
}

std::vector<metrics::GenerationRecord> generate_records(const Source& source,
                                                        std::span<const std::string> prefixes,
                                                        const RunConfig& cfg,
                                                        uint64_t cell_index) {
  cfg.validate();
  const uint64_t cell_seed = sample::derive(cfg.seed, cell_index);
  std::vector<metrics::GenerationRecord> records;

  if (source.trace) {
    records.reserve(cfg.repeats);
    const uint64_t prefix_seed = sample::derive(cell_seed, 0);
    for (int r = 0; r < cfg.repeats; ++r) {
      records.push_back(
          replay_one(*source.trace, cfg, sample::derive(prefix_seed, static_cast<uint64_t>(r))));
    }
    return records;
  }
  if (!source.model) {
    throw std::invalid_argument("generate_records: source has neither model nor trace");
  }
  if (prefixes.empty()) {
    throw std::invalid_argument("generate_records: no prefixes");
  }

  records.reserve(prefixes.size() * static_cast<size_t>(cfg.repeats));
  for (size_t pi = 0; pi < prefixes.size(); ++pi) {
    const std::string& line = prefixes[pi];
    const size_t take = cfg.full_prefix
                            ? line.size()
                            : std::min<size_t>(line.size(), static_cast<size_t>(cfg.prefix_length));
    std::span<const uint8_t> prefix(reinterpret_cast<const uint8_t*>(line.data()), take);
    const uint64_t prefix_seed = sample::derive(cell_seed, pi);
    for (int r = 0; r < cfg.repeats; ++r) {
      records.push_back(generate_one(*source.model, prefix, cfg,
                                     sample::derive(prefix_seed, static_cast<uint64_t>(r))));
    }
  }
  return records;
}

// ------------------------------------------------------------------ file io

void atomic_write_file(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  static std::atomic<uint64_t> counter{0};
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp" + std::to_string(counter.fetch_add(1));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  fs::rename(tmp, target);
}

std::vector<uint8_t> read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
  return bytes;
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

void cmd_train_lm(const std::string& corpus_path, int order, double smoothing_k,
                  const std::string& out_path) {
  const std::vector<uint8_t> corpus = read_bytes(corpus_path);
  const lm::NgramModel model = lm::NgramModel::train(corpus, order, smoothing_k);
  std::ostringstream buf(std::ios::binary);
  model.save(buf);
  atomic_write_file(out_path, buf.str());
}

namespace {

json record_to_json(const metrics::GenerationRecord& rec, size_t prefix_index, int repeat) {
  json steps = json::array();
  for (const metrics::StepDiag& d : rec.per_step) {
    steps.push_back({{"k", d.k},
                     {"cumulative_prob", d.cumulative_prob},
                     {"conf_at_k", d.conf_at_k}});
  }
  return json{{"prefix_index", prefix_index},
              {"repeat", repeat},
              {"prefix_tokens", rec.prefix_tokens},
              {"continuation_tokens", rec.continuation_tokens},
              {"per_step", std::move(steps)}};
}

std::string generations_to_ndjson(const GenerationsMeta& meta,
                                  std::span<const metrics::GenerationRecord> records,
                                  size_t n_prefixes, int repeats) {
  std::string out;
  json header{{"format_version", 1},
              {"kind", "generations"},
              {"vocab_size", lm::NgramModel::kVocabSize},
              {"config",
               {{"decoder", meta.decoder},
                {"hyperparameter", meta.hyperparameter},
                {"way", meta.way},
                {"seed", meta.seed},
                {"max_new_tokens", meta.max_new_tokens},
                {"repeats", meta.repeats}}}};
  out += header.dump();
  out += '\n';
  for (size_t i = 0; i < records.size(); ++i) {
    const size_t prefix_index = (n_prefixes > 0) ? i / static_cast<size_t>(repeats) : 0;
    const int repeat = static_cast<int>(i % static_cast<size_t>(repeats));
    out += record_to_json(records[i], prefix_index, repeat).dump();
    out += '\n';
  }
  return out;
}

}  // namespace

GenerationsFile cmd_generate(const Source& source, const std::string& prefixes_path,
                             const RunConfig& cfg, const std::string& out_path) {
  const std::vector<std::string> prefixes =
      source.trace ? std::vector<std::string>{} : read_lines(prefixes_path);
  GenerationsFile result;
  result.records = generate_records(source, prefixes, cfg);
  result.meta = {decoder_name(cfg.decoder), cfg.hyperparameter(), way_name(cfg.way),
                 cfg.seed,                  cfg.max_new_tokens,   cfg.repeats};
  atomic_write_file(
      out_path, generations_to_ndjson(result.meta, result.records, prefixes.size(), cfg.repeats));
  return result;
}

GenerationsFile read_generations_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open generations file: " + path);
  GenerationsFile out;
  std::string line;
  int line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::exception& e) {
      throw std::runtime_error("generations line " + std::to_string(line_no) + ": " + e.what());
    }
    try {
      if (!have_header) {
        if (rec.value("kind", "") != "generations" || rec.value("format_version", 0) != 1) {
          throw std::runtime_error("not a generations file header");
        }
        const json& c = rec.at("config");
        out.meta.decoder = c.at("decoder").get<std::string>();
        out.meta.hyperparameter = c.at("hyperparameter").get<double>();
        out.meta.way = c.at("way").get<std::string>();
        out.meta.seed = c.at("seed").get<uint64_t>();
        out.meta.max_new_tokens = c.at("max_new_tokens").get<int>();
        out.meta.repeats = c.at("repeats").get<int>();
        have_header = true;
        continue;
      }
      metrics::GenerationRecord g;
      g.prefix_tokens = rec.at("prefix_tokens").get<std::vector<int32_t>>();
      g.continuation_tokens = rec.at("continuation_tokens").get<std::vector<int32_t>>();
      for (const json& s : rec.at("per_step")) {
        g.per_step.push_back({s.at("k").get<int>(), s.at("cumulative_prob").get<double>(),
                              s.at("conf_at_k").get<double>()});
      }
      if (g.per_step.size() != g.continuation_tokens.size()) {
        throw std::runtime_error("per_step length != continuation length");
      }
      out.records.push_back(std::move(g));
    } catch (const json::exception& e) {
      throw std::runtime_error("generations line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!have_header) throw std::runtime_error("generations file has no header: " + path);
  return out;
}

MetricsSummary summarize(std::span<const metrics::GenerationRecord> records, NgramUnit unit) {
  MetricsSummary out;
  out.records = records.size();
  double rep2 = 0, rep3 = 0, rep4 = 0, div = 0;
  metrics::StatsAccumulator acc;
  for (const metrics::GenerationRecord& rec : records) {
    for (const metrics::StepDiag& d : rec.per_step) acc.add(d);
    try {
      if (unit == NgramUnit::kWord) {
        std::string text(rec.continuation_tokens.size(), '\0');
        for (size_t i = 0; i < rec.continuation_tokens.size(); ++i) {
          text[i] = static_cast<char>(static_cast<uint8_t>(rec.continuation_tokens[i]));
        }
        const std::vector<std::string> words = metrics::split_words(text);
        const std::span<const std::string> w(words);
        const double r2 = metrics::rep_n(w, 2);
        const double r3 = metrics::rep_n(w, 3);
        const double r4 = metrics::rep_n(w, 4);
        rep2 += r2;
        rep3 += r3;
        rep4 += r4;
        div += metrics::diversity(w);
      } else {
        const std::span<const int32_t> toks(rec.continuation_tokens);
        const double r2 = metrics::rep_n(toks, 2);
        const double r3 = metrics::rep_n(toks, 3);
        const double r4 = metrics::rep_n(toks, 4);
        rep2 += r2;
        rep3 += r3;
        rep4 += r4;
        div += metrics::diversity(toks);
      }
      ++out.metric_defined;
    } catch (const metrics::MetricUndefinedError&) {
      // too short for rep/diversity; counted via records - metric_defined
    }
  }
  if (out.metric_defined > 0) {
    const double n = static_cast<double>(out.metric_defined);
    out.rep_2 = rep2 / n;
    out.rep_3 = rep3 / n;
    out.rep_4 = rep4 / n;
    out.diversity = div / n;
  }
  if (acc.count() > 0) {
    out.stats = acc.finalize();
  }
  return out;
}

namespace {

json summary_to_json(const MetricsSummary& s) {
  json j;
  j["records"] = s.records;
  j["metric_defined"] = s.metric_defined;
  const uint64_t undefined = s.records - s.metric_defined;
  j["metric_undefined"] = undefined;
  if (s.metric_defined > 0) {
    j["rep_2"] = s.rep_2;
    j["rep_3"] = s.rep_3;
    j["rep_4"] = s.rep_4;
    j["diversity"] = s.diversity;
  } else {
    j["rep_2"] = nullptr;
    j["rep_3"] = nullptr;
    j["rep_4"] = nullptr;
    j["diversity"] = nullptr;
  }
  j["mean_k"] = s.stats.mean_k;
  j["std_k"] = s.stats.std_k;
  j["mean_cumulative_prob"] = s.stats.mean_cumprob;
  j["std_cumulative_prob"] = s.stats.std_cumprob;
  j["mean_conf"] = s.stats.mean_conf;
  j["std_conf"] = s.stats.std_conf;
  return j;
}

void append_summary_text(std::string& out, const std::string& prefix, const MetricsSummary& s) {
  auto kv = [&out, &prefix](const std::string& key, const std::string& value) {
    out += prefix + key + " = " + value + "\n";
  };
  auto num = [](double v) {
    std::ostringstream ss;
    ss.precision(6);
    ss << std::fixed << v;
    return ss.str();
  };
  kv("records", std::to_string(s.records));
  kv("metric_undefined", std::to_string(s.records - s.metric_defined));
  kv("rep_2", s.metric_defined ? num(s.rep_2) : "undefined");
  kv("rep_3", s.metric_defined ? num(s.rep_3) : "undefined");
  kv("rep_4", s.metric_defined ? num(s.rep_4) : "undefined");
  kv("diversity", s.metric_defined ? num(s.diversity) : "undefined");
  kv("mean_k", num(s.stats.mean_k));
  kv("std_k", num(s.stats.std_k));
  kv("mean_cumulative_prob", num(s.stats.mean_cumprob));
  kv("std_cumulative_prob", num(s.stats.std_cumprob));
  kv("mean_conf", num(s.stats.mean_conf));
  kv("std_conf", num(s.stats.std_conf));
}

}  // namespace

std::string render_sweep_text(const SweepResult& result) {
  std::string out;
  out += "decoder = " + decoder_name(result.decoder) + "\n";
  for (const SweepCell& cell : result.cells) {
    std::ostringstream tag;
    tag << "cell[" << cell.hyperparameter << "," << way_name(cell.way) << "].";
    append_summary_text(out, tag.str(), cell.summary);
  }
  return out;
}

SweepResult cmd_sweep(const Source& source, const std::string& prefixes_path, Decoder decoder,
                      std::span<const double> grid, std::span<const sample::Way> ways,
                      const RunConfig& base_cfg, const std::string& out_path) {
  if (grid.empty()) throw std::invalid_argument("cmd_sweep: empty hyperparameter grid");
  if (ways.empty()) throw std::invalid_argument("cmd_sweep: no sampling ways");
  const std::vector<std::string> prefixes =
      source.trace ? std::vector<std::string>{} : read_lines(prefixes_path);

  std::vector<RunConfig> cell_cfgs;
  for (double h : grid) {
    for (sample::Way way : ways) {
      RunConfig cfg = base_cfg;
      cfg.decoder = decoder;
      cfg.set_hyperparameter(h);
      cfg.way = way;
      cfg.validate();
      cell_cfgs.push_back(cfg);
    }
  }

  // Cells are independent given their derived seeds; run them in parallel
  // and merge in index order.
  const unsigned n_workers = std::max(1u, std::thread::hardware_concurrency());
  std::vector<MetricsSummary> summaries(cell_cfgs.size());
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (size_t ci = next.fetch_add(1); ci < cell_cfgs.size(); ci = next.fetch_add(1)) {
      const std::vector<metrics::GenerationRecord> records =
          generate_records(source, prefixes, cell_cfgs[ci], ci);
      summaries[ci] = summarize(records, NgramUnit::kWord);
    }
  };
  if (n_workers == 1 || cell_cfgs.size() == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < std::min<size_t>(n_workers, cell_cfgs.size()); ++w) {
      pool.emplace_back(worker);
    }
    for (std::thread& t : pool) t.join();
  }

  SweepResult result;
  result.decoder = decoder;
  for (size_t ci = 0; ci < cell_cfgs.size(); ++ci) {
    result.cells.push_back(
        {cell_cfgs[ci].hyperparameter(), cell_cfgs[ci].way, summaries[ci]});
  }

  if (!out_path.empty()) {
    atomic_write_file(out_path, render_sweep_text(result));
    std::string nd;
    for (const SweepCell& cell : result.cells) {
      json row = summary_to_json(cell.summary);
      row["decoder"] = decoder_name(decoder);
      row["hyperparameter"] = cell.hyperparameter;
      row["way"] = way_name(cell.way);
      nd += row.dump();
      nd += '\n';
    }
    atomic_write_file(out_path + ".json", nd);
  }
  return result;
}

ReplayReport cmd_replay(const std::string& trace_path, const RunConfig& cfg,
                        const std::string& out_path) {
  const lm::LogitTrace trace = lm::read_trace_file(trace_path);
  RunConfig replay_cfg = cfg;
  replay_cfg.max_new_tokens = std::max<int>(1, static_cast<int>(trace.steps.size()));
  replay_cfg.repeats = 1;
  const metrics::GenerationRecord rec =
      replay_one(trace, replay_cfg, sample::derive(cfg.seed, 0));

  ReplayReport report;
  report.per_step = rec.per_step;
  report.has_gold = !trace.steps.empty() &&
                    std::all_of(trace.steps.begin(), trace.steps.end(),
                                [](const lm::TraceStep& s) { return s.gold.has_value(); });
  if (report.has_gold) {
    report.hit_1 = metrics::hit_at_k(trace, 1);
    report.hit_3 = metrics::hit_at_k(trace, 3);
    report.hit_5 = metrics::hit_at_k(trace, 5);
  }

  if (!out_path.empty()) {
    std::string text;
    text += "decoder = " + decoder_name(cfg.decoder) + "\n";
    text += "steps = " + std::to_string(report.per_step.size()) + "\n";
    if (report.has_gold) {
      std::ostringstream hits;
      hits.precision(6);
      hits << std::fixed << "hit_at_1 = " << report.hit_1 << "\nhit_at_3 = " << report.hit_3
           << "\nhit_at_5 = " << report.hit_5 << "\n";
      text += hits.str();
    } else {
      text += "hit_at_1 = undefined\nhit_at_3 = undefined\nhit_at_5 = undefined\n";
    }
    for (size_t t = 0; t < report.per_step.size(); ++t) {
      const metrics::StepDiag& d = report.per_step[t];
      std::ostringstream row;
      row.precision(6);
      row << std::fixed << "step[" << t << "] k = " << d.k
          << " cumulative_prob = " << d.cumulative_prob << " conf_at_k = " << d.conf_at_k
          << "\n";
      text += row.str();
    }
    atomic_write_file(out_path, text);

    std::string nd;
    for (size_t t = 0; t < report.per_step.size(); ++t) {
      const metrics::StepDiag& d = report.per_step[t];
      nd += json{{"step", t},
                 {"k", d.k},
                 {"cumulative_prob", d.cumulative_prob},
                 {"conf_at_k", d.conf_at_k}}
                .dump();
      nd += '\n';
    }
    if (report.has_gold) {
      nd += json{{"hit_at_1", report.hit_1}, {"hit_at_3", report.hit_3},
                 {"hit_at_5", report.hit_5}}
                .dump();
      nd += '\n';
    }
    atomic_write_file(out_path + ".json", nd);
  }
  return report;
}

std::string render_analyze_text(const AnalyzeReport& report) {
  std::string text;
  append_summary_text(text, "", report.summary);
  for (const auto& [key, value] : report.extra) {
    text += "extra." + key + " = " + value + "\n";
  }
  return text;
}

AnalyzeReport cmd_analyze(const std::string& generations_path, NgramUnit unit,
                          std::span<const std::pair<std::string, std::string>> extra,
                          const std::string& out_path) {
  const GenerationsFile file = read_generations_file(generations_path);
  AnalyzeReport report;
  report.summary = summarize(file.records, unit);
  report.extra.assign(extra.begin(), extra.end());

  if (!out_path.empty()) {
    atomic_write_file(out_path, render_analyze_text(report));
    json j = summary_to_json(report.summary);
    for (const auto& [key, value] : report.extra) {
      j["extra"][key] = value;
    }
    atomic_write_file(out_path + ".json", j.dump(2) + "\n");
  }
  return report;
}

}  // namespace tailcut::harness
