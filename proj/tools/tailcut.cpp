// Copyright 2026 Tailcut Authors
// SPDX-License-Identifier: Apache-2.0

// Command-line driver: train the byte n-gram model, generate continuations
// under any truncation policy, sweep hyperparameter grids, replay traces,
// and compute metric reports.

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tailcut/harness.hpp"

namespace {

using tailcut::harness::Decoder;
using tailcut::harness::RunConfig;

struct DecoderFlags {
  std::string decoder = "adaptive";
  double epsilon = 0.001;
  int top_k = 20;
  double top_p = 0.95;
  double tau = 0.95;
  double eta = 0.0009;
  double mirostat_target = 3.0;
  double mirostat_lr = 0.1;
  std::string rule = "last-index";
  CLI::Option* opt_epsilon = nullptr;
  CLI::Option* opt_k = nullptr;
  CLI::Option* opt_p = nullptr;
  CLI::Option* opt_tau = nullptr;
  CLI::Option* opt_eta = nullptr;
  CLI::Option* opt_mirostat = nullptr;
};

void add_decoder_flags(CLI::App* cmd, DecoderFlags& f) {
  cmd->add_option("--decoder", f.decoder,
                  "adaptive | top_k | top_p | typical | eta | mirostat | greedy")
      ->capture_default_str();
  f.opt_epsilon = cmd->add_option("--epsilon", f.epsilon, "adaptive threshold");
  f.opt_k = cmd->add_option("--k", f.top_k, "top-k size");
  f.opt_p = cmd->add_option("--p", f.top_p, "top-p mass");
  f.opt_tau = cmd->add_option("--tau", f.tau, "typical mass");
  f.opt_eta = cmd->add_option("--eta", f.eta, "eta threshold");
  f.opt_mirostat = cmd->add_option("--mirostat-target", f.mirostat_target,
                                   "mirostat target cross-entropy (nats)");
  cmd->add_option("--mirostat-lr", f.mirostat_lr, "mirostat learning rate")
      ->capture_default_str();
  cmd->add_option("--rule", f.rule, "adaptive rule: last-index | first-break")
      ->check(CLI::IsMember({"last-index", "first-break"}))
      ->capture_default_str();
}

// A hyperparameter flag that does not belong to the chosen decoder is a
// configuration error, not something to ignore silently.
void apply_decoder_flags(const DecoderFlags& f, RunConfig& cfg) {
  cfg.decoder = tailcut::harness::decoder_from_name(f.decoder);
  struct Owner {
    CLI::Option* opt;
    Decoder owner;
    const char* name;
  };
  const Owner owners[] = {
      {f.opt_epsilon, Decoder::kAdaptive, "--epsilon"},
      {f.opt_k, Decoder::kTopK, "--k"},
      {f.opt_p, Decoder::kTopP, "--p"},
      {f.opt_tau, Decoder::kTypical, "--tau"},
      {f.opt_eta, Decoder::kEta, "--eta"},
      {f.opt_mirostat, Decoder::kMirostat, "--mirostat-target"},
  };
  for (const Owner& o : owners) {
    if (o.opt && o.opt->count() > 0 && cfg.decoder != o.owner) {
      throw std::invalid_argument(std::string(o.name) + " does not apply to decoder '" +
                                  f.decoder + "'");
    }
  }
  cfg.epsilon = f.epsilon;
  cfg.top_k = f.top_k;
  cfg.top_p = f.top_p;
  cfg.tau = f.tau;
  cfg.eta = f.eta;
  cfg.mirostat_target = f.mirostat_target;
  cfg.mirostat_lr = f.mirostat_lr;
  cfg.rule = (f.rule == "first-break") ? tailcut::truncate::AdaptiveRule::kFirstBreak
                                       : tailcut::truncate::AdaptiveRule::kLastIndex;
}

tailcut::harness::Source load_source(const std::string& model_path,
                                     const std::string& trace_path) {
  if (model_path.empty() == trace_path.empty()) {
    throw std::invalid_argument("provide exactly one of --model or --trace");
  }
  if (!model_path.empty()) {
    return tailcut::harness::Source::from_model_file(model_path);
  }
  return tailcut::harness::Source::from_trace_file(trace_path);
}

std::vector<std::pair<std::string, std::string>> parse_extra(
    const std::vector<std::string>& kvs) {
  std::vector<std::pair<std::string, std::string>> extra;
  for (const std::string& kv : kvs) {
    const size_t eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw std::invalid_argument("--extra expects key=value, got '" + kv + "'");
    }
    extra.emplace_back(kv.substr(0, eq), kv.substr(eq + 1));
  }
  return extra;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tailcut: adaptive and classical truncation decoding at desk scale"};
  app.require_subcommand(1);

  // train-lm
  auto* train = app.add_subcommand("train-lm", "Train a byte-level n-gram model");
  std::string train_corpus, train_out;
  int train_order = 3;
  double train_smoothing = 0.01;
  train->add_option("--corpus", train_corpus, "raw byte corpus")->required();
  train->add_option("--order", train_order, "n-gram order")->capture_default_str();
  train->add_option("--smoothing", train_smoothing, "add-k smoothing")->capture_default_str();
  train->add_option("--out", train_out, "model file to write")->required();

  // shared generate/sweep inputs
  std::string model_path, trace_path, prefixes_path, out_path;
  DecoderFlags flags;
  RunConfig cfg;

  auto* gen = app.add_subcommand("generate", "Generate continuations with diagnostics");
  std::string gen_way = "multinomial";
  gen->add_option("--model", model_path, "trained n-gram model file");
  gen->add_option("--trace", trace_path, "logit trace file");
  gen->add_option("--prefixes", prefixes_path, "text file, one prefix per line");
  add_decoder_flags(gen, flags);
  gen->add_option("--way", gen_way, "multinomial | random")
      ->check(CLI::IsMember({"multinomial", "random"}))
      ->capture_default_str();
  gen->add_option("--seed", cfg.seed, "root seed")->capture_default_str();
  gen->add_option("--max-new-tokens", cfg.max_new_tokens, "")->capture_default_str();
  gen->add_option("--repeats", cfg.repeats, "runs per prefix")->capture_default_str();
  gen->add_option("--prefix-length", cfg.prefix_length, "bytes kept from each prefix")
      ->capture_default_str();
  gen->add_flag("--full-prefix", cfg.full_prefix, "keep whole prefix lines");
  gen->add_option("--out", out_path, "generations file to write")->required();

  auto* sweep = app.add_subcommand("sweep", "Sweep a hyperparameter grid");
  std::vector<double> sweep_grid;
  std::vector<std::string> sweep_ways{"multinomial"};
  sweep->add_option("--model", model_path, "trained n-gram model file");
  sweep->add_option("--trace", trace_path, "logit trace file");
  sweep->add_option("--prefixes", prefixes_path, "text file, one prefix per line");
  add_decoder_flags(sweep, flags);
  sweep->add_option("--grid", sweep_grid, "hyperparameter values")
      ->required()
      ->delimiter(',');
  sweep->add_option("--ways", sweep_ways, "sampling ways to compare")->delimiter(',');
  sweep->add_option("--seed", cfg.seed, "root seed")->capture_default_str();
  sweep->add_option("--max-new-tokens", cfg.max_new_tokens, "")->capture_default_str();
  sweep->add_option("--repeats", cfg.repeats, "runs per prefix")->capture_default_str();
  sweep->add_option("--prefix-length", cfg.prefix_length, "")->capture_default_str();
  sweep->add_flag("--full-prefix", cfg.full_prefix, "keep whole prefix lines");
  sweep->add_option("--out", out_path, "stats table to write")->required();

  auto* replay = app.add_subcommand("replay", "Replay a trace under one policy");
  replay->add_option("--trace", trace_path, "logit trace file")->required();
  add_decoder_flags(replay, flags);
  std::string replay_way = "multinomial";
  replay->add_option("--way", replay_way, "multinomial | random")
      ->check(CLI::IsMember({"multinomial", "random"}))
      ->capture_default_str();
  replay->add_option("--seed", cfg.seed, "root seed")->capture_default_str();
  replay->add_option("--out", out_path, "report file to write")->required();

  auto* analyze = app.add_subcommand("analyze", "Metrics report for a generations file");
  std::string analyze_in, analyze_unit = "word";
  std::vector<std::string> analyze_extra;
  analyze->add_option("--generations", analyze_in, "generations file")->required();
  analyze->add_option("--ngram-unit", analyze_unit, "word | byte")
      ->check(CLI::IsMember({"word", "byte"}))
      ->capture_default_str();
  analyze->add_option("--extra", analyze_extra,
                      "externally computed metric key=value (repeatable)");
  analyze->add_option("--out", out_path, "report file to write")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train) {
      tailcut::harness::cmd_train_lm(train_corpus, train_order, train_smoothing, train_out);
      std::cout << "wrote " << train_out << "\n";
      return 0;
    }
    if (*gen) {
      apply_decoder_flags(flags, cfg);
      cfg.way = tailcut::harness::way_from_name(gen_way);
      const auto source = load_source(model_path, trace_path);
      if (!source.trace && prefixes_path.empty()) {
        throw std::invalid_argument("--prefixes is required with --model");
      }
      const auto result = tailcut::harness::cmd_generate(source, prefixes_path, cfg, out_path);
      std::cout << "wrote " << out_path << " (" << result.records.size() << " records)\n";
      return 0;
    }
    if (*sweep) {
      apply_decoder_flags(flags, cfg);
      std::vector<tailcut::sample::Way> ways;
      for (const std::string& w : sweep_ways) {
        ways.push_back(tailcut::harness::way_from_name(w));
      }
      const auto source = load_source(model_path, trace_path);
      if (!source.trace && prefixes_path.empty()) {
        throw std::invalid_argument("--prefixes is required with --model");
      }
      const auto result = tailcut::harness::cmd_sweep(source, prefixes_path, cfg.decoder,
                                                      sweep_grid, ways, cfg, out_path);
      std::cout << "wrote " << out_path << " (" << result.cells.size() << " cells)\n";
      return 0;
    }
    if (*replay) {
      apply_decoder_flags(flags, cfg);
      cfg.way = tailcut::harness::way_from_name(replay_way);
      const auto report = tailcut::harness::cmd_replay(trace_path, cfg, out_path);
      std::cout << "wrote " << out_path << " (" << report.per_step.size() << " steps)\n";
      return 0;
    }
    if (*analyze) {
      const auto unit = analyze_unit == "byte" ? tailcut::harness::NgramUnit::kByte
                                               : tailcut::harness::NgramUnit::kWord;
      const auto extra = parse_extra(analyze_extra);
      tailcut::harness::cmd_analyze(analyze_in, unit, extra, out_path);
      std::cout << "wrote " << out_path << "\n";
      return 0;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
