// Copyright 2026 Tailcut Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

/**
 * The experiment loops behind the CLI: train a byte n-gram model, generate
 * continuations under any decoder, sweep hyperparameter grids, replay
 * traces, and compute metric reports.
 *
 * Randomness contract: one root seed; a sequence owns
 * derive(derive(derive(root, cell), prefix), repeat) and draws step t with
 * stream position t. Sweep cells are therefore order-independent and safe
 * to run in parallel; merge order is fixed by cell index.
 *
 * Output files are written atomically (temp file + rename) and are
 * byte-deterministic for identical inputs and seeds.
 */

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tailcut/lm.hpp"
#include "tailcut/metrics.hpp"
#include "tailcut/sample.hpp"
#include "tailcut/trace.hpp"
#include "tailcut/truncate.hpp"

namespace tailcut::harness {

enum class Decoder { kAdaptive, kTopK, kTopP, kTypical, kEta, kMirostat, kGreedy };

std::string decoder_name(Decoder d);
Decoder decoder_from_name(const std::string& name);  // throws on unknown
std::string way_name(sample::Way way);
sample::Way way_from_name(const std::string& name);  // throws on unknown

enum class NgramUnit { kWord, kByte };

struct RunConfig {
  Decoder decoder = Decoder::kAdaptive;

  double epsilon = 0.001;        // adaptive
  int top_k = 20;                // top-k
  double top_p = 0.95;           // top-p
  double tau = 0.95;             // typical
  double eta = 0.0009;           // eta
  double mirostat_target = 3.0;  // nats
  double mirostat_lr = 0.1;

  truncate::AdaptiveRule rule = truncate::AdaptiveRule::kLastIndex;
  sample::Way way = sample::Way::kMultinomial;
  uint64_t seed = 0;
  int max_new_tokens = 256;
  int repeats = 5;
  int prefix_length = 32;   // bytes taken from each prefix line
  bool full_prefix = false; // prompt-style: keep whole prefix line

  void validate() const;  // throws std::invalid_argument

  /// Value of the active decoder's hyperparameter (greedy reports 1).
  double hyperparameter() const;
  void set_hyperparameter(double value);
};

/**
 * Per-sequence decoder state. step() applies the configured policy;
 * observe() feeds back the sampled token's surprise (mirostat only).
 */
class DecoderSession {
 public:
  explicit DecoderSession(const RunConfig& cfg);
  truncate::CandidateSet step(const dist::SortedDistribution& s);
  void observe(double surprise);
  double mirostat_mu() const { return mirostat_.mu; }

 private:
  RunConfig cfg_;
  truncate::MirostatState mirostat_;
};

/// Surprise -ln p of the drawn token under the pre-truncation distribution,
/// reconstructed from the set it was drawn from.
double observed_surprise(const truncate::CandidateSet& set, int32_t token);

/// Generate one continuation from the model with context feedback.
metrics::GenerationRecord generate_one(const lm::NgramModel& model,
                                       std::span<const uint8_t> prefix,
                                       const RunConfig& cfg, uint64_t sequence_seed);

/// Replay the policy over fixed trace distributions (no feedback).
metrics::GenerationRecord replay_one(const lm::LogitTrace& trace, const RunConfig& cfg,
                                     uint64_t sequence_seed);

/// Either a trained model (feedback generation) or a trace (fixed replay).
struct Source {
  std::optional<lm::NgramModel> model;
  std::optional<lm::LogitTrace> trace;

  static Source from_model(lm::NgramModel m);
  static Source from_trace(lm::LogitTrace t);
  static Source from_model_file(const std::string& path);
  static Source from_trace_file(const std::string& path);
};

/**
 * All records of one cell: prefixes x repeats for a model source (each
 * prefix trimmed to cfg.prefix_length unless cfg.full_prefix), repeats
 * alone for a trace source (the trace fixes the distributions; prefixes
 * are not consulted).
 */
std::vector<metrics::GenerationRecord> generate_records(const Source& source,
                                                        std::span<const std::string> prefixes,
                                                        const RunConfig& cfg,
                                                        uint64_t cell_index = 0);

// ---------------------------------------------------------------- file ops

/// Write `content` to `path` atomically (temp file in the same directory,
/// then rename).
void atomic_write_file(const std::string& path, const std::string& content);

std::vector<uint8_t> read_bytes(const std::string& path);
std::vector<std::string> read_lines(const std::string& path);

void cmd_train_lm(const std::string& corpus_path, int order, double smoothing_k,
                  const std::string& out_path);

struct GenerationsMeta {
  std::string decoder;
  double hyperparameter = 0.0;
  std::string way;
  uint64_t seed = 0;
  int max_new_tokens = 0;
  int repeats = 0;
};

struct GenerationsFile {
  GenerationsMeta meta;
  std::vector<metrics::GenerationRecord> records;
};

/// Generate and write the generations file; returns what was written.
GenerationsFile cmd_generate(const Source& source, const std::string& prefixes_path,
                             const RunConfig& cfg, const std::string& out_path);

GenerationsFile read_generations_file(const std::string& path);

/// Aggregate metrics of one generations batch. Records too short for a
/// metric are counted, never silently dropped; means cover defined records.
struct MetricsSummary {
  uint64_t records = 0;
  uint64_t metric_defined = 0;  // records long enough for rep/diversity
  double rep_2 = 0.0, rep_3 = 0.0, rep_4 = 0.0;
  double diversity = 0.0;
  metrics::SweepStats stats;
};

MetricsSummary summarize(std::span<const metrics::GenerationRecord> records, NgramUnit unit);

struct SweepCell {
  double hyperparameter = 0.0;
  sample::Way way = sample::Way::kMultinomial;
  MetricsSummary summary;
};

struct SweepResult {
  Decoder decoder = Decoder::kAdaptive;
  std::vector<SweepCell> cells;
};

/**
 * One cell per (grid value, way), each run with cell-derived seeds and
 * repeats averaged. Writes a flat key-value text table to out_path and the
 * machine-readable rows (one JSON object per cell) to out_path + ".json".
 * Cells run in parallel; merge order is by cell index.
 */
SweepResult cmd_sweep(const Source& source, const std::string& prefixes_path, Decoder decoder,
                      std::span<const double> grid, std::span<const sample::Way> ways,
                      const RunConfig& base_cfg, const std::string& out_path);

struct ReplayReport {
  std::vector<metrics::StepDiag> per_step;
  bool has_gold = false;
  double hit_1 = 0.0, hit_3 = 0.0, hit_5 = 0.0;
};

/// Policy diagnostics over a trace plus HIT@{1,3,5} when gold is present.
/// Writes text to out_path (and structured rows to out_path + ".json")
/// unless out_path is empty.
ReplayReport cmd_replay(const std::string& trace_path, const RunConfig& cfg,
                        const std::string& out_path);

struct AnalyzeReport {
  MetricsSummary summary;
  std::vector<std::pair<std::string, std::string>> extra;  // externally computed values
};

/// Metrics report for an existing generations file; text to out_path and
/// structured output to out_path + ".json" unless out_path is empty.
AnalyzeReport cmd_analyze(const std::string& generations_path, NgramUnit unit,
                          std::span<const std::pair<std::string, std::string>> extra,
                          const std::string& out_path);

std::string render_analyze_text(const AnalyzeReport& report);
std::string render_sweep_text(const SweepResult& result);

}  // namespace tailcut::harness
