#pragma once

#include "climcausal/cam_prune.hpp"
#include "climcausal/correlation.hpp"
#include "climcausal/graph.hpp"
#include "climcausal/graph_metrics.hpp"
#include "climcausal/panel.hpp"
#include "climcausal/query_agent.hpp"
#include "climcausal/score_order.hpp"
#include "climcausal/synthetic_sem.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace climcausal {

struct SyntheticSpec {
  std::size_t d = 5;
  double edge_prob = 0.4;
  std::size_t n = 1000;
  std::set<Mechanism> family = nonlinear_family();
};

struct RealInputs {
  std::filesystem::path wdi;
  std::filesystem::path emissions;
  std::optional<std::set<std::string>> indicator_whitelist;
};

struct PipelineConfig {
  std::optional<RealInputs> real;
  std::optional<SyntheticSpec> synthetic;

  IngestConfig ingest;
  CorrelationMethod screen_method = CorrelationMethod::Pearson;
  double tau_target = 0.1;
  double tau_dup = 0.98;
  double ridge = 0.01;
  std::size_t subsample_cap = 5000;
  double alpha = 0.001;
  int basis_size = 10;

  bool queries = true;
  std::set<QueryCategory> categories = all_categories();
  std::set<PromptStyle> styles = all_styles();
  LlmConfig llm;
  bool literature = true;
  LiteratureConfig literature_cfg;

  std::filesystem::path output_dir;  // empty: nothing written
  std::uint64_t seed = 7;
  unsigned threads = 1;

  // Config error unless exactly one input source is set and every threshold is
  // in range.
  void validate() const;
};

// "key = value" lines for every field, in a fixed order.
std::string explain_config(const PipelineConfig& cfg);

struct RankedDriver {
  std::string label;
  double p_value = 1.0;
  double f_statistic = 0.0;
};

struct QueryRecord {
  CausalQuery query;
  LlmResponse response;
};

struct StageTiming {
  std::string stage;
  double seconds = 0.0;
};

struct PipelineReport {
  bool complete = false;
  std::string failed_stage;  // empty when complete
  std::string failure;
  std::string config_echo;
  std::string target;

  SampleMatrix samples;
  std::vector<std::string> dropped_indicators;
  std::optional<ScreenReport> screen;
  bool screen_applied = true;
  std::optional<TopologicalOrder> order;
  std::optional<PruneResult> prune;
  std::optional<CausalGraph> truth;
  std::vector<RankedDriver> drivers;
  std::optional<MetricsReport> metrics;
  std::string metrics_skip_reason;
  std::vector<QueryRecord> queries;
  std::string queries_skip_reason;
  std::vector<std::pair<std::string, std::vector<ArticleRecord>>> literature;
  std::vector<std::string> warnings;
  std::vector<StageTiming> timings;

  // Full text: every section, the determinism hash line, then timings.
  std::string text() const;
  // Text above the hash line; the hash covers exactly this.
  std::string deterministic_text() const;
  std::string determinism_hash() const;
};

// Runs ingest (or synthesis), screening, ordering, pruning, metrics (synthetic
// only) and queries. With an output directory set, writes report.txt,
// graph.csv, graph.dot, truth.csv (synthetic) and prompts/<archive name>.
// A failing stage writes the partial report and rethrows with the stage name
// and seed in the message.
PipelineReport run_pipeline(const PipelineConfig& cfg);

// Parents of `target` in the pruned graph ordered by ascending p-value (ties by
// label).
std::vector<RankedDriver> rank_drivers(const PruneResult& prune, const std::string& target);

}  // namespace climcausal
