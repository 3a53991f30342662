#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "gist/groundedness.hpp"
#include "gist/ingest.hpp"
#include "gist/sim.hpp"

namespace gist::config {

struct DatasetConfig {
  std::string name;
  std::filesystem::path records_path;
  gr::VerificationConfig verification;  // dataset field filled with `name`
  // When absent, the built-in default mapping for `name` is used.
  std::optional<std::vector<ingest::SignalRule>> mapping_rules;
};

struct JudgeConfig {
  std::string mode = "mock";  // mock | remote
  std::string model_id = "mock-judge-v1";
  int max_tokens = 512;
  std::filesystem::path cache_dir;  // default: <out_dir>/.judge_cache
  std::size_t batch_size = 50;      // taxonomy mapping batch size
};

struct SpecificityConfig {
  std::size_t pool_size = 1000;
  std::size_t test_set_size = 50;
  std::size_t evidence_cap = 5;
  std::string overlap_mode = "category";  // category | judge
};

struct SimConfig {
  std::size_t users = 200;
  int true_interests = 3;
  sim::NoiseParams noise;
  double conservative_keep = 0.5;
  int hallucinating_extra = 3;
};

struct SynthConfig {
  std::filesystem::path user_clusters_path;  // JSONL {user_id, clusters: [...]}
  std::string source_dataset;                // ingested dataset feeding the cohorts
  std::size_t cluster_count = 10;
  std::size_t min_cohort_size = 10;
  std::size_t max_cohorts = 1000;
  std::size_t sample_size = 200;
  std::vector<std::string> redaction_terms;
};

struct RunConfig {
  std::uint64_t run_seed = 7;
  std::filesystem::path out_dir = "out";
  std::size_t window = 100;
  std::size_t max_users = 1000;
  std::size_t workers = 4;
  std::string generation_mode = "files";  // files | remote
  std::vector<std::string> models;
  JudgeConfig judge;
  std::vector<DatasetConfig> datasets;
  SpecificityConfig specificity;
  std::optional<SimConfig> sim;
  std::optional<SynthConfig> synth;
  std::filesystem::path taxonomy_path;   // default: shipped data file
  std::filesystem::path taxonomy_cache;  // default: <out_dir>/taxonomy/cache.tsv
  std::filesystem::path overrides_path;  // optional
  std::filesystem::path responses_dir;   // default: <out_dir>/responses
  std::vector<std::size_t> sweep_windows = {50, 100, 150, 200};

  std::uint64_t config_hash = 0;  // content hash of the loaded file

  const DatasetConfig* dataset(const std::string& name) const;
};

RunConfig load_config(const std::filesystem::path& path);

// Parses the same JSON document shape as load_config (used for inline
// configs in tests).
RunConfig parse_config(const std::string& content);

// Structural checks: at least one model and dataset, valid thresholds, judge
// identity distinct from every evaluated model, known modes.
void validate(const RunConfig& config);

// Resolves the registry for a run: built-in defaults overlaid with any
// per-dataset rules from the config.
ingest::MappingRegistry build_registry(const RunConfig& config);

}  // namespace gist::config
