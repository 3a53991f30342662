#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "gist/config.hpp"
#include "gist/judge.hpp"
#include "gist/judge_client.hpp"
#include "gist/manifest.hpp"
#include "gist/taxonomy.hpp"

namespace gist::pipeline {

// Everything a stage needs: validated config, the run manifest, the loaded
// taxonomy, and the judge (mock by default, remote when configured; tests may
// inject one).
struct PipelineContext {
  config::RunConfig config;
  manifest::Manifest manifest;
  taxonomy::Taxonomy taxonomy;
  std::unique_ptr<judge::Judge> judge_impl;
  std::shared_ptr<judge::Transport> transport;  // remote judge/generation wire

  judge::Judge& judge() { return *judge_impl; }
  std::filesystem::path out() const { return config.out_dir; }
  std::filesystem::path manifest_path() const {
    return config.out_dir / "manifest.json";
  }
};

PipelineContext make_context(config::RunConfig config);
PipelineContext make_context(config::RunConfig config,
                             std::unique_ptr<judge::Judge> judge,
                             std::shared_ptr<judge::Transport> transport = nullptr);

// Stage names accepted by run_stage, in pipeline order:
//   simulate ingest synth elicit verify map-taxonomy specificity aggregate
//   report sweep
const std::vector<std::string>& stage_names();

// Runs one stage: checks its dependencies (StageDependencyError when a
// prerequisite has not completed), skips when inputs are unchanged and
// outputs exist, and records completion in the manifest.
void run_stage(PipelineContext& ctx, const std::string& stage);

// simulate (when configured) through report.
void run_all(PipelineContext& ctx);

// Compares two user_scores files from different runs. Refuses (throws Error)
// when the score files carry different model-set stamps or manifest hashes:
// recall depends on the oracle's model set, so such comparisons are invalid.
void compare_score_files(const std::filesystem::path& a,
                         const std::filesystem::path& b,
                         const std::filesystem::path& out_csv);

}  // namespace gist::pipeline
