// gistbench: batch pipeline for scoring interest-extraction systems with
// Interest Groundedness (IG) and Interest Specificity (IS).
//
// Usage:
//   gistbench run --config cfg.json                 # simulate..report
//   gistbench <stage> --config cfg.json             # one stage
//   gistbench compare --a s1.jsonl --b s2.jsonl --out cmp.csv
//
// Stages: simulate ingest synth elicit verify map-taxonomy specificity
//         aggregate report sweep

#include "gist/config.hpp"
#include "gist/errors.hpp"
#include "gist/pipeline.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

struct CommonFlags {
  std::string config_path;
  std::string out_dir;
  std::string judge_mode;
  std::int64_t seed = -1;
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "run configuration file")
      ->required();
  cmd->add_option("--out-dir", flags.out_dir, "override the configured out_dir");
  cmd->add_option("--judge", flags.judge_mode, "judge override: mock or remote");
  cmd->add_option("--seed", flags.seed, "override the run seed");
}

gist::config::RunConfig load_with_overrides(const CommonFlags& flags) {
  gist::config::RunConfig config = gist::config::load_config(flags.config_path);
  if (!flags.out_dir.empty()) {
    const std::filesystem::path out = flags.out_dir;
    // Paths derived from out_dir move with it unless the config pinned them.
    if (config.judge.cache_dir == config.out_dir / ".judge_cache") {
      config.judge.cache_dir = out / ".judge_cache";
    }
    if (config.taxonomy_cache == config.out_dir / "taxonomy" / "cache.tsv") {
      config.taxonomy_cache = out / "taxonomy" / "cache.tsv";
    }
    if (config.responses_dir == config.out_dir / "responses") {
      config.responses_dir = out / "responses";
    }
    config.out_dir = out;
  }
  if (!flags.judge_mode.empty()) config.judge.mode = flags.judge_mode;
  if (flags.seed >= 0) config.run_seed = static_cast<std::uint64_t>(flags.seed);
  gist::config::validate(config);
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"interest-profile evaluation pipeline"};
  app.require_subcommand(1);

  CommonFlags run_flags;
  CLI::App* run_cmd = app.add_subcommand("run", "run simulate..report");
  add_common_flags(run_cmd, run_flags);

  std::map<std::string, CommonFlags> stage_flags;
  std::map<std::string, CLI::App*> stage_cmds;
  for (const std::string& stage : gist::pipeline::stage_names()) {
    CLI::App* cmd = app.add_subcommand(stage, "run the " + stage + " stage");
    add_common_flags(cmd, stage_flags[stage]);
    stage_cmds[stage] = cmd;
  }

  std::string compare_a, compare_b, compare_out;
  CLI::App* compare_cmd =
      app.add_subcommand("compare", "compare two user_scores files");
  compare_cmd->add_option("--a", compare_a, "first user_scores.jsonl")->required();
  compare_cmd->add_option("--b", compare_b, "second user_scores.jsonl")->required();
  compare_cmd->add_option("--out", compare_out, "comparison csv")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) {
      gist::pipeline::PipelineContext ctx =
          gist::pipeline::make_context(load_with_overrides(run_flags));
      gist::pipeline::run_all(ctx);
      return 0;
    }
    if (compare_cmd->parsed()) {
      gist::pipeline::compare_score_files(compare_a, compare_b, compare_out);
      return 0;
    }
    for (const auto& [stage, cmd] : stage_cmds) {
      if (cmd->parsed()) {
        gist::pipeline::PipelineContext ctx =
            gist::pipeline::make_context(load_with_overrides(stage_flags[stage]));
        gist::pipeline::run_stage(ctx, stage);
        return 0;
      }
    }
  } catch (const gist::StageDependencyError& e) {
    std::cerr << "stage dependency missing: " << e.what() << "\n";
    return 2;
  } catch (const gist::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
