#include "gist/pipeline.hpp"

#include "gist/aggregate.hpp"
#include "gist/elicit.hpp"
#include "gist/errors.hpp"
#include "gist/hash.hpp"
#include "gist/ingest.hpp"
#include "gist/io.hpp"
#include "gist/parallel.hpp"
#include "gist/sim.hpp"
#include "gist/specificity.hpp"
#include "gist/stats.hpp"
#include "gist/synth.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

namespace gist::pipeline {

namespace {

namespace fs = std::filesystem;

// ---------------------------------------------------------------- artifacts

fs::path ingested_path(const PipelineContext& ctx, const std::string& dataset) {
  return ctx.out() / "ingested" / (dataset + ".jsonl");
}
fs::path ingest_stats_path(const PipelineContext& ctx, const std::string& dataset) {
  return ctx.out() / "ingested" / (dataset + ".stats.json");
}
fs::path profiles_path(const PipelineContext& ctx, const std::string& dataset,
                       const std::string& model) {
  return ctx.out() / "profiles" / dataset / (model + ".jsonl");
}
fs::path verdicts_path(const PipelineContext& ctx, const std::string& dataset,
                       const std::string& model) {
  return ctx.out() / "verdicts" / dataset / (model + ".jsonl");
}
fs::path specificity_path(const PipelineContext& ctx, const std::string& dataset,
                          const std::string& model) {
  return ctx.out() / "specificity" / dataset / (model + ".jsonl");
}
fs::path assignments_path(const PipelineContext& ctx) {
  return ctx.out() / "taxonomy" / "assignments.jsonl";
}
fs::path scores_path(const PipelineContext& ctx, const std::string& dataset) {
  return ctx.out() / "scores" / dataset / "user_scores.jsonl";
}
fs::path reports_dir(const PipelineContext& ctx, const std::string& dataset) {
  return ctx.out() / "reports" / dataset;
}

std::string manifest_header(const PipelineContext& ctx) {
  return "manifest=" + ctx.manifest.identity_hex();
}

std::string sanitize_name(const std::string& raw) {
  std::string safe;
  safe.reserve(raw.size());
  for (char c : raw) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '-' || c == '_';
    safe.push_back(ok ? c : '_');
  }
  return safe;
}

fs::path response_file(const PipelineContext& ctx, const std::string& model,
                       const std::string& user, std::size_t chunk) {
  // The hash suffix keeps sanitized names collision-free.
  const std::string name = sanitize_name(user) + "-" +
                           hex16(fnv1a64(user)).substr(0, 8) + "__" +
                           std::to_string(chunk) + ".txt";
  return ctx.config.responses_dir / model / name;
}

// ------------------------------------------------------------------ loaders

Json record_to_json(const EngagementRecord& rec) {
  Json j = {{"dataset", rec.dataset},
            {"user_id", rec.user_id},
            {"object_id", rec.object_id},
            {"object_text", rec.object_text},
            {"timestamp", rec.timestamp}};
  switch (rec.engagement_raw.kind) {
    case RawSignal::Kind::Action:
      j["engagement_type"] = rec.engagement_raw.action;
      break;
    case RawSignal::Kind::WatchRatio:
      j["watch_ratio"] = rec.engagement_raw.watch_ratio;
      break;
    case RawSignal::Kind::Rating:
      j["rating"] = rec.engagement_raw.rating;
      break;
  }
  return j;
}

std::vector<InteractionHistory> load_ingested(const PipelineContext& ctx,
                                              const std::string& dataset) {
  std::vector<InteractionHistory> histories;
  std::map<std::string, std::size_t> index;
  for_each_jsonl(ingested_path(ctx, dataset), [&](const Json& j) {
    const std::string user = j.at("user_id").get<std::string>();
    auto [it, inserted] = index.emplace(user, histories.size());
    if (inserted) {
      histories.push_back(InteractionHistory{user, {}});
    }
    ClassifiedRecord rec;
    rec.record.dataset = dataset;
    rec.record.user_id = user;
    rec.record.object_id = j.at("object_id").get<std::string>();
    rec.record.engagement_raw =
        RawSignal::make_action(j.at("engagement").get<std::string>());
    rec.record.object_text = j.at("object_text").get<std::string>();
    rec.record.timestamp = j.at("timestamp").get<std::int64_t>();
    rec.cls = *engagement_class_from(j.at("class").get<std::string>());
    histories[it->second].records.push_back(std::move(rec));
  });
  return histories;
}

Json profile_to_json(const elicit::InterestProfile& profile) {
  Json interests = Json::array();
  for (const elicit::PredictedInterest& interest : profile.interests) {
    interests.push_back({{"text", interest.text},
                         {"evidence_ids", interest.evidence_ids},
                         {"flagged", interest.flagged}});
  }
  return {{"user_id", profile.user_id},
          {"model", profile.source_model},
          {"interests", interests},
          {"unparsable_chunks", profile.unparsable_chunks},
          {"hallucinated_citations", profile.hallucinated_citations},
          {"multi_cite_violations", profile.multi_cite_violations}};
}

std::vector<elicit::InterestProfile> load_profiles(const PipelineContext& ctx,
                                                   const std::string& dataset,
                                                   const std::string& model) {
  std::vector<elicit::InterestProfile> profiles;
  for_each_jsonl(profiles_path(ctx, dataset, model), [&](const Json& j) {
    elicit::InterestProfile profile;
    profile.user_id = j.at("user_id").get<std::string>();
    profile.source_model = j.at("model").get<std::string>();
    for (const Json& ij : j.at("interests")) {
      elicit::PredictedInterest interest;
      interest.text = ij.at("text").get<std::string>();
      interest.evidence_ids = ij.at("evidence_ids").get<std::vector<std::string>>();
      interest.flagged = ij.at("flagged").get<bool>();
      profile.interests.push_back(std::move(interest));
    }
    profile.unparsable_chunks = j.value("unparsable_chunks", std::size_t{0});
    profile.hallucinated_citations = j.value("hallucinated_citations", std::size_t{0});
    profile.multi_cite_violations = j.value("multi_cite_violations", std::size_t{0});
    profiles.push_back(std::move(profile));
  });
  return profiles;
}

struct VerdictRow {
  std::string user;
  std::string model;
  std::string interest_text;
  gr::SignalCounts counts;
  bool verified = false;
  std::vector<gr::FailureMode> failure_modes;
  int dropped_evidence = 0;
  int unresolved_citations = 0;
  std::vector<std::string> evidence_ids;  // judge-kept evidence
};

Json verdict_to_json(const VerdictRow& row) {
  Json modes = Json::array();
  for (gr::FailureMode mode : row.failure_modes) modes.push_back(to_string(mode));
  return {{"user", row.user},
          {"model", row.model},
          {"interest_text", row.interest_text},
          {"counts",
           {{"exp_pos", row.counts.exp_pos},
            {"imp_pos", row.counts.imp_pos},
            {"exp_neg", row.counts.exp_neg},
            {"imp_neg", row.counts.imp_neg}}},
          {"verified", row.verified},
          {"failure_modes", modes},
          {"dropped_evidence", row.dropped_evidence},
          {"unresolved_citations", row.unresolved_citations},
          {"evidence_ids", row.evidence_ids}};
}

std::vector<VerdictRow> load_verdicts(const PipelineContext& ctx,
                                      const std::string& dataset,
                                      const std::string& model) {
  std::vector<VerdictRow> rows;
  for_each_jsonl(verdicts_path(ctx, dataset, model), [&](const Json& j) {
    VerdictRow row;
    row.user = j.at("user").get<std::string>();
    row.model = j.at("model").get<std::string>();
    row.interest_text = j.at("interest_text").get<std::string>();
    const Json& c = j.at("counts");
    row.counts = {c.at("exp_pos").get<int>(), c.at("imp_pos").get<int>(),
                  c.at("exp_neg").get<int>(), c.at("imp_neg").get<int>()};
    row.verified = j.at("verified").get<bool>();
    for (const Json& mj : j.at("failure_modes")) {
      const std::string name = mj.get<std::string>();
      for (gr::FailureMode mode :
           {gr::FailureMode::InsufficientImplicitPositive,
            gr::FailureMode::InsufficientExplicitPositive,
            gr::FailureMode::ExcessiveNegative}) {
        if (to_string(mode) == name) row.failure_modes.push_back(mode);
      }
    }
    row.dropped_evidence = j.at("dropped_evidence").get<int>();
    row.unresolved_citations = j.at("unresolved_citations").get<int>();
    row.evidence_ids = j.at("evidence_ids").get<std::vector<std::string>>();
    rows.push_back(std::move(row));
  });
  return rows;
}

std::map<std::string, int> load_assignments(const PipelineContext& ctx) {
  std::map<std::string, int> by_text;
  for_each_jsonl(assignments_path(ctx), [&](const Json& j) {
    by_text[j.at("interest_text").get<std::string>()] =
        j.at("category_id").get<int>();
  });
  return by_text;
}

struct SpecRow {
  std::string user;
  std::string model;
  std::string interest_text;
  std::optional<spec::SpecificityResult> result;
  std::string skipped_reason;
};

std::vector<SpecRow> load_spec_rows(const PipelineContext& ctx,
                                    const std::string& dataset,
                                    const std::string& model) {
  std::vector<SpecRow> rows;
  const fs::path path = specificity_path(ctx, dataset, model);
  if (!fs::exists(path)) return rows;
  for_each_jsonl(path, [&](const Json& j) {
    SpecRow row;
    row.user = j.at("user").get<std::string>();
    row.model = j.at("model").get<std::string>();
    row.interest_text = j.at("interest_text").get<std::string>();
    if (j.contains("skipped_reason")) {
      row.skipped_reason = j.at("skipped_reason").get<std::string>();
    } else {
      row.result = spec::SpecificityResult{j.at("correct").get<int>(),
                                           j.at("backing").get<int>()};
    }
    rows.push_back(std::move(row));
  });
  return rows;
}

// Joined Stage-1 + Stage-2 rows for one dataset across all models.
std::vector<agg::InterestOutcome> load_outcomes(const PipelineContext& ctx,
                                                const std::string& dataset,
                                                const std::map<std::string, int>&
                                                    assignments) {
  std::vector<agg::InterestOutcome> outcomes;
  for (const std::string& model : ctx.config.models) {
    std::map<std::pair<std::string, std::string>, SpecRow> spec_by_key;
    for (SpecRow& row : load_spec_rows(ctx, dataset, model)) {
      spec_by_key[{row.user, row.interest_text}] = std::move(row);
    }
    for (const VerdictRow& verdict : load_verdicts(ctx, dataset, model)) {
      agg::InterestOutcome outcome;
      outcome.user_id = verdict.user;
      outcome.model = model;
      outcome.interest_text = verdict.interest_text;
      outcome.verified = verdict.verified;
      outcome.failure_modes = verdict.failure_modes;
      auto it = assignments.find(verdict.interest_text);
      if (it == assignments.end()) {
        throw MissingAssignmentError("no category assignment for '" +
                                     verdict.interest_text + "'");
      }
      outcome.category_id = it->second;
      if (auto sit = spec_by_key.find({verdict.user, verdict.interest_text});
          sit != spec_by_key.end() && sit->second.result) {
        outcome.specificity = sit->second.result;
      }
      outcomes.push_back(std::move(outcome));
    }
  }
  return outcomes;
}

// ----------------------------------------------------------- stage plumbing

std::string fingerprint(const PipelineContext& ctx, const Json& params,
                        const std::vector<fs::path>& inputs) {
  std::uint64_t h = ctx.manifest.identity_hash();
  h = fnv1a64(params.dump(), h);
  std::vector<fs::path> sorted = inputs;
  std::sort(sorted.begin(), sorted.end());
  for (const fs::path& path : sorted) {
    h = fnv1a64(path.string(), h);
    if (fs::exists(path) && fs::is_regular_file(path)) {
      h = fnv1a64_u64(hash_file(path), h);
    } else {
      h = fnv1a64("missing", h);
    }
  }
  return hex16(h);
}

std::vector<fs::path> dir_files(const fs::path& dir) {
  std::vector<fs::path> files;
  if (!fs::exists(dir)) return files;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (entry.is_regular_file()) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

bool stage_fresh(const PipelineContext& ctx, const std::string& stage,
                 const std::string& input_hash,
                 const std::vector<fs::path>& outputs) {
  auto it = ctx.manifest.stages.find(stage);
  if (it == ctx.manifest.stages.end()) return false;
  if (!it->second.completed || it->second.input_hash != input_hash) return false;
  for (const fs::path& out : outputs) {
    if (!fs::exists(out)) return false;
  }
  return true;
}

void record_stage(PipelineContext& ctx, const std::string& stage,
                  const std::string& input_hash,
                  const std::vector<fs::path>& outputs) {
  manifest::StageRecord record;
  record.input_hash = input_hash;
  record.completed = true;
  for (const fs::path& out : outputs) record.outputs.push_back(out.string());
  ctx.manifest.stages[stage] = std::move(record);
  ctx.manifest.save(ctx.manifest_path());
}

void require_stage(const PipelineContext& ctx, const std::string& needed,
                   const std::string& for_stage) {
  auto it = ctx.manifest.stages.find(needed);
  if (it == ctx.manifest.stages.end() || !it->second.completed) {
    throw StageDependencyError("stage '" + for_stage + "' requires '" + needed +
                               "' to have completed first");
  }
}

std::string csv_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

// -------------------------------------------------------------- sim helpers

sim::GroundTruthUser make_sim_user(const PipelineContext& ctx, std::size_t index) {
  const config::SimConfig& sc = *ctx.config.sim;
  const std::uint64_t seed =
      derive_seed(ctx.config.run_seed, {"sim_user", std::to_string(index)});
  return sim::generate_user(seed, sc.true_interests, sc.noise, ctx.taxonomy);
}

std::string extractor_response(const PipelineContext& ctx, const std::string& model,
                               const sim::GroundTruthUser& user,
                               std::span<const ClassifiedRecord> chunk,
                               const gr::VerificationConfig& vconf) {
  const config::SimConfig& sc = *ctx.config.sim;
  if (model == "oracle") return sim::oracle_response(user, chunk, vconf);
  if (model == "conservative") {
    return sim::conservative_response(user, chunk, vconf, sc.conservative_keep);
  }
  if (model == "hallucinating") {
    return sim::hallucinating_response(user, chunk, vconf, sc.hallucinating_extra);
  }
  throw ConfigError("sim runs support models oracle/conservative/hallucinating; got '" +
                    model + "'");
}

// ------------------------------------------------------------------- stages

void stage_simulate(PipelineContext& ctx) {
  if (!ctx.config.sim) throw ConfigError("simulate needs a sim config block");
  const config::SimConfig& sc = *ctx.config.sim;
  const config::DatasetConfig* ds = ctx.config.dataset("sim");

  const Json params = {{"users", sc.users},
                       {"true_interests", sc.true_interests},
                       {"history_length", sc.noise.history_length},
                       {"window", ctx.config.window}};
  const std::string input_hash = fingerprint(ctx, params, {});
  const fs::path truth_path = ctx.out() / "sim" / "ground_truth.jsonl";
  const std::vector<fs::path> outputs = {ds->records_path, truth_path};
  if (stage_fresh(ctx, "simulate", input_hash, outputs)) return;

  std::vector<Json> record_rows;
  std::vector<Json> truth_rows;
  for (std::size_t i = 0; i < sc.users; ++i) {
    sim::GroundTruthUser user = make_sim_user(ctx, i);
    for (const EngagementRecord& rec : sim::to_records(user)) {
      record_rows.push_back(record_to_json(rec));
    }
    Json true_interests = Json::array();
    for (const sim::PlantedInterest& interest : user.true_interests) {
      true_interests.push_back({{"category_id", interest.category_id},
                                {"descriptor", interest.descriptor},
                                {"evidence_ids", interest.evidence_object_ids}});
    }
    truth_rows.push_back({{"user_id", user.user_id},
                          {"true_interests", true_interests},
                          {"decoy_descriptors", user.decoy_descriptors}});

    const auto chunks = ingest::segment_history(user.history, ctx.config.window);
    for (const std::string& model : ctx.config.models) {
      for (std::size_t ci = 0; ci < chunks.size(); ++ci) {
        write_text_file(
            response_file(ctx, model, user.user_id, ci),
            extractor_response(ctx, model, user, chunks[ci], ds->verification));
      }
    }
  }
  write_jsonl(ds->records_path, record_rows, manifest_header(ctx));
  write_jsonl(truth_path, truth_rows, manifest_header(ctx));
  record_stage(ctx, "simulate", input_hash, outputs);
}

void stage_ingest(PipelineContext& ctx) {
  if (ctx.config.sim) require_stage(ctx, "simulate", "ingest");

  std::vector<fs::path> inputs;
  std::vector<fs::path> outputs;
  for (const config::DatasetConfig& ds : ctx.config.datasets) {
    inputs.push_back(ds.records_path);
    outputs.push_back(ingested_path(ctx, ds.name));
    outputs.push_back(ingest_stats_path(ctx, ds.name));
  }
  const Json params = {{"max_users", ctx.config.max_users}};
  const std::string input_hash = fingerprint(ctx, params, inputs);
  if (stage_fresh(ctx, "ingest", input_hash, outputs)) return;

  const ingest::MappingRegistry registry = config::build_registry(ctx.config);
  for (const config::DatasetConfig& ds : ctx.config.datasets) {
    if (!fs::exists(ds.records_path)) {
      throw IngestError("records file for '" + ds.name +
                        "' not found: " + ds.records_path.string());
    }
    ingest::IngestedDataset data = ingest::ingest_file(
        ds.records_path, ds.name, registry, ctx.config.max_users,
        ctx.config.run_seed);

    std::vector<Json> rows;
    for (const InteractionHistory& history : data.histories) {
      for (const ClassifiedRecord& rec : history.records) {
        rows.push_back({{"user_id", rec.record.user_id},
                        {"object_id", rec.record.object_id},
                        {"engagement", rec.record.engagement_raw.label()},
                        {"class", to_string(rec.cls)},
                        {"object_text", rec.record.object_text},
                        {"timestamp", rec.record.timestamp}});
      }
    }
    write_jsonl(ingested_path(ctx, ds.name), rows, manifest_header(ctx));

    const Json stats = {{"dataset", ds.name},
                        {"records_read", data.stats.records_read},
                        {"records_kept", data.stats.records_kept},
                        {"dropped_unmapped", data.stats.dropped_unmapped},
                        {"duplicates_collapsed", data.stats.duplicates_collapsed},
                        {"users_total", data.stats.users_total},
                        {"users_selected", data.stats.users_selected}};
    write_text_file(ingest_stats_path(ctx, ds.name), stats.dump(2) + "\n");
  }
  record_stage(ctx, "ingest", input_hash, outputs);
}

void stage_elicit(PipelineContext& ctx) {
  require_stage(ctx, "ingest", "elicit");

  std::vector<fs::path> inputs;
  std::vector<fs::path> outputs;
  for (const config::DatasetConfig& ds : ctx.config.datasets) {
    inputs.push_back(ingested_path(ctx, ds.name));
    for (const std::string& model : ctx.config.models) {
      outputs.push_back(profiles_path(ctx, ds.name, model));
    }
  }
  for (const fs::path& f : dir_files(ctx.config.responses_dir)) inputs.push_back(f);
  const Json params = {{"window", ctx.config.window},
                       {"generation_mode", ctx.config.generation_mode}};
  const std::string input_hash = fingerprint(ctx, params, inputs);
  if (stage_fresh(ctx, "elicit", input_hash, outputs)) return;

  const bool remote = ctx.config.generation_mode == "remote";
  for (const config::DatasetConfig& ds : ctx.config.datasets) {
    const std::vector<InteractionHistory> histories = load_ingested(ctx, ds.name);
    for (const std::string& model : ctx.config.models) {
      std::unique_ptr<judge::CachedEndpoint> generator;
      if (remote) {
        if (!ctx.transport) ctx.transport = std::make_shared<judge::HttpTransport>();
        generator = std::make_unique<judge::CachedEndpoint>(
            "gen:" + model, ctx.transport,
            ctx.config.judge.cache_dir / "generation");
      }

      std::vector<Json> rows(histories.size());
      parallel_for(histories.size(), remote ? ctx.config.workers : 1, [&](std::size_t ui) {
        const InteractionHistory& history = histories[ui];
        const auto chunks = ingest::segment_history(history, ctx.config.window);
        std::vector<elicit::ProfileFragment> fragments;
        std::size_t unparsable = 0;
        std::size_t missing = 0;
        for (std::size_t ci = 0; ci < chunks.size(); ++ci) {
          const fs::path path = response_file(ctx, model, history.user_id, ci);
          std::string raw;
          if (fs::exists(path)) {
            raw = read_text_file(path);
          } else if (remote) {
            elicit::PromptSpec prompt = elicit::build_prompt(chunks[ci], ds.verification);
            judge::JudgeRequest request;
            request.model_id = model;
            request.user_text = prompt.text;
            request.max_tokens = ctx.config.judge.max_tokens;
            raw = generator->call(request).text;
            write_text_file(path, raw);  // archived for audit
          } else {
            ++missing;
            continue;
          }
          std::optional<elicit::ParsedFragment> parsed = elicit::parse_response(raw);
          if (!parsed) {
            ++unparsable;
            continue;
          }
          fragments.push_back(elicit::resolve_fragment(*parsed, chunks[ci]));
        }
        elicit::InterestProfile profile =
            elicit::merge_chunks(fragments, history.user_id, model);
        profile.unparsable_chunks = unparsable;
        Json row = profile_to_json(profile);
        row["missing_chunks"] = missing;
        rows[ui] = std::move(row);
      });
      write_jsonl(profiles_path(ctx, ds.name, model), rows, manifest_header(ctx));
    }
  }
  record_stage(ctx, "elicit", input_hash, outputs);
}

std::map<std::string, gr::EvidenceObject> user_resolver(
    const InteractionHistory& history) {
  std::map<std::string, gr::EvidenceObject> resolver;
  for (const ClassifiedRecord& rec : history.records) {
    // Most-recent record wins for objects engaged multiple times.
    resolver.try_emplace(rec.record.object_id,
                         gr::EvidenceObject{rec.record.object_id,
                                            rec.record.object_text, rec.cls,
                                            rec.record.engagement_raw.label()});
  }
  return resolver;
}

void stage_verify(PipelineContext& ctx) {
  require_stage(ctx, "elicit", "verify");

  std::vector<fs::path> inputs;
  std::vector<fs::path> outputs;
  for (const config::DatasetConfig& ds : ctx.config.datasets) {
    inputs.push_back(ingested_path(ctx, ds.name));
    for (const std::string& model : ctx.config.models) {
      inputs.push_back(profiles_path(ctx, ds.name, model));
      outputs.push_back(verdicts_path(ctx, ds.name, model));
    }
  }
  const std::string input_hash = fingerprint(ctx, Json::object(), inputs);
  if (stage_fresh(ctx, "verify", input_hash, outputs)) return;

  for (const config::DatasetConfig& ds : ctx.config.datasets) {
    const std::vector<InteractionHistory> histories = load_ingested(ctx, ds.name);
    std::map<std::string, std::size_t> history_index;
    for (std::size_t i = 0; i < histories.size(); ++i) {
      history_index[histories[i].user_id] = i;
    }

    for (const std::string& model : ctx.config.models) {
      const std::vector<elicit::InterestProfile> profiles =
          load_profiles(ctx, ds.name, model);
      std::vector<std::vector<Json>> per_user(profiles.size());
      parallel_for(profiles.size(), ctx.config.workers, [&](std::size_t pi) {
        const elicit::InterestProfile& profile = profiles[pi];
        auto hit = history_index.find(profile.user_id);
        if (hit == history_index.end()) {
          throw Error("profile user '" + profile.user_id + "' not in ingested data");
        }
        const std::map<std::string, gr::EvidenceObject> resolver =
            user_resolver(histories[hit->second]);
        for (const elicit::PredictedInterest& interest : profile.interests) {
          gr::FilteredEvidence filtered =
              gr::filter_evidence(interest, resolver, ctx.judge());
          const gr::SignalCounts counts = gr::count_signals(filtered.kept);
          gr::VerificationVerdict verdict = gr::verify(counts, ds.verification);

          VerdictRow row;
          row.user = profile.user_id;
          row.model = model;
          row.interest_text = interest.text;
          row.counts = counts;
          row.verified = verdict.verified;
          row.failure_modes = verdict.failure_modes;
          row.dropped_evidence = filtered.dropped_irrelevant;
          row.unresolved_citations = filtered.unresolved;
          for (const gr::EvidenceObject& obj : filtered.kept) {
            row.evidence_ids.push_back(obj.object_id);
          }
          per_user[pi].push_back(verdict_to_json(row));
        }
      });
      std::vector<Json> rows;
      for (std::vector<Json>& user_rows : per_user) {
        for (Json& row : user_rows) rows.push_back(std::move(row));
      }
      write_jsonl(verdicts_path(ctx, ds.name, model), rows, manifest_header(ctx));
    }
  }
  record_stage(ctx, "verify", input_hash, outputs);
}

void stage_map_taxonomy(PipelineContext& ctx) {
  require_stage(ctx, "elicit", "map-taxonomy");

  std::vector<fs::path> inputs;
  for (const config::DatasetConfig& ds : ctx.config.datasets) {
    for (const std::string& model : ctx.config.models) {
      inputs.push_back(profiles_path(ctx, ds.name, model));
    }
  }
  if (!ctx.config.overrides_path.empty()) inputs.push_back(ctx.config.overrides_path);
  const fs::path audit_path = ctx.out() / "taxonomy" / "audit.tsv";
  const std::vector<fs::path> outputs = {assignments_path(ctx), audit_path};
  const std::string input_hash = fingerprint(ctx, Json::object(), inputs);
  if (stage_fresh(ctx, "map-taxonomy", input_hash, outputs)) return;

  std::vector<elicit::InterestProfile> all_profiles;
  for (const config::DatasetConfig& ds : ctx.config.datasets) {
    for (const std::string& model : ctx.config.models) {
      for (elicit::InterestProfile& profile : load_profiles(ctx, ds.name, model)) {
        all_profiles.push_back(std::move(profile));
      }
    }
  }
  const std::vector<std::string> unique =
      taxonomy::collect_unique_interests(all_profiles);

  taxonomy::AssignmentStore store;
  store.load_cache(ctx.config.taxonomy_cache, ctx.taxonomy);
  if (!ctx.config.overrides_path.empty()) {
    store.load_overrides(ctx.config.overrides_path, ctx.taxonomy);
  }
  const std::vector<taxonomy::CategoryAssignment> assignments =
      taxonomy::map_interests(unique, ctx.judge(), ctx.taxonomy,
                              ctx.config.judge.batch_size, store);
  store.save_cache(ctx.config.taxonomy_cache, ctx.taxonomy);

  std::vector<Json> rows;
  for (const taxonomy::CategoryAssignment& a : assignments) {
    rows.push_back({{"interest_text", a.interest_text},
                    {"category_id", a.category_id},
                    {"category_name", ctx.taxonomy.category_name(a.category_id)},
                    {"source", a.source == taxonomy::CategoryAssignment::Source::Override
                                   ? "manual-override"
                                   : "judge"}});
  }
  write_jsonl(assignments_path(ctx), rows, manifest_header(ctx));
  taxonomy::export_audit(audit_path, store, ctx.taxonomy, manifest_header(ctx));
  record_stage(ctx, "map-taxonomy", input_hash, outputs);
}

void stage_specificity(PipelineContext& ctx) {
  require_stage(ctx, "verify", "specificity");
  require_stage(ctx, "map-taxonomy", "specificity");

  std::vector<fs::path> inputs = {assignments_path(ctx)};
  std::vector<fs::path> outputs;
  for (const config::DatasetConfig& ds : ctx.config.datasets) {
    inputs.push_back(ingested_path(ctx, ds.name));
    for (const std::string& model : ctx.config.models) {
      inputs.push_back(profiles_path(ctx, ds.name, model));
      inputs.push_back(verdicts_path(ctx, ds.name, model));
      outputs.push_back(specificity_path(ctx, ds.name, model));
    }
  }
  const Json params = {{"pool_size", ctx.config.specificity.pool_size},
                       {"test_set_size", ctx.config.specificity.test_set_size},
                       {"evidence_cap", ctx.config.specificity.evidence_cap},
                       {"overlap_mode", ctx.config.specificity.overlap_mode}};
  const std::string input_hash = fingerprint(ctx, params, inputs);
  if (stage_fresh(ctx, "specificity", input_hash, outputs)) return;

  const std::map<std::string, int> assignments = load_assignments(ctx);

  for (const config::DatasetConfig& ds : ctx.config.datasets) {
    const std::vector<InteractionHistory> histories = load_ingested(ctx, ds.name);
    std::map<std::string, std::size_t> history_index;
    for (std::size_t i = 0; i < histories.size(); ++i) {
      history_index[histories[i].user_id] = i;
    }

    // Dataset-wide object corpus and citation associations across all models.
    std::vector<spec::ObjectText> objects;
    std::set<std::string> seen_objects;
    for (const InteractionHistory& history : histories) {
      for (const ClassifiedRecord& rec : history.records) {
        if (seen_objects.insert(rec.record.object_id).second) {
          objects.push_back({rec.record.object_id, rec.record.object_text});
        }
      }
    }
    std::map<std::string, std::set<std::string>> interests_by_object;
    std::map<std::string, std::vector<const elicit::InterestProfile*>> profiles_by_model;
    std::map<std::string, std::vector<elicit::InterestProfile>> profile_storage;
    for (const std::string& model : ctx.config.models) {
      profile_storage[model] = load_profiles(ctx, ds.name, model);
      for (const elicit::InterestProfile& profile : profile_storage[model]) {
        profiles_by_model[model].push_back(&profile);
        for (const elicit::PredictedInterest& interest : profile.interests) {
          for (const std::string& object_id : interest.evidence_ids) {
            interests_by_object[object_id].insert(interest.text);
          }
        }
      }
    }

    const spec::DistractorPool pool = spec::build_pool(
        objects, interests_by_object, ctx.config.specificity.pool_size,
        derive_seed(ctx.config.run_seed, {"pool", ds.name}));

    spec::OverlapFn overlaps =
        ctx.config.specificity.overlap_mode == "judge"
            ? spec::judge_overlap(ctx.judge())
            : spec::category_overlap(assignments);
    if (ctx.config.specificity.overlap_mode == "category") {
      // The unmapped bucket is not a real category; never match on it.
      overlaps = [&assignments](const std::string& a, const std::string& b) {
        auto ia = assignments.find(a);
        auto ib = assignments.find(b);
        if (ia == assignments.end() || ib == assignments.end()) return false;
        if (ia->second == taxonomy::kUnmappedCategoryId ||
            ib->second == taxonomy::kUnmappedCategoryId) {
          return false;
        }
        return ia->second == ib->second;
      };
    }

    for (const std::string& model : ctx.config.models) {
      std::vector<VerdictRow> verdicts = load_verdicts(ctx, ds.name, model);
      std::map<std::string, std::vector<const VerdictRow*>> verdicts_by_user;
      for (const VerdictRow& row : verdicts) {
        verdicts_by_user[row.user].push_back(&row);
      }

      const std::vector<const elicit::InterestProfile*>& profiles =
          profiles_by_model[model];
      std::vector<std::vector<Json>> per_user(profiles.size());
      parallel_for(profiles.size(), ctx.config.workers, [&](std::size_t pi) {
        const elicit::InterestProfile& profile = *profiles[pi];
        std::vector<std::string> user_texts;
        for (const elicit::PredictedInterest& interest : profile.interests) {
          user_texts.push_back(interest.text);
        }
        const spec::DistractorPool pool_u =
            spec::filter_overlap(pool, user_texts, overlaps);
        const std::map<std::string, gr::EvidenceObject> resolver =
            user_resolver(histories[history_index.at(profile.user_id)]);

        auto vit = verdicts_by_user.find(profile.user_id);
        if (vit == verdicts_by_user.end()) return;
        for (const VerdictRow* verdict : vit->second) {
          if (!verdict->verified) continue;  // retrieval runs on verified interests
          Json row = {{"user", verdict->user},
                      {"model", model},
                      {"interest_text", verdict->interest_text}};
          if (verdict->evidence_ids.empty()) {
            row["skipped_reason"] = "no_evidence";
            per_user[pi].push_back(std::move(row));
            continue;
          }
          std::vector<spec::ObjectText> evidence;
          for (const std::string& id : verdict->evidence_ids) {
            const gr::EvidenceObject& obj = resolver.at(id);
            evidence.push_back({obj.object_id, obj.object_text});
          }
          try {
            const spec::SpecificityTestSet test_set = spec::build_test_set(
                verdict->interest_text, evidence, pool_u,
                ctx.config.specificity.test_set_size,
                ctx.config.specificity.evidence_cap, ctx.config.run_seed,
                profile.user_id);
            const spec::SpecificityResult result =
                spec::score_retrieval(test_set, ctx.judge());
            row["correct"] = result.correct;
            row["backing"] = result.backing;
          } catch (const InsufficientPoolError&) {
            row["skipped_reason"] = "insufficient_pool";
          } catch (const JudgeProtocolError&) {
            row["skipped_reason"] = "judge_error";
          } catch (const TransportError&) {
            row["skipped_reason"] = "judge_error";
          }
          per_user[pi].push_back(std::move(row));
        }
      });
      std::vector<Json> rows;
      for (std::vector<Json>& user_rows : per_user) {
        for (Json& row : user_rows) rows.push_back(std::move(row));
      }
      write_jsonl(specificity_path(ctx, ds.name, model), rows, manifest_header(ctx));
    }
  }
  record_stage(ctx, "specificity", input_hash, outputs);
}

void stage_aggregate(PipelineContext& ctx) {
  require_stage(ctx, "verify", "aggregate");
  require_stage(ctx, "map-taxonomy", "aggregate");
  require_stage(ctx, "specificity", "aggregate");

  std::vector<fs::path> inputs = {assignments_path(ctx)};
  std::vector<fs::path> outputs;
  for (const config::DatasetConfig& ds : ctx.config.datasets) {
    for (const std::string& model : ctx.config.models) {
      inputs.push_back(profiles_path(ctx, ds.name, model));
      inputs.push_back(verdicts_path(ctx, ds.name, model));
      inputs.push_back(specificity_path(ctx, ds.name, model));
    }
    outputs.push_back(scores_path(ctx, ds.name));
  }
  const std::string input_hash = fingerprint(ctx, Json::object(), inputs);
  if (stage_fresh(ctx, "aggregate", input_hash, outputs)) return;

  const std::map<std::string, int> assignments = load_assignments(ctx);
  const std::uint64_t ms_hash = agg::model_set_hash(ctx.config.models);

  for (const config::DatasetConfig& ds : ctx.config.datasets) {
    const std::vector<agg::InterestOutcome> outcomes =
        load_outcomes(ctx, ds.name, assignments);
    const std::map<std::string, agg::OracleSet> oracles = agg::build_oracle(outcomes);

    std::map<std::pair<std::string, std::string>, std::vector<agg::InterestOutcome>>
        by_model_user;
    for (const agg::InterestOutcome& outcome : outcomes) {
      by_model_user[{outcome.model, outcome.user_id}].push_back(outcome);
    }

    std::vector<Json> rows;
    for (const std::string& model : ctx.config.models) {
      for (const elicit::InterestProfile& profile :
           load_profiles(ctx, ds.name, model)) {
        const auto key = std::make_pair(model, profile.user_id);
        std::vector<agg::CategoryScore> cat_scores;
        if (auto it = by_model_user.find(key); it != by_model_user.end()) {
          cat_scores = agg::category_scores(it->second);
        }
        static const agg::OracleSet kEmptyOracle;
        const agg::OracleSet* oracle = &kEmptyOracle;
        if (auto oit = oracles.find(profile.user_id); oit != oracles.end()) {
          oracle = &oit->second;
        }
        const agg::UserScores scores =
            agg::user_scores(profile.user_id, model, cat_scores, *oracle);
        rows.push_back({{"user_id", scores.user_id},
                        {"model", scores.model},
                        {"ig_p", scores.ig_p},
                        {"ig_r", scores.ig_r},
                        {"ig_f1", scores.ig_f1},
                        {"is", scores.is},
                        {"n_categories", scores.n_categories},
                        {"oracle_count", scores.oracle_count},
                        {"is_excluded_categories", scores.is_excluded_categories},
                        {"oracle_empty", scores.oracle_empty},
                        {"model_set_hash", hex16(ms_hash)}});
      }
    }
    write_jsonl(scores_path(ctx, ds.name), rows, manifest_header(ctx));
  }
  record_stage(ctx, "aggregate", input_hash, outputs);
}

std::string read_header_value(const fs::path& path, const std::string& key) {
  std::ifstream in(path);
  std::string line;
  if (!std::getline(in, line)) return {};
  const std::string prefix = "# " + key + "=";
  if (line.rfind(prefix, 0) == 0) return line.substr(prefix.size());
  return {};
}

std::vector<agg::UserScores> load_scores(const fs::path& path,
                                         std::string* model_set_hash_out = nullptr) {
  std::vector<agg::UserScores> scores;
  for_each_jsonl(path, [&](const Json& j) {
    agg::UserScores s;
    s.user_id = j.at("user_id").get<std::string>();
    s.model = j.at("model").get<std::string>();
    s.ig_p = j.at("ig_p").get<double>();
    s.ig_r = j.at("ig_r").get<double>();
    s.ig_f1 = j.at("ig_f1").get<double>();
    s.is = j.at("is").get<double>();
    s.n_categories = j.at("n_categories").get<std::size_t>();
    s.oracle_count = j.at("oracle_count").get<std::size_t>();
    s.is_excluded_categories = j.at("is_excluded_categories").get<std::size_t>();
    s.oracle_empty = j.at("oracle_empty").get<bool>();
    if (model_set_hash_out) {
      const std::string h = j.at("model_set_hash").get<std::string>();
      if (model_set_hash_out->empty()) {
        *model_set_hash_out = h;
      } else if (*model_set_hash_out != h) {
        throw Error("score file mixes model-set stamps: " + path.string());
      }
    }
    scores.push_back(std::move(s));
  });
  return scores;
}

void stage_report(PipelineContext& ctx) {
  require_stage(ctx, "aggregate", "report");

  std::vector<fs::path> inputs = {assignments_path(ctx)};
  std::vector<fs::path> outputs;
  for (const config::DatasetConfig& ds : ctx.config.datasets) {
    inputs.push_back(scores_path(ctx, ds.name));
    for (const std::string& model : ctx.config.models) {
      inputs.push_back(verdicts_path(ctx, ds.name, model));
      inputs.push_back(specificity_path(ctx, ds.name, model));
    }
    const fs::path dir = reports_dir(ctx, ds.name);
    for (const char* name : {"summary.txt", "summary.csv", "failure_modes.csv",
                             "user_scores.csv"}) {
      outputs.push_back(dir / name);
    }
  }
  const std::string input_hash = fingerprint(ctx, Json::object(), inputs);
  if (stage_fresh(ctx, "report", input_hash, outputs)) return;

  const std::map<std::string, int> assignments = load_assignments(ctx);

  for (const config::DatasetConfig& ds : ctx.config.datasets) {
    const fs::path score_file = scores_path(ctx, ds.name);
    // Artifacts from another manifest must never be merged into this report.
    const std::string stamped = read_header_value(score_file, "manifest");
    if (stamped != ctx.manifest.identity_hex()) {
      throw Error("score file " + score_file.string() +
                  " was produced under manifest " + stamped +
                  "; refusing to report under " + ctx.manifest.identity_hex());
    }
    std::string ms_hash;
    const std::vector<agg::UserScores> scores = load_scores(score_file, &ms_hash);
    const std::vector<agg::InterestOutcome> outcomes =
        load_outcomes(ctx, ds.name, assignments);
    const agg::RunSummary summary = agg::summarize(scores, outcomes);
    const fs::path dir = reports_dir(ctx, ds.name);
    fs::create_directories(dir);
    const std::string header = "# " + manifest_header(ctx) + "\n";

    {
      std::ostringstream csv;
      csv << header
          << "model,n_users,median_ig_f1,median_is,mean_ig_f1,mean_is\n";
      for (const agg::ModelSummary& row : summary.models) {
        csv << row.model << ',' << row.n_users << ',' << csv_num(row.median_ig_f1)
            << ',' << csv_num(row.median_is) << ',' << csv_num(row.mean_ig_f1)
            << ',' << csv_num(row.mean_is) << '\n';
      }
      write_text_file(dir / "summary.csv", csv.str());
    }
    {
      std::ostringstream txt;
      txt << header;
      char buf[160];
      std::snprintf(buf, sizeof(buf), "%-16s %8s %12s %10s %12s %10s\n", "model",
                    "users", "med IG_F1", "med IS", "mean IG_F1", "mean IS");
      txt << buf;
      for (const agg::ModelSummary& row : summary.models) {
        std::snprintf(buf, sizeof(buf), "%-16s %8zu %12.4f %10.4f %12.4f %10.4f\n",
                      row.model.c_str(), row.n_users, row.median_ig_f1,
                      row.median_is, row.mean_ig_f1, row.mean_is);
        txt << buf;
      }
      txt << "model_set_hash=" << ms_hash << "\n";
      write_text_file(dir / "summary.txt", txt.str());
    }
    {
      std::ostringstream csv;
      csv << header
          << "model,unverified_interests,pct_insufficient_implicit,"
             "pct_insufficient_explicit,pct_excessive_negative\n";
      for (const agg::ModelSummary& row : summary.models) {
        csv << row.model << ',' << row.unverified_interests << ','
            << csv_num(row.pct_insufficient_implicit) << ','
            << csv_num(row.pct_insufficient_explicit) << ','
            << csv_num(row.pct_excessive_negative) << '\n';
      }
      write_text_file(dir / "failure_modes.csv", csv.str());
    }
    {
      std::ostringstream csv;
      csv << header
          << "user_id,model,ig_p,ig_r,ig_f1,is,n_categories,oracle_count,"
             "oracle_empty\n";
      for (const agg::UserScores& s : scores) {
        csv << s.user_id << ',' << s.model << ',' << csv_num(s.ig_p) << ','
            << csv_num(s.ig_r) << ',' << csv_num(s.ig_f1) << ',' << csv_num(s.is)
            << ',' << s.n_categories << ',' << s.oracle_count << ','
            << (s.oracle_empty ? 1 : 0) << '\n';
      }
      write_text_file(dir / "user_scores.csv", csv.str());
    }
    if (ctx.config.models.size() >= 2) {
      const std::map<std::string, agg::OracleSet> oracles =
          agg::build_oracle(outcomes);
      const agg::OracleStability stability = agg::oracle_stability(oracles);
      {
        std::ostringstream csv;
        csv << header << "models_verifying,count\n";
        for (const auto& [k, count] : stability.exactly_k) {
          csv << k << ',' << count << '\n';
        }
        csv << "total," << stability.total_pairs << '\n';
        write_text_file(dir / "oracle_histogram.csv", csv.str());
      }
      {
        std::ostringstream csv;
        csv << header << "model,verified_pairs,sole_provider_pairs,sole_share_pct\n";
        for (const agg::OracleStability::ModelRow& row : stability.rows) {
          csv << row.model << ',' << row.verified_pairs << ','
              << row.sole_provider_pairs << ',' << csv_num(row.sole_share_pct)
              << '\n';
        }
        write_text_file(dir / "oracle_leave_one_out.csv", csv.str());
      }
    }
  }
  record_stage(ctx, "report", input_hash, outputs);
}

void stage_synth(PipelineContext& ctx) {
  if (!ctx.config.synth) throw ConfigError("synth needs a synth config block");
  require_stage(ctx, "ingest", "synth");
  const config::SynthConfig& sc = *ctx.config.synth;

  const fs::path users_path = ctx.out() / "synth" / "users.jsonl";
  const fs::path validation_path =
      ctx.out() / "reports" / "distribution_validation.csv";
  const std::vector<fs::path> inputs = {sc.user_clusters_path,
                                        ingested_path(ctx, sc.source_dataset)};
  const std::vector<fs::path> outputs = {users_path, validation_path};
  const Json params = {{"cluster_count", sc.cluster_count},
                       {"min_cohort_size", sc.min_cohort_size},
                       {"max_cohorts", sc.max_cohorts},
                       {"sample_size", sc.sample_size}};
  const std::string input_hash = fingerprint(ctx, params, inputs);
  if (stage_fresh(ctx, "synth", input_hash, outputs)) return;

  std::map<std::string, std::set<std::string>> user_clusters;
  for_each_jsonl(sc.user_clusters_path, [&](const Json& j) {
    const auto clusters = j.at("clusters").get<std::vector<std::string>>();
    user_clusters[j.at("user_id").get<std::string>()] = {clusters.begin(),
                                                         clusters.end()};
  });

  const std::vector<InteractionHistory> histories =
      load_ingested(ctx, sc.source_dataset);
  std::map<std::string, InteractionHistory> by_user;
  for (const InteractionHistory& history : histories) {
    by_user[history.user_id] = history;
  }

  const std::vector<synth::Cohort> cohorts = synth::form_cohorts(
      user_clusters, sc.cluster_count, sc.min_cohort_size, sc.max_cohorts,
      derive_seed(ctx.config.run_seed, {"cohorts"}));

  std::vector<Json> rows;
  std::vector<synth::ClassCountsPerUser> synth_counts;
  std::size_t skipped_small = 0;
  for (const synth::Cohort& cohort : cohorts) {
    synth::SyntheticUser user;
    try {
      user = synth::synthesize_user(
          cohort, by_user, sc.sample_size,
          derive_seed(ctx.config.run_seed, {"synth", cohort.cohort_id}),
          sc.redaction_terms);
    } catch (const PoolTooSmallError&) {
      ++skipped_small;
      continue;
    }
    synth::ClassCountsPerUser counts{};
    for (const synth::SyntheticEngagement& e : user.engagements) {
      rows.push_back({{"user_mock_id", user.user_mock_id},
                      {"object_text", e.object_text},
                      {"interaction_type", e.interaction_label}});
      counts[static_cast<std::size_t>(e.cls)] += 1.0;
    }
    synth_counts.push_back(counts);
  }
  write_jsonl(users_path, rows, manifest_header(ctx));

  std::vector<synth::ClassCountsPerUser> ref_counts;
  for (const InteractionHistory& history : histories) {
    synth::ClassCountsPerUser counts{};
    for (const ClassifiedRecord& rec : history.records) {
      counts[static_cast<std::size_t>(rec.cls)] += 1.0;
    }
    ref_counts.push_back(counts);
  }

  std::ostringstream csv;
  csv << "# " << manifest_header(ctx) << "\n"
      << "action_type,t_stat,p_value,mean_synth,mean_ref\n";
  if (synth_counts.size() >= 2 && ref_counts.size() >= 2) {
    const synth::DistributionReport report =
        synth::validate_distributions(synth_counts, ref_counts);
    for (const synth::ClassComparisonRow& row : report.rows) {
      csv << to_string(row.cls) << ',' << csv_num(row.t_stat) << ','
          << csv_num(row.p_value) << ',' << csv_num(row.mean_synth) << ','
          << csv_num(row.mean_ref) << '\n';
    }
    csv << "ordering_preserved," << (report.ordering_preserved ? 1 : 0) << ",,,\n";
  } else {
    csv << "insufficient_samples,,,,\n";
  }
  if (skipped_small > 0) {
    csv << "cohorts_skipped_pool_too_small," << skipped_small << ",,,\n";
  }
  write_text_file(validation_path, csv.str());
  record_stage(ctx, "synth", input_hash, outputs);
}

void stage_sweep(PipelineContext& ctx) {
  if (!ctx.config.sim) throw ConfigError("sweep needs a sim config block");

  const fs::path sweep_csv = ctx.out() / "reports" / "window_sweep.csv";
  const Json params = {{"windows", ctx.config.sweep_windows}};
  const std::string input_hash = fingerprint(ctx, params, {});
  if (stage_fresh(ctx, "sweep", input_hash, {sweep_csv})) return;

  std::ostringstream csv;
  csv << "# " << manifest_header(ctx) << "\n"
      << "window,model,median_ig_p,median_ig_r,median_ig_f1,median_is,"
         "median_interests\n";

  for (std::size_t window : ctx.config.sweep_windows) {
    config::RunConfig child_config = ctx.config;
    child_config.window = window;
    child_config.out_dir = ctx.out() / "sweep" / ("w" + std::to_string(window));
    child_config.responses_dir = child_config.out_dir / "responses";
    child_config.taxonomy_cache = child_config.out_dir / "taxonomy" / "cache.tsv";
    child_config.judge.cache_dir = child_config.out_dir / ".judge_cache";
    for (config::DatasetConfig& ds : child_config.datasets) {
      if (ds.name == "sim") {
        ds.records_path = child_config.out_dir / "sim" / "records.jsonl";
      }
    }
    PipelineContext child = make_context(child_config);
    run_all(child);

    for (const config::DatasetConfig& ds : child_config.datasets) {
      const std::vector<agg::UserScores> scores =
          load_scores(scores_path(child, ds.name));
      std::map<std::string, std::vector<const agg::UserScores*>> by_model;
      for (const agg::UserScores& s : scores) by_model[s.model].push_back(&s);
      for (const std::string& model : child_config.models) {
        std::vector<double> p, r, f1, is;
        for (const agg::UserScores* s : by_model[model]) {
          p.push_back(s->ig_p);
          r.push_back(s->ig_r);
          f1.push_back(s->ig_f1);
          is.push_back(s->is);
        }
        std::vector<double> interest_counts;
        for (const elicit::InterestProfile& profile :
             load_profiles(child, ds.name, model)) {
          interest_counts.push_back(static_cast<double>(profile.interests.size()));
        }
        if (p.empty()) continue;
        csv << window << ',' << model << ',' << csv_num(stats::median(p)) << ','
            << csv_num(stats::median(r)) << ',' << csv_num(stats::median(f1)) << ','
            << csv_num(stats::median(is)) << ','
            << csv_num(stats::median(interest_counts)) << '\n';
      }
    }
  }
  write_text_file(sweep_csv, csv.str());
  record_stage(ctx, "sweep", input_hash, {sweep_csv});
}

}  // namespace

const std::vector<std::string>& stage_names() {
  static const std::vector<std::string> names = {
      "simulate", "ingest",      "synth",  "elicit", "verify",
      "map-taxonomy", "specificity", "aggregate", "report", "sweep"};
  return names;
}

PipelineContext make_context(config::RunConfig config) {
  std::unique_ptr<judge::Judge> judge_impl;
  std::shared_ptr<judge::Transport> transport;
  if (config.judge.mode == "mock") {
    judge_impl = std::make_unique<judge::MockJudge>();
  } else {
    transport = std::make_shared<judge::HttpTransport>();
    judge_impl = std::make_unique<judge::RemoteJudge>(
        config.judge.model_id, transport, config.judge.cache_dir,
        config.judge.max_tokens);
  }
  return make_context(std::move(config), std::move(judge_impl), std::move(transport));
}

PipelineContext make_context(config::RunConfig config,
                             std::unique_ptr<judge::Judge> judge,
                             std::shared_ptr<judge::Transport> transport) {
  config::validate(config);
  PipelineContext ctx;
  ctx.config = std::move(config);
  ctx.taxonomy = taxonomy::Taxonomy::load(ctx.config.taxonomy_path);
  ctx.judge_impl = std::move(judge);
  ctx.transport = std::move(transport);

  manifest::Manifest m;
  m.run_seed = ctx.config.run_seed;
  m.hash_name = kHashName;
  m.config_hash = hex16(ctx.config.config_hash);
  for (const config::DatasetConfig& ds : ctx.config.datasets) {
    m.datasets.push_back(ds.name);
  }
  m.models = ctx.config.models;
  m.judge_id = ctx.judge_impl->id();
  m.taxonomy_hash = hex16(ctx.taxonomy.content_hash());
  m.prompt_template_hash = hex16(judge::prompt_template_hash());
  m.model_set_hash = hex16(agg::model_set_hash(ctx.config.models));

  // Resume from an existing manifest only when the identity still matches.
  if (fs::exists(ctx.manifest_path())) {
    manifest::Manifest previous = manifest::Manifest::load(ctx.manifest_path());
    if (previous.identity_hex() == m.identity_hex()) {
      m.stages = std::move(previous.stages);
    }
  }
  ctx.manifest = std::move(m);
  fs::create_directories(ctx.out());
  ctx.manifest.save(ctx.manifest_path());
  return ctx;
}

void run_stage(PipelineContext& ctx, const std::string& stage) {
  if (stage == "simulate") return stage_simulate(ctx);
  if (stage == "ingest") return stage_ingest(ctx);
  if (stage == "synth") return stage_synth(ctx);
  if (stage == "elicit") return stage_elicit(ctx);
  if (stage == "verify") return stage_verify(ctx);
  if (stage == "map-taxonomy") return stage_map_taxonomy(ctx);
  if (stage == "specificity") return stage_specificity(ctx);
  if (stage == "aggregate") return stage_aggregate(ctx);
  if (stage == "report") return stage_report(ctx);
  if (stage == "sweep") return stage_sweep(ctx);
  throw ConfigError("unknown stage '" + stage + "'");
}

void run_all(PipelineContext& ctx) {
  if (ctx.config.sim) run_stage(ctx, "simulate");
  for (const char* stage : {"ingest", "elicit", "verify", "map-taxonomy",
                            "specificity", "aggregate", "report"}) {
    run_stage(ctx, stage);
  }
}

void compare_score_files(const std::filesystem::path& a,
                         const std::filesystem::path& b,
                         const std::filesystem::path& out_csv) {
  std::string hash_a, hash_b;
  const std::vector<agg::UserScores> scores_a = load_scores(a, &hash_a);
  const std::vector<agg::UserScores> scores_b = load_scores(b, &hash_b);
  if (hash_a != hash_b) {
    throw Error("refusing comparison: score files carry different model-set "
                "stamps (" + hash_a + " vs " + hash_b +
                "); recall oracles are not comparable across model sets");
  }
  const std::string manifest_a = read_header_value(a, "manifest");
  const std::string manifest_b = read_header_value(b, "manifest");
  // Same model set but different run identities: precision and specificity
  // stay comparable, recall does not (different oracle contents).
  const bool include_recall = manifest_a == manifest_b;

  auto medians = [](const std::vector<agg::UserScores>& scores) {
    std::map<std::string, std::array<std::vector<double>, 4>> acc;
    for (const agg::UserScores& s : scores) {
      acc[s.model][0].push_back(s.ig_p);
      acc[s.model][1].push_back(s.ig_r);
      acc[s.model][2].push_back(s.ig_f1);
      acc[s.model][3].push_back(s.is);
    }
    return acc;
  };
  auto acc_a = medians(scores_a);
  auto acc_b = medians(scores_b);

  std::ostringstream csv;
  csv << "model,median_ig_p_a,median_ig_p_b";
  if (include_recall) csv << ",median_ig_r_a,median_ig_r_b,median_ig_f1_a,median_ig_f1_b";
  csv << ",median_is_a,median_is_b\n";
  for (const auto& [model, columns_a] : acc_a) {
    auto it = acc_b.find(model);
    if (it == acc_b.end()) continue;
    csv << model << ',' << csv_num(stats::median(columns_a[0])) << ','
        << csv_num(stats::median(it->second[0]));
    if (include_recall) {
      csv << ',' << csv_num(stats::median(columns_a[1])) << ','
          << csv_num(stats::median(it->second[1])) << ','
          << csv_num(stats::median(columns_a[2])) << ','
          << csv_num(stats::median(it->second[2]));
    }
    csv << ',' << csv_num(stats::median(columns_a[3])) << ','
        << csv_num(stats::median(it->second[3])) << '\n';
  }
  if (!include_recall) {
    csv << "# recall columns omitted: different run manifests (" << manifest_a
        << " vs " << manifest_b << ")\n";
  }
  write_text_file(out_csv, csv.str());
}

}  // namespace gist::pipeline
