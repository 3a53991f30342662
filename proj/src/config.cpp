#include "gist/config.hpp"

#include "gist/errors.hpp"
#include "gist/hash.hpp"
#include "gist/io.hpp"
#include "gist/taxonomy.hpp"

#include <algorithm>
#include <set>

namespace gist::config {

namespace {

EngagementClass class_from_json(const Json& j, const std::string& context) {
  std::optional<EngagementClass> cls =
      engagement_class_from(j.get<std::string>());
  if (!cls) throw ConfigError(context + ": unknown engagement class");
  return *cls;
}

std::vector<ingest::SignalRule> rules_from_json(const Json& j,
                                                const std::string& dataset) {
  std::vector<ingest::SignalRule> rules;
  for (const Json& rj : j) {
    ingest::SignalRule rule;
    rule.cls = class_from_json(rj.at("class"), dataset);
    if (rj.contains("action")) {
      rule.action = rj.at("action").get<std::string>();
    } else if (rj.contains("watch_min")) {
      ingest::SignalRule::Interval interval;
      interval.lo = rj.at("watch_min").get<double>();
      interval.lo_exclusive = rj.value("min_exclusive", false);
      if (rj.contains("watch_max")) {
        interval.hi = rj.at("watch_max").get<double>();
        interval.hi_exclusive = rj.value("max_exclusive", false);
      } else {
        interval.hi_unbounded = true;
      }
      rule.watch = interval;
    } else if (rj.contains("ratings")) {
      rule.ratings = rj.at("ratings").get<std::vector<int>>();
    } else {
      throw ConfigError("mapping rule for '" + dataset +
                        "' needs action, watch_min, or ratings");
    }
    rules.push_back(std::move(rule));
  }
  return rules;
}

gr::VerificationConfig verification_from_json(const Json& j,
                                              const std::string& dataset) {
  gr::VerificationConfig v;
  v.dataset = dataset;
  if (j.is_null()) return v;
  v.min_exp_pos = j.value("min_exp_pos", v.min_exp_pos);
  v.min_imp_pos = j.value("min_imp_pos", v.min_imp_pos);
  v.hybrid_exp = j.value("hybrid_exp", v.hybrid_exp);
  v.hybrid_imp = j.value("hybrid_imp", v.hybrid_imp);
  v.max_imp_neg = j.value("max_imp_neg", v.max_imp_neg);
  v.max_exp_neg = j.value("max_exp_neg", v.max_exp_neg);
  return v;
}

}  // namespace

const DatasetConfig* RunConfig::dataset(const std::string& name) const {
  for (const DatasetConfig& d : datasets) {
    if (d.name == name) return &d;
  }
  return nullptr;
}

RunConfig load_config(const std::filesystem::path& path) {
  return parse_config(read_text_file(path));
}

RunConfig parse_config(const std::string& content) {
  Json j = Json::parse(content, nullptr, false);
  if (j.is_discarded()) throw ConfigError("configuration is not valid JSON");

  RunConfig config;
  config.config_hash = fnv1a64(content);
  config.run_seed = j.value("run_seed", config.run_seed);
  config.out_dir = j.value("out_dir", config.out_dir.string());
  config.window = j.value("window", config.window);
  config.max_users = j.value("max_users", config.max_users);
  config.workers = j.value("workers", config.workers);
  config.generation_mode = j.value("generation_mode", config.generation_mode);
  if (j.contains("models")) {
    config.models = j.at("models").get<std::vector<std::string>>();
  }
  if (j.contains("sweep_windows")) {
    config.sweep_windows = j.at("sweep_windows").get<std::vector<std::size_t>>();
  }

  if (j.contains("judge")) {
    const Json& jj = j.at("judge");
    config.judge.mode = jj.value("mode", config.judge.mode);
    config.judge.model_id = jj.value("model_id", config.judge.model_id);
    config.judge.max_tokens = jj.value("max_tokens", config.judge.max_tokens);
    config.judge.batch_size = jj.value("batch_size", config.judge.batch_size);
    if (jj.contains("cache_dir")) {
      config.judge.cache_dir = jj.at("cache_dir").get<std::string>();
    }
  }
  if (config.judge.cache_dir.empty()) {
    config.judge.cache_dir = config.out_dir / ".judge_cache";
  }

  for (const Json& dj : j.value("datasets", Json::array())) {
    DatasetConfig d;
    d.name = dj.at("name").get<std::string>();
    d.records_path = dj.value("records", std::string{});
    d.verification = verification_from_json(dj.value("verification", Json()), d.name);
    if (dj.contains("mapping") && dj.at("mapping").contains("rules")) {
      d.mapping_rules = rules_from_json(dj.at("mapping").at("rules"), d.name);
    }
    config.datasets.push_back(std::move(d));
  }

  if (j.contains("specificity")) {
    const Json& sj = j.at("specificity");
    config.specificity.pool_size = sj.value("pool_size", config.specificity.pool_size);
    config.specificity.test_set_size =
        sj.value("test_set_size", config.specificity.test_set_size);
    config.specificity.evidence_cap =
        sj.value("evidence_cap", config.specificity.evidence_cap);
    config.specificity.overlap_mode =
        sj.value("overlap_mode", config.specificity.overlap_mode);
  }

  if (j.contains("sim")) {
    const Json& sj = j.at("sim");
    SimConfig sim;
    sim.users = sj.value("users", sim.users);
    sim.true_interests = sj.value("true_interests", sim.true_interests);
    sim.noise.history_length = sj.value("history_length", sim.noise.history_length);
    sim.noise.negative_rate = sj.value("negative_rate", sim.noise.negative_rate);
    sim.noise.explicit_negative_rate =
        sj.value("explicit_negative_rate", sim.noise.explicit_negative_rate);
    sim.noise.explicit_positive_rate =
        sj.value("explicit_positive_rate", sim.noise.explicit_positive_rate);
    sim.noise.exp_pos_per_interest =
        sj.value("exp_pos_per_interest", sim.noise.exp_pos_per_interest);
    sim.noise.imp_pos_per_interest =
        sj.value("imp_pos_per_interest", sim.noise.imp_pos_per_interest);
    sim.conservative_keep = sj.value("conservative_keep", sim.conservative_keep);
    sim.hallucinating_extra = sj.value("hallucinating_extra", sim.hallucinating_extra);
    config.sim = sim;
  }

  if (j.contains("synth")) {
    const Json& sj = j.at("synth");
    SynthConfig synth;
    synth.user_clusters_path = sj.at("user_clusters").get<std::string>();
    synth.source_dataset = sj.at("source_dataset").get<std::string>();
    synth.cluster_count = sj.value("cluster_count", synth.cluster_count);
    synth.min_cohort_size = sj.value("min_cohort_size", synth.min_cohort_size);
    synth.max_cohorts = sj.value("max_cohorts", synth.max_cohorts);
    synth.sample_size = sj.value("sample_size", synth.sample_size);
    if (sj.contains("redaction_terms")) {
      synth.redaction_terms = sj.at("redaction_terms").get<std::vector<std::string>>();
    }
    config.synth = synth;
  }

  if (j.contains("taxonomy")) {
    const Json& tj = j.at("taxonomy");
    if (tj.contains("file")) config.taxonomy_path = tj.at("file").get<std::string>();
    if (tj.contains("cache")) config.taxonomy_cache = tj.at("cache").get<std::string>();
    if (tj.contains("overrides")) {
      config.overrides_path = tj.at("overrides").get<std::string>();
    }
  }
  if (config.taxonomy_path.empty()) {
    config.taxonomy_path = taxonomy::Taxonomy::default_path();
  }
  if (config.taxonomy_cache.empty()) {
    config.taxonomy_cache = config.out_dir / "taxonomy" / "cache.tsv";
  }
  config.responses_dir = j.value("responses_dir", (config.out_dir / "responses").string());

  validate(config);
  return config;
}

void validate(const RunConfig& config) {
  if (config.models.empty()) throw ConfigError("config needs at least one model");
  if (config.datasets.empty()) throw ConfigError("config needs at least one dataset");
  if (config.window == 0) throw ConfigError("window must be >= 1");
  if (config.generation_mode != "files" && config.generation_mode != "remote") {
    throw ConfigError("generation_mode must be files or remote");
  }
  if (config.judge.mode != "mock" && config.judge.mode != "remote") {
    throw ConfigError("judge mode must be mock or remote");
  }
  if (config.specificity.overlap_mode != "category" &&
      config.specificity.overlap_mode != "judge") {
    throw ConfigError("overlap_mode must be category or judge");
  }
  if (config.specificity.test_set_size == 0 || config.specificity.evidence_cap == 0) {
    throw ConfigError("specificity sizes must be >= 1");
  }

  std::set<std::string> model_set;
  for (const std::string& model : config.models) {
    if (!model_set.insert(model).second) {
      throw ConfigError("duplicate model id '" + model + "'");
    }
    // The judge must remain distinct from every evaluated model.
    if (model == config.judge.model_id) {
      throw ConfigError("judge model '" + model +
                        "' must differ from every evaluated model");
    }
  }

  std::set<std::string> dataset_names;
  for (const DatasetConfig& d : config.datasets) {
    if (!dataset_names.insert(d.name).second) {
      throw ConfigError("duplicate dataset '" + d.name + "'");
    }
    d.verification.validate();
  }

  if (config.sim && !config.dataset("sim")) {
    throw ConfigError("sim runs need a dataset entry named 'sim'");
  }
  if (config.sim) {
    const SimConfig& sim = *config.sim;
    if (sim.conservative_keep < 0.0 || sim.conservative_keep > 1.0) {
      throw ConfigError("conservative_keep must be in [0,1]");
    }
    if (sim.hallucinating_extra < 0) {
      throw ConfigError("hallucinating_extra must be >= 0");
    }
  }
}

ingest::MappingRegistry build_registry(const RunConfig& config) {
  ingest::MappingRegistry registry = ingest::MappingRegistry::with_defaults();
  for (const DatasetConfig& d : config.datasets) {
    if (d.mapping_rules) {
      registry.add(ingest::SignalMapping(d.name, *d.mapping_rules));
    } else if (!registry.has(d.name)) {
      throw ConfigError("dataset '" + d.name +
                        "' has no built-in mapping; provide mapping.rules");
    }
  }
  return registry;
}

}  // namespace gist::config
