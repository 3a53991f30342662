#include "gist/manifest.hpp"

#include "gist/errors.hpp"
#include "gist/hash.hpp"
#include "gist/io.hpp"

namespace gist::manifest {

std::uint64_t Manifest::identity_hash() const {
  std::uint64_t h = fnv1a64_u64(run_seed);
  auto mix = [&h](const std::string& s) {
    h = fnv1a64_u64(s.size(), h);
    h = fnv1a64(s, h);
  };
  mix(hash_name);
  mix(config_hash);
  for (const std::string& d : datasets) mix(d);
  for (const std::string& m : models) mix(m);
  mix(judge_id);
  mix(taxonomy_hash);
  mix(prompt_template_hash);
  mix(model_set_hash);
  return h;
}

std::string Manifest::identity_hex() const { return hex16(identity_hash()); }

Manifest Manifest::load(const std::filesystem::path& path) {
  Json j = Json::parse(read_text_file(path), nullptr, false);
  if (j.is_discarded()) throw Error("malformed manifest " + path.string());

  Manifest m;
  m.run_seed = j.at("run_seed").get<std::uint64_t>();
  m.hash_name = j.value("hash_name", "");
  m.config_hash = j.value("config_hash", "");
  m.datasets = j.value("datasets", std::vector<std::string>{});
  m.models = j.value("models", std::vector<std::string>{});
  m.judge_id = j.value("judge_id", "");
  m.taxonomy_hash = j.value("taxonomy_hash", "");
  m.prompt_template_hash = j.value("prompt_template_hash", "");
  m.model_set_hash = j.value("model_set_hash", "");
  for (const auto& [name, sj] : j.value("stages", Json::object()).items()) {
    StageRecord record;
    record.input_hash = sj.value("input_hash", "");
    record.completed = sj.value("completed", false);
    record.outputs = sj.value("outputs", std::vector<std::string>{});
    m.stages[name] = std::move(record);
  }
  return m;
}

void Manifest::save(const std::filesystem::path& path) const {
  Json stages_json = Json::object();
  for (const auto& [name, record] : stages) {
    stages_json[name] = {{"input_hash", record.input_hash},
                         {"completed", record.completed},
                         {"outputs", record.outputs}};
  }
  Json j = {
      {"run_seed", run_seed},
      {"hash_name", hash_name},
      {"config_hash", config_hash},
      {"datasets", datasets},
      {"models", models},
      {"judge_id", judge_id},
      {"taxonomy_hash", taxonomy_hash},
      {"prompt_template_hash", prompt_template_hash},
      {"model_set_hash", model_set_hash},
      {"identity", identity_hex()},
      {"stages", stages_json},
  };
  write_text_file(path, j.dump(2) + "\n");
}

}  // namespace gist::manifest
