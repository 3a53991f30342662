#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace gist::manifest {

struct StageRecord {
  std::string input_hash;  // hex of the stage's input fingerprint
  bool completed = false;
  std::vector<std::string> outputs;
};

// Identifies a run: seed, config, model set, judge, taxonomy, and prompt
// templates. Any change to these changes the identity hash, and artifacts
// stamped with different identities are never merged or compared.
struct Manifest {
  std::uint64_t run_seed = 0;
  std::string hash_name;  // the stable hash in use ("fnv1a64")
  std::string config_hash;
  std::vector<std::string> datasets;
  std::vector<std::string> models;
  std::string judge_id;
  std::string taxonomy_hash;
  std::string prompt_template_hash;
  std::string model_set_hash;
  std::map<std::string, StageRecord> stages;

  std::uint64_t identity_hash() const;
  std::string identity_hex() const;

  static Manifest load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;
};

}  // namespace gist::manifest
