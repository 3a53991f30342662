#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "gist/groundedness.hpp"
#include "gist/specificity.hpp"

namespace gist::agg {

// One interest after Stage 1 + Stage 2: verdict joined with its category
// assignment and (when scored) its specificity counts.
struct InterestOutcome {
  std::string user_id;
  std::string model;
  std::string interest_text;  // normalized
  bool verified = false;
  std::vector<gr::FailureMode> failure_modes;
  int category_id = 0;
  std::optional<spec::SpecificityResult> specificity;
};

struct CategoryScore {
  int category_id = 0;
  double groundedness = 0.0;             // verified / interests in the category
  std::optional<double> specificity;     // sum(correct) / sum(backing), when scored
  int n_interests = 0;
  int n_verified = 0;
};

// Groups one (user, model)'s interests by category. Interests without a
// specificity result contribute to neither side of the specificity ratio.
std::vector<CategoryScore> category_scores(std::span<const InterestOutcome> outcomes);

// Per-user union of categories verified by any model, with the verifying
// model list per category.
struct OracleSet {
  std::string user_id;
  std::map<int, std::set<std::string>> verifying_models;  // category -> models

  std::size_t size() const { return verifying_models.size(); }
};

std::map<std::string, OracleSet> build_oracle(std::span<const InterestOutcome> outcomes);

struct UserScores {
  std::string user_id;
  std::string model;
  double ig_p = 0.0;
  double ig_r = 0.0;
  double ig_f1 = 0.0;
  double is = 0.0;
  std::size_t n_categories = 0;      // |C_u|
  std::size_t oracle_count = 0;
  std::size_t is_excluded_categories = 0;  // verified but never specificity-scored
  bool oracle_empty = false;         // flagged: recall forced to 0
};

// IG_P = sum(G_c)/|C_u|, IG_R = sum(G_c)/Oracle_u, IG_F1 their harmonic mean,
// IS = mean(S_c) over verified categories with a specificity ratio.
// Empty denominators score 0.
UserScores user_scores(const std::string& user_id, const std::string& model,
                       std::span<const CategoryScore> scores, const OracleSet& oracle);

struct ModelSummary {
  std::string model;
  std::size_t n_users = 0;
  double median_ig_f1 = 0.0;
  double median_is = 0.0;
  double mean_ig_f1 = 0.0;
  double mean_is = 0.0;
  // Failure-mode shares among unverified interests; non-exclusive, so the
  // percentages may sum past 100.
  std::size_t unverified_interests = 0;
  double pct_insufficient_implicit = 0.0;
  double pct_insufficient_explicit = 0.0;
  double pct_excessive_negative = 0.0;
};

struct RunSummary {
  std::vector<ModelSummary> models;  // ordered by model id
};

RunSummary summarize(std::span<const UserScores> scores,
                     std::span<const InterestOutcome> outcomes);

// Oracle-stability analyses over (user, category) oracle pairs.
struct OracleStability {
  std::map<std::size_t, std::size_t> exactly_k;  // #verifying models -> pair count
  struct ModelRow {
    std::string model;
    std::size_t verified_pairs = 0;
    std::size_t sole_provider_pairs = 0;
    double sole_share_pct = 0.0;  // sole pairs / total oracle pairs
  };
  std::vector<ModelRow> rows;  // ordered by model id
  std::size_t total_pairs = 0;
};

// Requires >= 2 models across the oracle sets.
OracleStability oracle_stability(const std::map<std::string, OracleSet>& oracles);

// The model set a recall score depends on; score files carry this stamp and
// reports refuse to compare IG_R across different stamps.
std::uint64_t model_set_hash(std::span<const std::string> models);

}  // namespace gist::agg
