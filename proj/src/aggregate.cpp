#include "gist/aggregate.hpp"

#include "gist/errors.hpp"
#include "gist/hash.hpp"
#include "gist/stats.hpp"

#include <algorithm>

namespace gist::agg {

std::vector<CategoryScore> category_scores(std::span<const InterestOutcome> outcomes) {
  struct Accumulator {
    int n_interests = 0;
    int n_verified = 0;
    long correct = 0;
    long backing = 0;
    bool any_specificity = false;
  };
  std::map<int, Accumulator> by_category;
  for (const InterestOutcome& outcome : outcomes) {
    Accumulator& acc = by_category[outcome.category_id];
    ++acc.n_interests;
    if (outcome.verified) ++acc.n_verified;
    if (outcome.specificity) {
      acc.any_specificity = true;
      acc.correct += outcome.specificity->correct;
      acc.backing += outcome.specificity->backing;
    }
  }

  std::vector<CategoryScore> scores;
  scores.reserve(by_category.size());
  for (const auto& [category_id, acc] : by_category) {
    CategoryScore score;
    score.category_id = category_id;
    score.n_interests = acc.n_interests;
    score.n_verified = acc.n_verified;
    score.groundedness =
        static_cast<double>(acc.n_verified) / static_cast<double>(acc.n_interests);
    if (acc.any_specificity && acc.backing > 0) {
      score.specificity =
          static_cast<double>(acc.correct) / static_cast<double>(acc.backing);
    }
    scores.push_back(score);
  }
  return scores;
}

std::map<std::string, OracleSet> build_oracle(std::span<const InterestOutcome> outcomes) {
  std::map<std::string, OracleSet> oracles;
  for (const InterestOutcome& outcome : outcomes) {
    OracleSet& oracle = oracles[outcome.user_id];
    oracle.user_id = outcome.user_id;
    if (outcome.verified) {
      oracle.verifying_models[outcome.category_id].insert(outcome.model);
    }
  }
  return oracles;
}

UserScores user_scores(const std::string& user_id, const std::string& model,
                       std::span<const CategoryScore> scores, const OracleSet& oracle) {
  UserScores out;
  out.user_id = user_id;
  out.model = model;
  out.n_categories = scores.size();
  out.oracle_count = oracle.size();
  out.oracle_empty = oracle.size() == 0;

  double sum_g = 0.0;
  double sum_s = 0.0;
  std::size_t n_s = 0;
  for (const CategoryScore& score : scores) {
    sum_g += score.groundedness;
    if (score.groundedness > 0.0) {
      if (score.specificity) {
        sum_s += *score.specificity;
        ++n_s;
      } else {
        ++out.is_excluded_categories;
      }
    }
  }
  if (out.n_categories > 0) out.ig_p = sum_g / static_cast<double>(out.n_categories);
  if (out.oracle_count > 0) out.ig_r = sum_g / static_cast<double>(out.oracle_count);
  if (out.ig_p + out.ig_r > 0.0) {
    out.ig_f1 = 2.0 * out.ig_p * out.ig_r / (out.ig_p + out.ig_r);
  }
  if (n_s > 0) out.is = sum_s / static_cast<double>(n_s);
  return out;
}

RunSummary summarize(std::span<const UserScores> scores,
                     std::span<const InterestOutcome> outcomes) {
  if (scores.empty()) throw Error("summarize needs at least one scored user");

  std::map<std::string, std::vector<const UserScores*>> by_model;
  for (const UserScores& score : scores) by_model[score.model].push_back(&score);

  struct ModeTally {
    std::size_t unverified = 0;
    std::size_t ins_imp = 0;
    std::size_t ins_exp = 0;
    std::size_t exc_neg = 0;
  };
  std::map<std::string, ModeTally> tallies;
  for (const InterestOutcome& outcome : outcomes) {
    if (outcome.verified) continue;
    ModeTally& tally = tallies[outcome.model];
    ++tally.unverified;
    for (gr::FailureMode mode : outcome.failure_modes) {
      switch (mode) {
        case gr::FailureMode::InsufficientImplicitPositive: ++tally.ins_imp; break;
        case gr::FailureMode::InsufficientExplicitPositive: ++tally.ins_exp; break;
        case gr::FailureMode::ExcessiveNegative: ++tally.exc_neg; break;
      }
    }
  }

  RunSummary summary;
  for (const auto& [model, model_scores] : by_model) {
    ModelSummary row;
    row.model = model;
    row.n_users = model_scores.size();
    std::vector<double> f1s, iss;
    f1s.reserve(model_scores.size());
    iss.reserve(model_scores.size());
    for (const UserScores* s : model_scores) {
      f1s.push_back(s->ig_f1);
      iss.push_back(s->is);
    }
    row.median_ig_f1 = stats::median(f1s);
    row.median_is = stats::median(iss);
    row.mean_ig_f1 = stats::mean(f1s);
    row.mean_is = stats::mean(iss);
    if (auto it = tallies.find(model); it != tallies.end() && it->second.unverified > 0) {
      const double n = static_cast<double>(it->second.unverified);
      row.unverified_interests = it->second.unverified;
      row.pct_insufficient_implicit = 100.0 * static_cast<double>(it->second.ins_imp) / n;
      row.pct_insufficient_explicit = 100.0 * static_cast<double>(it->second.ins_exp) / n;
      row.pct_excessive_negative = 100.0 * static_cast<double>(it->second.exc_neg) / n;
    }
    summary.models.push_back(std::move(row));
  }
  return summary;
}

OracleStability oracle_stability(const std::map<std::string, OracleSet>& oracles) {
  std::set<std::string> models;
  for (const auto& [user, oracle] : oracles) {
    for (const auto& [category, verifiers] : oracle.verifying_models) {
      models.insert(verifiers.begin(), verifiers.end());
    }
  }
  if (models.size() < 2) {
    throw Error("oracle stability needs verdicts from >= 2 models");
  }

  OracleStability out;
  std::map<std::string, OracleStability::ModelRow> rows;
  for (const std::string& model : models) rows[model].model = model;

  for (const auto& [user, oracle] : oracles) {
    for (const auto& [category, verifiers] : oracle.verifying_models) {
      ++out.total_pairs;
      ++out.exactly_k[verifiers.size()];
      for (const std::string& model : verifiers) {
        ++rows[model].verified_pairs;
      }
      if (verifiers.size() == 1) {
        ++rows[*verifiers.begin()].sole_provider_pairs;
      }
    }
  }
  for (auto& [model, row] : rows) {
    if (out.total_pairs > 0) {
      row.sole_share_pct = 100.0 * static_cast<double>(row.sole_provider_pairs) /
                           static_cast<double>(out.total_pairs);
    }
    out.rows.push_back(std::move(row));
  }
  return out;
}

std::uint64_t model_set_hash(std::span<const std::string> models) {
  std::vector<std::string> sorted(models.begin(), models.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::uint64_t h = kFnv64Offset;
  for (const std::string& model : sorted) {
    h = fnv1a64_u64(model.size(), h);
    h = fnv1a64(model, h);
  }
  return h;
}

}  // namespace gist::agg
