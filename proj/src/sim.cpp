#include "gist/sim.hpp"

#include "gist/errors.hpp"
#include "gist/hash.hpp"
#include "gist/ingest.hpp"
#include "gist/io.hpp"
#include "gist/judge.hpp"
#include "gist/text.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>

namespace gist::sim {

namespace {

constexpr int kDecoyCount = 8;

// Categories whose normalized name the mock judge maps back to themselves.
// Guarantees the taxonomy stage assigns planted interests their intended
// category without a remote judge.
std::vector<std::size_t> self_mapping_categories(const taxonomy::Taxonomy& tax) {
  judge::MockJudge mock;
  const std::vector<std::string> names = tax.category_names();
  std::vector<std::string> descriptors;
  descriptors.reserve(names.size());
  for (const std::string& name : names) descriptors.push_back(normalize_text(name));
  std::vector<std::optional<std::string>> mapped =
      mock.map_categories(descriptors, names);

  std::vector<std::size_t> ok;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (mapped[i] && *mapped[i] == names[i]) ok.push_back(i);
  }
  return ok;
}

std::string evidence_text(const std::string& category_name, std::size_t counter) {
  return "#" + category_name + " clip " + std::to_string(counter);
}

std::string distractor_text(std::uint64_t user_seed, std::size_t counter) {
  // "zxq..." tokens collide with no taxonomy category name.
  return "zxq" + std::to_string(counter) + " zxv" + hex16(user_seed).substr(0, 4);
}

struct ChunkIndex {
  // object_id -> local entry number within the chunk
  std::map<std::string, int> local_by_object;
  std::vector<int> distractor_locals;  // entries that are planted distractors
};

ChunkIndex index_chunk(const GroundTruthUser& user,
                       std::span<const ClassifiedRecord> chunk) {
  std::set<std::string> evidence_ids;
  for (const PlantedInterest& interest : user.true_interests) {
    evidence_ids.insert(interest.evidence_object_ids.begin(),
                        interest.evidence_object_ids.end());
  }
  ChunkIndex index;
  for (std::size_t i = 0; i < chunk.size(); ++i) {
    const std::string& id = chunk[i].record.object_id;
    index.local_by_object[id] = static_cast<int>(i);
    if (!evidence_ids.count(id)) index.distractor_locals.push_back(static_cast<int>(i));
  }
  return index;
}

// Emits {descriptor, in-window citations} for each kept interest whose
// in-window evidence alone satisfies the predicate.
Json grounded_entries(const GroundTruthUser& user,
                      std::span<const ClassifiedRecord> chunk,
                      const gr::VerificationConfig& config, std::size_t keep_count) {
  const ChunkIndex index = index_chunk(user, chunk);
  Json entries = Json::array();
  for (std::size_t k = 0; k < keep_count && k < user.true_interests.size(); ++k) {
    const PlantedInterest& interest = user.true_interests[k];
    std::vector<int> locals;
    gr::SignalCounts counts;
    for (const std::string& object_id : interest.evidence_object_ids) {
      auto it = index.local_by_object.find(object_id);
      if (it == index.local_by_object.end()) continue;
      locals.push_back(it->second);
      switch (chunk[static_cast<std::size_t>(it->second)].cls) {
        case EngagementClass::ExplicitPositive: ++counts.exp_pos; break;
        case EngagementClass::ImplicitPositive: ++counts.imp_pos; break;
        case EngagementClass::ExplicitNegative: ++counts.exp_neg; break;
        case EngagementClass::ImplicitNegative: ++counts.imp_neg; break;
      }
    }
    if (locals.empty() || !gr::verify(counts, config).verified) continue;
    std::sort(locals.begin(), locals.end());
    entries.push_back({{"interest_text", interest.descriptor},
                       {"evidence_ids", locals}});
  }
  return entries;
}

elicit::InterestProfile whole_history_profile(
    const GroundTruthUser& user, const gr::VerificationConfig& config,
    const std::string& model,
    const std::function<std::string(std::span<const ClassifiedRecord>)>& respond) {
  std::vector<elicit::ProfileFragment> fragments;
  std::span<const ClassifiedRecord> chunk(user.history.records);
  if (!chunk.empty()) {
    std::optional<elicit::ParsedFragment> parsed =
        elicit::parse_response(respond(chunk));
    if (parsed) fragments.push_back(elicit::resolve_fragment(*parsed, chunk));
  }
  (void)config;
  return elicit::merge_chunks(fragments, user.user_id, model);
}

}  // namespace

GroundTruthUser generate_user(std::uint64_t seed, int n_true_interests,
                              const NoiseParams& noise,
                              const taxonomy::Taxonomy& taxonomy) {
  if (n_true_interests < 0) throw ConfigError("n_true_interests must be >= 0");

  GroundTruthUser user;
  user.seed = seed;
  user.user_id = "sim_" + hex16(seed);

  const std::vector<std::size_t> usable = self_mapping_categories(taxonomy);
  const std::size_t wanted =
      static_cast<std::size_t>(n_true_interests) + kDecoyCount;
  if (usable.size() < wanted) {
    throw ConfigError("taxonomy too small for requested interest count");
  }

  Rng category_rng(derive_seed(seed, {"categories"}));
  std::vector<std::size_t> picks = category_rng.sample_indices(usable.size(), wanted);

  const int per_interest = noise.exp_pos_per_interest + noise.imp_pos_per_interest;
  const std::size_t evidence_total =
      static_cast<std::size_t>(n_true_interests) * static_cast<std::size_t>(per_interest);
  if (noise.history_length < evidence_total) {
    throw ConfigError("history_length too small for the planted evidence");
  }

  // Scatter evidence positions uniformly through the history.
  Rng layout_rng(derive_seed(seed, {"layout"}));
  std::vector<std::size_t> positions =
      layout_rng.sample_indices(noise.history_length, evidence_total);

  struct Plant {
    std::size_t interest_index;
    EngagementClass cls;
    std::string action;
  };
  std::map<std::size_t, Plant> plants;  // position -> planted evidence
  std::size_t cursor = 0;
  for (int k = 0; k < n_true_interests; ++k) {
    for (int e = 0; e < noise.exp_pos_per_interest; ++e) {
      plants[positions[cursor++]] = {static_cast<std::size_t>(k),
                                     EngagementClass::ExplicitPositive,
                                     e % 2 == 0 ? "like" : "share"};
    }
    for (int e = 0; e < noise.imp_pos_per_interest; ++e) {
      plants[positions[cursor++]] = {static_cast<std::size_t>(k),
                                     EngagementClass::ImplicitPositive, "watch_long"};
    }
  }

  user.true_interests.resize(static_cast<std::size_t>(n_true_interests));
  for (int k = 0; k < n_true_interests; ++k) {
    const taxonomy::TaxonomyCategory& cat =
        taxonomy.categories()[usable[picks[static_cast<std::size_t>(k)]]];
    user.true_interests[static_cast<std::size_t>(k)].category_id = cat.id;
    user.true_interests[static_cast<std::size_t>(k)].descriptor =
        normalize_text(cat.name);
  }
  for (int d = 0; d < kDecoyCount; ++d) {
    const taxonomy::TaxonomyCategory& cat =
        taxonomy.categories()[usable[picks[static_cast<std::size_t>(n_true_interests + d)]]];
    user.decoy_category_ids.push_back(cat.id);
    user.decoy_descriptors.push_back(normalize_text(cat.name));
  }

  Rng noise_rng(derive_seed(seed, {"noise"}));
  std::size_t evidence_counter = 0;
  for (std::size_t pos = 0; pos < noise.history_length; ++pos) {
    EngagementRecord rec;
    rec.dataset = "sim";
    rec.user_id = user.user_id;
    rec.object_id = user.user_id + "_o" + std::to_string(pos);
    rec.timestamp = static_cast<std::int64_t>(noise.history_length - pos);

    EngagementClass cls;
    if (auto it = plants.find(pos); it != plants.end()) {
      const Plant& plant = it->second;
      const taxonomy::TaxonomyCategory* cat =
          taxonomy.by_id(user.true_interests[plant.interest_index].category_id);
      rec.object_text = evidence_text(cat->name, ++evidence_counter);
      rec.engagement_raw = RawSignal::make_action(plant.action);
      cls = plant.cls;
      user.true_interests[plant.interest_index].evidence_object_ids.push_back(
          rec.object_id);
    } else {
      rec.object_text = distractor_text(seed, pos);
      const double roll = noise_rng.unit();
      if (roll < noise.negative_rate) {
        rec.engagement_raw = RawSignal::make_action("skip");
        cls = EngagementClass::ImplicitNegative;
      } else if (roll < noise.negative_rate + noise.explicit_negative_rate) {
        rec.engagement_raw = RawSignal::make_action("dislike");
        cls = EngagementClass::ExplicitNegative;
      } else if (roll < noise.negative_rate + noise.explicit_negative_rate +
                            noise.explicit_positive_rate) {
        rec.engagement_raw = RawSignal::make_action("like");
        cls = EngagementClass::ExplicitPositive;
      } else {
        rec.engagement_raw = RawSignal::make_action("watch_long");
        cls = EngagementClass::ImplicitPositive;
      }
    }
    user.history.records.push_back({std::move(rec), cls});
  }
  user.history.user_id = user.user_id;
  // Positions already run newest-to-oldest (timestamps strictly decreasing).
  return user;
}

std::vector<EngagementRecord> to_records(const GroundTruthUser& user) {
  std::vector<EngagementRecord> records;
  records.reserve(user.history.records.size());
  for (const ClassifiedRecord& rec : user.history.records) {
    records.push_back(rec.record);
  }
  return records;
}

std::string oracle_response(const GroundTruthUser& user,
                            std::span<const ClassifiedRecord> chunk,
                            const gr::VerificationConfig& config) {
  return grounded_entries(user, chunk, config, user.true_interests.size()).dump();
}

std::string conservative_response(const GroundTruthUser& user,
                                  std::span<const ClassifiedRecord> chunk,
                                  const gr::VerificationConfig& config,
                                  double keep_fraction) {
  const std::size_t keep = static_cast<std::size_t>(
      std::ceil(keep_fraction * static_cast<double>(user.true_interests.size())));
  return grounded_entries(user, chunk, config, keep).dump();
}

std::string hallucinating_response(const GroundTruthUser& user,
                                   std::span<const ClassifiedRecord> chunk,
                                   const gr::VerificationConfig& config,
                                   int extra_count) {
  Json entries = grounded_entries(user, chunk, config, user.true_interests.size());
  const ChunkIndex index = index_chunk(user, chunk);
  for (int d = 0; d < extra_count; ++d) {
    const std::size_t idx = static_cast<std::size_t>(d) % user.decoy_descriptors.size();
    std::vector<int> citations;
    // Cite up to two in-window distractors; the judge will reject them.
    for (std::size_t c = 0; c < index.distractor_locals.size() && c < 2; ++c) {
      citations.push_back(index.distractor_locals[c]);
    }
    entries.push_back({{"interest_text", user.decoy_descriptors[idx]},
                       {"evidence_ids", citations}});
  }
  return entries.dump();
}

elicit::InterestProfile extract_oracle(const GroundTruthUser& user,
                                       const gr::VerificationConfig& config) {
  return whole_history_profile(user, config, "oracle",
                               [&](std::span<const ClassifiedRecord> chunk) {
                                 return oracle_response(user, chunk, config);
                               });
}

elicit::InterestProfile extract_conservative(const GroundTruthUser& user,
                                             const gr::VerificationConfig& config,
                                             double keep_fraction) {
  return whole_history_profile(
      user, config, "conservative",
      [&](std::span<const ClassifiedRecord> chunk) {
        return conservative_response(user, chunk, config, keep_fraction);
      });
}

elicit::InterestProfile extract_hallucinating(const GroundTruthUser& user,
                                              const gr::VerificationConfig& config,
                                              int extra_count) {
  return whole_history_profile(
      user, config, "hallucinating",
      [&](std::span<const ClassifiedRecord> chunk) {
        return hallucinating_response(user, chunk, config, extra_count);
      });
}

}  // namespace gist::sim
