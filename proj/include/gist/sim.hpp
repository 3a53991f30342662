#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gist/core.hpp"
#include "gist/elicit.hpp"
#include "gist/groundedness.hpp"
#include "gist/taxonomy.hpp"

namespace gist::sim {

struct NoiseParams {
  std::size_t history_length = 200;
  double negative_rate = 0.15;           // distractor share that is skip (imp-)
  double explicit_negative_rate = 0.03;  // distractor share that is dislike (exp-)
  double explicit_positive_rate = 0.05;  // distractor share that is like (exp+)
  int exp_pos_per_interest = 2;
  int imp_pos_per_interest = 3;
};

struct PlantedInterest {
  int category_id = 0;
  std::string descriptor;  // the category name, normalized
  std::vector<std::string> evidence_object_ids;
};

// A user with known ground truth: every true interest carries planted
// evidence that satisfies the default verification predicate, and distractor
// texts share no content tokens with any taxonomy category name, so the mock
// judge separates them cleanly.
struct GroundTruthUser {
  std::string user_id;
  std::uint64_t seed = 0;
  std::vector<PlantedInterest> true_interests;
  std::vector<std::string> decoy_descriptors;  // unplanted category names
  std::vector<int> decoy_category_ids;
  InteractionHistory history;  // most-recent-first, dataset "sim"
};

// Deterministic in seed. Planted interests use distinct taxonomy categories
// whose names the mock judge maps back to themselves; evidence positions are
// scattered uniformly through the history.
GroundTruthUser generate_user(std::uint64_t seed, int n_true_interests,
                              const NoiseParams& noise,
                              const taxonomy::Taxonomy& taxonomy);

// The user's history in the unified record schema (ingestable as dataset
// "sim"; reclassification reproduces the planted classes).
std::vector<EngagementRecord> to_records(const GroundTruthUser& user);

// Reference extractors. Each emits a raw generation for one prompt window,
// behaving like a faithful instruction follower: an interest is claimed only
// when the window itself contains enough of its planted evidence to satisfy
// the thresholds, and the citations are exactly that in-window evidence.
//
//   oracle          every true interest
//   conservative    the first ceil(keep_fraction * K) true interests
//   hallucinating   oracle plus extra_count fabricated interests citing
//                   distractor objects (never verifiable)
std::string oracle_response(const GroundTruthUser& user,
                            std::span<const ClassifiedRecord> chunk,
                            const gr::VerificationConfig& config);
std::string conservative_response(const GroundTruthUser& user,
                                  std::span<const ClassifiedRecord> chunk,
                                  const gr::VerificationConfig& config,
                                  double keep_fraction);
std::string hallucinating_response(const GroundTruthUser& user,
                                   std::span<const ClassifiedRecord> chunk,
                                   const gr::VerificationConfig& config,
                                   int extra_count);

// Whole-history profiles (single window), routed through the real parse and
// merge path.
elicit::InterestProfile extract_oracle(const GroundTruthUser& user,
                                       const gr::VerificationConfig& config);
elicit::InterestProfile extract_conservative(const GroundTruthUser& user,
                                             const gr::VerificationConfig& config,
                                             double keep_fraction);
elicit::InterestProfile extract_hallucinating(const GroundTruthUser& user,
                                              const gr::VerificationConfig& config,
                                              int extra_count);

}  // namespace gist::sim
