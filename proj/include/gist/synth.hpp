#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "gist/core.hpp"

namespace gist::synth {

// Users who co-engaged the same fixed-size set of interest clusters.
struct Cohort {
  std::string cohort_id;
  std::vector<std::string> member_user_ids;     // sorted
  std::vector<std::string> shared_cluster_ids;  // sorted, size == cluster_count
};

// Groups users by identical cluster sets of exactly cluster_count clusters,
// discards groups smaller than min_size, and keeps at most max_cohorts picked
// by hashed cohort key. Invariant under input-map ordering.
std::vector<Cohort> form_cohorts(
    const std::map<std::string, std::set<std::string>>& user_clusters,
    std::size_t cluster_count, std::size_t min_size, std::size_t max_cohorts,
    std::uint64_t seed);

struct SyntheticEngagement {
  std::string object_text;
  std::string interaction_label;  // raw action label from the source record
  EngagementClass cls = EngagementClass::ImplicitPositive;
};

// An anonymized user: no source user ids, no timestamps.
struct SyntheticUser {
  std::string user_mock_id;
  std::vector<SyntheticEngagement> engagements;
};

// Aggregates all members' engagements, shuffles the pool with the seed, and
// keeps the first sample_size entries (a uniform sample without replacement,
// emitted in shuffled order). Redaction terms are replaced token-wise in
// object_text before emission. Throws PoolTooSmallError.
SyntheticUser synthesize_user(const Cohort& cohort,
                              const std::map<std::string, InteractionHistory>&
                                  member_histories,
                              std::size_t sample_size, std::uint64_t seed,
                              std::span<const std::string> redaction_terms = {});

// Case-insensitive token-level replacement with "[redacted]".
std::string redact(const std::string& text,
                   std::span<const std::string> redaction_terms);

using ClassCountsPerUser = std::array<double, 4>;  // indexed by EngagementClass

struct ClassComparisonRow {
  EngagementClass cls;
  double t_stat = 0.0;
  double p_value = 1.0;
  double mean_synth = 0.0;
  double mean_ref = 0.0;
};

struct DistributionReport {
  std::vector<ClassComparisonRow> rows;  // one per engagement class
  // Whether sorting classes by descending mean gives the same order in both
  // groups.
  bool ordering_preserved = false;
};

// Welch two-tailed t-test per engagement class between synthetic and
// reference per-user counts. Throws InsufficientSamplesError when either
// group has fewer than 2 users.
DistributionReport validate_distributions(
    std::span<const ClassCountsPerUser> synthetic,
    std::span<const ClassCountsPerUser> reference);

}  // namespace gist::synth
