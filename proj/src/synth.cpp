#include "gist/synth.hpp"

#include "gist/errors.hpp"
#include "gist/hash.hpp"
#include "gist/stats.hpp"
#include "gist/text.hpp"

#include <algorithm>
#include <numeric>

namespace gist::synth {

std::vector<Cohort> form_cohorts(
    const std::map<std::string, std::set<std::string>>& user_clusters,
    std::size_t cluster_count, std::size_t min_size, std::size_t max_cohorts,
    std::uint64_t seed) {
  if (cluster_count < 1 || min_size < 1) {
    throw ConfigError("cohort cluster_count and min_size must be >= 1");
  }

  // Key = the sorted cluster tuple; members must share it exactly.
  std::map<std::string, Cohort> groups;
  for (const auto& [user, clusters] : user_clusters) {
    if (clusters.size() != cluster_count) continue;
    std::string key;
    for (const std::string& c : clusters) {
      key += c;
      key += '\x1f';
    }
    Cohort& cohort = groups[key];
    if (cohort.shared_cluster_ids.empty()) {
      cohort.shared_cluster_ids.assign(clusters.begin(), clusters.end());
    }
    cohort.member_user_ids.push_back(user);
  }

  std::vector<std::pair<std::uint64_t, Cohort>> ranked;
  for (auto& [key, cohort] : groups) {
    if (cohort.member_user_ids.size() < min_size) continue;
    std::uint64_t h = seeded_hash(seed, key);
    cohort.cohort_id = "cohort_" + hex16(h);
    std::sort(cohort.member_user_ids.begin(), cohort.member_user_ids.end());
    ranked.emplace_back(h, std::move(cohort));
  }
  std::sort(ranked.begin(), ranked.end(),
            [](const auto& a, const auto& b) {
              if (a.first != b.first) return a.first < b.first;
              return a.second.shared_cluster_ids < b.second.shared_cluster_ids;
            });
  if (ranked.size() > max_cohorts) ranked.resize(max_cohorts);

  std::vector<Cohort> cohorts;
  cohorts.reserve(ranked.size());
  for (auto& [h, cohort] : ranked) cohorts.push_back(std::move(cohort));
  return cohorts;
}

std::string redact(const std::string& text,
                   std::span<const std::string> redaction_terms) {
  if (redaction_terms.empty()) return text;
  std::set<std::string> terms;
  for (const std::string& t : redaction_terms) terms.insert(normalize_text(t));

  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    if (!std::isalnum(static_cast<unsigned char>(text[i]))) {
      out.push_back(text[i]);
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < text.size() && std::isalnum(static_cast<unsigned char>(text[j]))) ++j;
    std::string word = text.substr(i, j - i);
    out += terms.count(normalize_text(word)) ? "[redacted]" : word;
    i = j;
  }
  return out;
}

SyntheticUser synthesize_user(const Cohort& cohort,
                              const std::map<std::string, InteractionHistory>&
                                  member_histories,
                              std::size_t sample_size, std::uint64_t seed,
                              std::span<const std::string> redaction_terms) {
  // Canonical pool order: members sorted (they are), each history in order.
  std::vector<SyntheticEngagement> pool;
  for (const std::string& member : cohort.member_user_ids) {
    auto it = member_histories.find(member);
    if (it == member_histories.end()) continue;
    for (const ClassifiedRecord& rec : it->second.records) {
      pool.push_back({rec.record.object_text, rec.record.engagement_raw.label(),
                      rec.cls});
    }
  }
  if (sample_size > pool.size()) {
    throw PoolTooSmallError("cohort pool of " + std::to_string(pool.size()) +
                            " engagements cannot supply " +
                            std::to_string(sample_size));
  }

  Rng rng(seed);
  rng.shuffle(pool);
  pool.resize(sample_size);

  SyntheticUser user;
  user.user_mock_id = "user_" + hex16(seeded_hash(seed, cohort.cohort_id));
  user.engagements = std::move(pool);
  for (SyntheticEngagement& e : user.engagements) {
    e.object_text = redact(e.object_text, redaction_terms);
  }
  return user;
}

DistributionReport validate_distributions(
    std::span<const ClassCountsPerUser> synthetic,
    std::span<const ClassCountsPerUser> reference) {
  if (synthetic.size() < 2 || reference.size() < 2) {
    throw InsufficientSamplesError(
        "distribution validation needs >= 2 users per group");
  }

  DistributionReport report;
  std::array<double, 4> synth_means{};
  std::array<double, 4> ref_means{};
  for (EngagementClass cls : kAllEngagementClasses) {
    const std::size_t c = static_cast<std::size_t>(cls);
    std::vector<double> synth_counts, ref_counts;
    synth_counts.reserve(synthetic.size());
    ref_counts.reserve(reference.size());
    for (const auto& counts : synthetic) synth_counts.push_back(counts[c]);
    for (const auto& counts : reference) ref_counts.push_back(counts[c]);

    stats::WelchResult welch = stats::welch_ttest(synth_counts, ref_counts);
    ClassComparisonRow row;
    row.cls = cls;
    row.t_stat = welch.t;
    row.p_value = welch.p;
    row.mean_synth = stats::mean(synth_counts);
    row.mean_ref = stats::mean(ref_counts);
    synth_means[c] = row.mean_synth;
    ref_means[c] = row.mean_ref;
    report.rows.push_back(row);
  }

  auto descending_order = [](const std::array<double, 4>& means) {
    std::array<std::size_t, 4> order{0, 1, 2, 3};
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return means[a] > means[b]; });
    return order;
  };
  report.ordering_preserved =
      descending_order(synth_means) == descending_order(ref_means);
  return report;
}

}  // namespace gist::synth
