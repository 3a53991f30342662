#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gist/core.hpp"

namespace gist::ingest {

// One mapping rule: exactly one matcher (action name, watch-ratio interval,
// or rating set) paired with the class it maps to.
struct SignalRule {
  std::optional<std::string> action;

  struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    bool lo_exclusive = false;
    bool hi_exclusive = false;
    bool hi_unbounded = false;

    bool contains(double v) const {
      if (lo_exclusive ? v <= lo : v < lo) return false;
      if (hi_unbounded) return true;
      return hi_exclusive ? v < hi : v <= hi;
    }
  };
  std::optional<Interval> watch;

  std::vector<int> ratings;

  EngagementClass cls = EngagementClass::ImplicitPositive;
};

class SignalMapping {
 public:
  SignalMapping() = default;
  SignalMapping(std::string dataset, std::vector<SignalRule> rules);

  const std::string& dataset() const { return dataset_; }
  const std::vector<SignalRule>& rules() const { return rules_; }

  // First matching rule wins; nullopt when no rule covers the signal.
  // Throws InvalidSignalError for out-of-domain values (rating outside 1..5,
  // negative watch ratio).
  std::optional<EngagementClass> match(const RawSignal& raw) const;

 private:
  // Watch intervals must not overlap; duplicate action names / rating values
  // must not map to different classes.
  void validate() const;

  std::string dataset_;
  std::vector<SignalRule> rules_;
};

class MappingRegistry {
 public:
  void add(SignalMapping mapping);
  bool has(const std::string& dataset) const;
  const SignalMapping& get(const std::string& dataset) const;  // throws UnknownDatasetError

  // Mappings for the datasets the pipeline knows out of the box:
  //   kuairec       watch ratio  (>0.9 exp+, 0.3..0.9 imp+, <0.3 unmapped)
  //   amazon_music  1-5 stars    (5 exp+, 3-4 imp+, 1-2 exp-)
  //   goodreads     1-5 stars    (same as amazon_music)
  //   mind          click exp+, non_click imp-
  //   synthetic     action names (like/comment/share/save/follow/click exp+,
  //                 watch/watch_long imp+, skip imp-)
  //   sim           synthetic plus dislike -> exp-
  static MappingRegistry with_defaults();

 private:
  std::map<std::string, SignalMapping> mappings_;
};

// Resolves the dataset's mapping and classifies one raw signal.
// Throws UnknownDatasetError, UnmappedSignalError, or InvalidSignalError.
EngagementClass classify_engagement(const MappingRegistry& registry,
                                    const std::string& dataset,
                                    const RawSignal& raw);

// Deterministic user selection: the max_users ids with the smallest
// hash(seed, id), returned in hash order. Invariant under input permutation
// and duplication.
std::vector<std::string> sample_users(const std::vector<std::string>& user_ids,
                                      std::size_t max_users, std::uint64_t seed);

// Consecutive non-overlapping windows over a most-recent-first history.
// All chunks have `window` records except possibly the last.
std::vector<std::span<const ClassifiedRecord>> segment_history(
    const InteractionHistory& history, std::size_t window);

struct IngestStats {
  std::size_t records_read = 0;
  std::size_t records_kept = 0;
  std::size_t dropped_unmapped = 0;
  std::size_t duplicates_collapsed = 0;
  std::size_t users_total = 0;
  std::size_t users_selected = 0;
};

struct IngestedDataset {
  std::string dataset;
  // Ordered by the sample_users selection order; each history sorted
  // most-recent-first.
  std::vector<InteractionHistory> histories;
  IngestStats stats;
};

// Classifies, deduplicates, selects users, and sorts histories.
IngestedDataset ingest_records(const std::string& dataset,
                               std::vector<EngagementRecord> records,
                               const MappingRegistry& registry,
                               std::size_t max_users, std::uint64_t seed);

// Reads one line-delimited record file (fields: dataset, user_id, object_id,
// engagement_type | watch_ratio | rating, object_text, timestamp).
// Structural problems (missing fields, empty object_text, negative timestamp,
// rating outside 1..5) raise IngestError with file/line context.
IngestedDataset ingest_file(const std::filesystem::path& path,
                            const std::string& dataset,
                            const MappingRegistry& registry,
                            std::size_t max_users, std::uint64_t seed);

}  // namespace gist::ingest
