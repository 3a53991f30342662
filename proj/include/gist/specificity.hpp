#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "gist/judge.hpp"

namespace gist::spec {

struct PoolEntry {
  std::string object_id;
  std::string object_text;
  // Every interest text this object was cited for, across users and models.
  std::vector<std::string> associated_interests;
};

struct DistractorPool {
  std::vector<PoolEntry> entries;  // ordered by object_id
  bool undersized = false;         // corpus smaller than the requested size
};

struct ObjectText {
  std::string object_id;
  std::string object_text;
};

// Seeded uniform sample of pool_size distinct objects (the pool_size smallest
// hash(seed, object_id)). When the corpus is smaller, the whole corpus is the
// pool and `undersized` is set.
DistractorPool build_pool(std::span<const ObjectText> objects,
                          const std::map<std::string, std::set<std::string>>&
                              interests_by_object,
                          std::size_t pool_size, std::uint64_t seed);

// Removes entries any of whose associated interests overlap a user interest.
using OverlapFn =
    std::function<bool(const std::string& pool_interest, const std::string& user_interest)>;

DistractorPool filter_overlap(const DistractorPool& pool,
                              std::span<const std::string> user_interest_texts,
                              const OverlapFn& overlaps);

// Deterministic category-equality overlap (the default mode):
// two interests overlap iff they map to the same category.
OverlapFn category_overlap(const std::map<std::string, int>& category_by_text);

// Judge-mode overlap.
OverlapFn judge_overlap(judge::Judge& judge);

struct SpecificityTestSet {
  std::string interest_text;
  std::size_t backing = 0;                 // n = min(evidence, cap)
  std::set<std::string> evidence_labels;   // the labels hiding true evidence
  std::vector<judge::Candidate> items;     // N labeled, shuffled candidates
  std::uint64_t shuffle_seed = 0;
};

// n evidence objects (seeded sample of the cap when the interest cites more)
// plus N-n seeded distractors, shuffled and labeled video_0..video_{N-1}.
// Evidence and distractors never share an object_id.
// Throws InsufficientPoolError when the filtered pool cannot supply N-n
// distractors (the interest is then skipped, not shrunk).
SpecificityTestSet build_test_set(const std::string& interest_text,
                                  std::span<const ObjectText> filtered_evidence,
                                  const DistractorPool& pool, std::size_t test_set_size,
                                  std::size_t evidence_cap, std::uint64_t run_seed,
                                  const std::string& user_id);

struct SpecificityResult {
  int correct = 0;
  int backing = 0;
};

// correct = |judge picks ∩ evidence labels|, backing = n. The judge sees only
// the interest text, n, and the candidate texts.
SpecificityResult score_retrieval(const SpecificityTestSet& test_set,
                                  judge::Judge& judge);

}  // namespace gist::spec
