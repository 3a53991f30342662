#include "gist/specificity.hpp"

#include "gist/errors.hpp"
#include "gist/hash.hpp"

#include <algorithm>

namespace gist::spec {

DistractorPool build_pool(std::span<const ObjectText> objects,
                          const std::map<std::string, std::set<std::string>>&
                              interests_by_object,
                          std::size_t pool_size, std::uint64_t seed) {
  // Dedup by object_id, then rank by hash(seed, object_id).
  std::map<std::string, const ObjectText*> unique;
  for (const ObjectText& obj : objects) unique.emplace(obj.object_id, &obj);

  std::vector<std::pair<std::uint64_t, const ObjectText*>> ranked;
  ranked.reserve(unique.size());
  for (const auto& [id, obj] : unique) {
    ranked.emplace_back(seeded_hash(seed, id), obj);
  }
  std::sort(ranked.begin(), ranked.end(),
            [](const auto& a, const auto& b) {
              if (a.first != b.first) return a.first < b.first;
              return a.second->object_id < b.second->object_id;
            });

  DistractorPool pool;
  pool.undersized = ranked.size() < pool_size;
  if (ranked.size() > pool_size) ranked.resize(pool_size);

  pool.entries.reserve(ranked.size());
  for (const auto& [h, obj] : ranked) {
    PoolEntry entry;
    entry.object_id = obj->object_id;
    entry.object_text = obj->object_text;
    if (auto it = interests_by_object.find(obj->object_id);
        it != interests_by_object.end()) {
      entry.associated_interests.assign(it->second.begin(), it->second.end());
    }
    pool.entries.push_back(std::move(entry));
  }
  std::sort(pool.entries.begin(), pool.entries.end(),
            [](const PoolEntry& a, const PoolEntry& b) {
              return a.object_id < b.object_id;
            });
  return pool;
}

DistractorPool filter_overlap(const DistractorPool& pool,
                              std::span<const std::string> user_interest_texts,
                              const OverlapFn& overlaps) {
  DistractorPool filtered;
  filtered.undersized = pool.undersized;
  for (const PoolEntry& entry : pool.entries) {
    bool remove = false;
    for (const std::string& pool_interest : entry.associated_interests) {
      for (const std::string& user_interest : user_interest_texts) {
        if (overlaps(pool_interest, user_interest)) {
          remove = true;
          break;
        }
      }
      if (remove) break;
    }
    if (!remove) filtered.entries.push_back(entry);
  }
  return filtered;
}

OverlapFn category_overlap(const std::map<std::string, int>& category_by_text) {
  return [&category_by_text](const std::string& a, const std::string& b) {
    auto ia = category_by_text.find(a);
    auto ib = category_by_text.find(b);
    if (ia == category_by_text.end() || ib == category_by_text.end()) return false;
    return ia->second == ib->second;
  };
}

OverlapFn judge_overlap(judge::Judge& judge) {
  return [&judge](const std::string& a, const std::string& b) {
    return judge.overlap(a, b);
  };
}

SpecificityTestSet build_test_set(const std::string& interest_text,
                                  std::span<const ObjectText> filtered_evidence,
                                  const DistractorPool& pool, std::size_t test_set_size,
                                  std::size_t evidence_cap, std::uint64_t run_seed,
                                  const std::string& user_id) {
  if (filtered_evidence.empty()) {
    throw Error("test set needs at least one evidence object");
  }

  SpecificityTestSet out;
  out.interest_text = interest_text;

  // Evidence sample: cap at evidence_cap, chosen uniformly when over the cap.
  std::vector<const ObjectText*> evidence;
  evidence.reserve(filtered_evidence.size());
  for (const ObjectText& obj : filtered_evidence) evidence.push_back(&obj);
  if (evidence.size() > evidence_cap) {
    Rng rng(derive_seed(run_seed, {"evidence", user_id, interest_text}));
    std::vector<std::size_t> picks = rng.sample_indices(evidence.size(), evidence_cap);
    std::sort(picks.begin(), picks.end());
    std::vector<const ObjectText*> capped;
    capped.reserve(evidence_cap);
    for (std::size_t i : picks) capped.push_back(evidence[i]);
    evidence = std::move(capped);
  }
  out.backing = evidence.size();

  std::set<std::string> evidence_ids;
  for (const ObjectText* obj : evidence) evidence_ids.insert(obj->object_id);

  // Distractor candidates: pool entries that are not evidence of this interest.
  std::vector<const PoolEntry*> candidates;
  candidates.reserve(pool.entries.size());
  for (const PoolEntry& entry : pool.entries) {
    if (!evidence_ids.count(entry.object_id)) candidates.push_back(&entry);
  }
  const std::size_t needed = test_set_size - out.backing;
  if (candidates.size() < needed) {
    throw InsufficientPoolError("pool supplies " + std::to_string(candidates.size()) +
                                " distractors, need " + std::to_string(needed));
  }

  struct Item {
    std::string object_id;
    std::string text;
    bool is_evidence;
  };
  std::vector<Item> items;
  items.reserve(test_set_size);
  for (const ObjectText* obj : evidence) {
    items.push_back({obj->object_id, obj->object_text, true});
  }
  {
    Rng rng(derive_seed(run_seed, {"distractors", user_id, interest_text}));
    std::vector<std::size_t> picks = rng.sample_indices(candidates.size(), needed);
    std::sort(picks.begin(), picks.end());
    for (std::size_t i : picks) {
      items.push_back({candidates[i]->object_id, candidates[i]->object_text, false});
    }
  }

  out.shuffle_seed = derive_seed(run_seed, {user_id, interest_text});
  Rng shuffle_rng(out.shuffle_seed);
  shuffle_rng.shuffle(items);

  out.items.reserve(items.size());
  for (std::size_t i = 0; i < items.size(); ++i) {
    std::string label = "video_" + std::to_string(i);
    if (items[i].is_evidence) out.evidence_labels.insert(label);
    out.items.push_back({std::move(label), std::move(items[i].text)});
  }
  return out;
}

SpecificityResult score_retrieval(const SpecificityTestSet& test_set,
                                  judge::Judge& judge) {
  std::vector<std::string> picks =
      judge.retrieve(test_set.interest_text, test_set.backing, test_set.items);
  SpecificityResult result;
  result.backing = static_cast<int>(test_set.backing);
  std::set<std::string> seen;
  for (const std::string& label : picks) {
    if (!seen.insert(label).second) continue;
    if (test_set.evidence_labels.count(label)) ++result.correct;
  }
  return result;
}

}  // namespace gist::spec
