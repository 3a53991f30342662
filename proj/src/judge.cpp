#include "gist/judge.hpp"

#include "gist/hash.hpp"
#include "gist/text.hpp"

#include <algorithm>

namespace gist::judge {

std::uint64_t request_key(const std::string& judge_id, const JudgeRequest& req) {
  std::uint64_t h = fnv1a64(judge_id);
  for (const std::string* part : {&req.model_id, &req.system_text, &req.user_text}) {
    h = fnv1a64_u64(part->size(), h);
    h = fnv1a64(*part, h);
  }
  h = fnv1a64_u64(static_cast<std::uint64_t>(req.temperature * 1e6), h);
  h = fnv1a64_u64(static_cast<std::uint64_t>(req.top_p * 1e6), h);
  h = fnv1a64_u64(static_cast<std::uint64_t>(req.max_tokens), h);
  return h;
}

bool MockJudge::relevance(const std::string& interest_text,
                          const std::string& object_text,
                          const std::string& /*engagement_label*/) {
  return shared_token_count(content_tokens(interest_text),
                            content_tokens(object_text)) >= 1;
}

std::vector<std::string> MockJudge::retrieve(const std::string& interest_text,
                                             std::size_t n,
                                             std::span<const Candidate> candidates) {
  const std::set<std::string> interest = content_tokens(interest_text);
  std::vector<std::pair<std::size_t, std::size_t>> scored;  // (score, index)
  scored.reserve(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    scored.emplace_back(shared_token_count(interest, content_tokens(candidates[i].text)), i);
  }
  std::stable_sort(scored.begin(), scored.end(),
                   [](const auto& a, const auto& b) {
                     if (a.first != b.first) return a.first > b.first;
                     return a.second < b.second;
                   });
  std::vector<std::string> out;
  for (std::size_t i = 0; i < scored.size() && out.size() < n; ++i) {
    out.push_back(candidates[scored[i].second].label);
  }
  return out;
}

bool MockJudge::overlap(const std::string& interest_a, const std::string& interest_b) {
  return shared_token_count(content_tokens(interest_a),
                            content_tokens(interest_b)) >= 1;
}

std::vector<std::optional<std::string>> MockJudge::map_categories(
    std::span<const std::string> interest_texts,
    std::span<const std::string> category_names) {
  std::vector<std::set<std::string>> category_tokens;
  category_tokens.reserve(category_names.size());
  for (const std::string& name : category_names) {
    category_tokens.push_back(content_tokens(name));
  }

  std::vector<std::optional<std::string>> out;
  out.reserve(interest_texts.size());
  for (const std::string& text : interest_texts) {
    const std::set<std::string> tokens = content_tokens(text);
    std::size_t best = category_names.size();
    std::size_t best_shared = 0;
    double best_jaccard = 0.0;
    for (std::size_t i = 0; i < category_names.size(); ++i) {
      std::size_t shared = shared_token_count(tokens, category_tokens[i]);
      if (shared == 0) continue;
      std::size_t union_size = tokens.size() + category_tokens[i].size() - shared;
      double jaccard = union_size == 0 ? 0.0
                                       : static_cast<double>(shared) /
                                             static_cast<double>(union_size);
      if (shared > best_shared ||
          (shared == best_shared && jaccard > best_jaccard)) {
        best = i;
        best_shared = shared;
        best_jaccard = jaccard;
      }
    }
    if (best == category_names.size()) {
      out.push_back(std::nullopt);
    } else {
      out.push_back(category_names[best]);
    }
  }
  return out;
}

bool ScriptedJudge::relevance(const std::string& interest_text,
                              const std::string& object_text,
                              const std::string& engagement_label) {
  if (relevance_.empty()) {
    return fallback_.relevance(interest_text, object_text, engagement_label);
  }
  bool answer = relevance_.front();
  relevance_.pop_front();
  return answer;
}

std::vector<std::string> ScriptedJudge::retrieve(const std::string& interest_text,
                                                 std::size_t n,
                                                 std::span<const Candidate> candidates) {
  if (retrievals_.empty()) return fallback_.retrieve(interest_text, n, candidates);
  std::vector<std::string> answer = std::move(retrievals_.front());
  retrievals_.pop_front();
  return answer;
}

bool ScriptedJudge::overlap(const std::string& interest_a,
                            const std::string& interest_b) {
  return fallback_.overlap(interest_a, interest_b);
}

std::vector<std::optional<std::string>> ScriptedJudge::map_categories(
    std::span<const std::string> interest_texts,
    std::span<const std::string> category_names) {
  if (categories_.empty()) {
    return fallback_.map_categories(interest_texts, category_names);
  }
  std::vector<std::optional<std::string>> out;
  for (std::size_t i = 0; i < interest_texts.size(); ++i) {
    if (categories_.empty()) {
      out.push_back(fallback_.map_categories({&interest_texts[i], 1}, category_names)[0]);
    } else {
      out.push_back(std::move(categories_.front()));
      categories_.pop_front();
    }
  }
  return out;
}

}  // namespace gist::judge
