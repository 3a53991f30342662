#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace gist::judge {

// Decoding is pinned for the whole run: temperature 0, top-p 0.
struct JudgeRequest {
  std::string model_id;
  std::string system_text;
  std::string user_text;
  double temperature = 0.0;
  double top_p = 0.0;
  int max_tokens = 512;
};

struct JudgeResponse {
  std::string text;
  int prompt_tokens = 0;
  int completion_tokens = 0;
  bool cache_hit = false;
};

std::uint64_t request_key(const std::string& judge_id, const JudgeRequest& req);

struct Candidate {
  std::string label;
  std::string text;
};

// The four judgment operations the metrics need. Implementations must be
// deterministic for fixed inputs; metric code never depends on call order.
class Judge {
 public:
  virtual ~Judge() = default;

  virtual const std::string& id() const = 0;

  // Is the object genuinely relevant to the interest?
  virtual bool relevance(const std::string& interest_text,
                         const std::string& object_text,
                         const std::string& engagement_label) = 0;

  // Pick the n candidates most likely to have produced the interest.
  // May return fewer than n only when the underlying response does
  // (remote shortfalls score as misses).
  virtual std::vector<std::string> retrieve(const std::string& interest_text,
                                            std::size_t n,
                                            std::span<const Candidate> candidates) = 0;

  // Do two interest descriptions refer to the same interest?
  virtual bool overlap(const std::string& interest_a,
                       const std::string& interest_b) = 0;

  // One category name (from category_names) per interest text, or nullopt
  // when the judge cannot produce a valid assignment.
  virtual std::vector<std::optional<std::string>> map_categories(
      std::span<const std::string> interest_texts,
      std::span<const std::string> category_names) = 0;
};

// Deterministic offline judge. Decisions are pure functions of the texts:
// both sides are tokenized into content tokens (case-folded, stopwords and
// <3-char tokens removed) and compared by overlap. The hermetic default for
// tests and offline runs.
class MockJudge : public Judge {
 public:
  MockJudge() = default;

  const std::string& id() const override { return id_; }

  // Relevant iff >=1 shared content token. The engagement label is ignored.
  bool relevance(const std::string& interest_text, const std::string& object_text,
                 const std::string& engagement_label) override;

  // Scores candidates by shared-token count, picks the top n,
  // ties broken by candidate index ascending.
  std::vector<std::string> retrieve(const std::string& interest_text, std::size_t n,
                                    std::span<const Candidate> candidates) override;

  bool overlap(const std::string& interest_a, const std::string& interest_b) override;

  // Best category by (shared tokens, Jaccard, list order).
  std::vector<std::optional<std::string>> map_categories(
      std::span<const std::string> interest_texts,
      std::span<const std::string> category_names) override;

 private:
  std::string id_ = "mock-judge-v1";
};

// Test/replay judge with queued answers per operation. Falls back to the
// mock when a queue runs dry.
class ScriptedJudge : public Judge {
 public:
  ScriptedJudge() = default;

  const std::string& id() const override { return id_; }

  void queue_relevance(bool answer) { relevance_.push_back(answer); }
  void queue_retrieval(std::vector<std::string> labels) {
    retrievals_.push_back(std::move(labels));
  }
  void queue_category(std::optional<std::string> category) {
    categories_.push_back(std::move(category));
  }

  bool relevance(const std::string& interest_text, const std::string& object_text,
                 const std::string& engagement_label) override;
  std::vector<std::string> retrieve(const std::string& interest_text, std::size_t n,
                                    std::span<const Candidate> candidates) override;
  bool overlap(const std::string& interest_a, const std::string& interest_b) override;
  std::vector<std::optional<std::string>> map_categories(
      std::span<const std::string> interest_texts,
      std::span<const std::string> category_names) override;

 private:
  std::string id_ = "scripted-judge";
  MockJudge fallback_;
  std::deque<bool> relevance_;
  std::deque<std::vector<std::string>> retrievals_;
  std::deque<std::optional<std::string>> categories_;
};

}  // namespace gist::judge
