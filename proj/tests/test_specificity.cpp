#include "gist/specificity.hpp"

#include "gist/errors.hpp"

#include <doctest.h>

#include <algorithm>
#include <map>

using namespace gist;
using namespace gist::spec;

namespace {

std::vector<ObjectText> make_objects(std::size_t n, const std::string& prefix = "p") {
  std::vector<ObjectText> objects;
  for (std::size_t i = 0; i < n; ++i) {
    objects.push_back({prefix + std::to_string(i),
                       "zxq" + std::to_string(i) + " filler"});
  }
  return objects;
}

}  // namespace

TEST_CASE("build_pool samples deterministically and flags undersized corpora") {
  const auto objects = make_objects(10);
  std::map<std::string, std::set<std::string>> assoc;
  assoc["p3"] = {"football highlights"};

  DistractorPool pool = build_pool(objects, assoc, 1000, 7);
  CHECK(pool.undersized);
  CHECK(pool.entries.size() == 10);
  for (const PoolEntry& entry : pool.entries) {
    if (entry.object_id == "p3") {
      CHECK(entry.associated_interests ==
            std::vector<std::string>{"football highlights"});
    } else {
      CHECK(entry.associated_interests.empty());
    }
  }

  const auto big = make_objects(500);
  DistractorPool a = build_pool(big, {}, 100, 7);
  DistractorPool b = build_pool(big, {}, 100, 7);
  CHECK_FALSE(a.undersized);
  CHECK(a.entries.size() == 100);
  REQUIRE(b.entries.size() == 100);
  for (std::size_t i = 0; i < 100; ++i) {
    CHECK(a.entries[i].object_id == b.entries[i].object_id);
  }
  DistractorPool c = build_pool(big, {}, 100, 8);
  bool same = true;
  for (std::size_t i = 0; i < 100; ++i) {
    same = same && a.entries[i].object_id == c.entries[i].object_id;
  }
  CHECK_FALSE(same);  // seed matters
}

TEST_CASE("filter_overlap removes category-equal associations") {
  // "soccer tactics" (user) vs "football highlights" (pool) both map to the
  // same category, so the entry goes away.
  std::map<std::string, int> categories = {{"soccer tactics", 42},
                                           {"football highlights", 42},
                                           {"sourdough baking", 7}};
  DistractorPool pool;
  pool.entries.push_back({"a", "text", {"football highlights"}});
  pool.entries.push_back({"b", "text", {"sourdough baking"}});
  pool.entries.push_back({"c", "text", {}});  // no associations: retained

  std::vector<std::string> user = {"soccer tactics"};
  DistractorPool filtered = filter_overlap(pool, user, category_overlap(categories));
  REQUIRE(filtered.entries.size() == 2);
  CHECK(filtered.entries[0].object_id == "b");
  CHECK(filtered.entries[1].object_id == "c");
}

TEST_CASE("filter_overlap equals a brute-force set difference") {
  std::map<std::string, int> categories;
  DistractorPool pool;
  for (int i = 0; i < 20; ++i) {
    const std::string interest = "interest_" + std::to_string(i % 8);
    categories[interest] = i % 8;
    pool.entries.push_back({"o" + std::to_string(i), "text", {interest}});
  }
  std::vector<std::string> user = {"user_a", "user_b", "user_c"};
  categories["user_a"] = 1;
  categories["user_b"] = 3;
  categories["user_c"] = 5;

  DistractorPool filtered = filter_overlap(pool, user, category_overlap(categories));
  std::set<std::string> expected;
  for (int i = 0; i < 20; ++i) {
    const int cat = i % 8;
    if (cat != 1 && cat != 3 && cat != 5) expected.insert("o" + std::to_string(i));
  }
  std::set<std::string> got;
  for (const PoolEntry& entry : filtered.entries) got.insert(entry.object_id);
  CHECK(got == expected);
}

TEST_CASE("build_test_set composition and labeling") {
  DistractorPool pool;
  for (int i = 0; i < 100; ++i) {
    pool.entries.push_back({"d" + std::to_string(i), "zxq" + std::to_string(i), {}});
  }

  SUBCASE("4 evidence objects, N=50") {
    const auto evidence = make_objects(4, "e");
    SpecificityTestSet ts = build_test_set("street food", evidence, pool, 50, 5, 7, "u1");
    CHECK(ts.backing == 4);
    CHECK(ts.items.size() == 50);
    CHECK(ts.evidence_labels.size() == 4);
    std::set<std::string> labels;
    for (std::size_t i = 0; i < ts.items.size(); ++i) {
      labels.insert(ts.items[i].label);
      CHECK(ts.items[i].label.rfind("video_", 0) == 0);
    }
    CHECK(labels.size() == 50);
    CHECK(labels.count("video_0") == 1);
    CHECK(labels.count("video_49") == 1);
  }

  SUBCASE("evidence past the cap is sampled down to 5") {
    const auto evidence = make_objects(9, "e");
    SpecificityTestSet ts = build_test_set("street food", evidence, pool, 50, 5, 7, "u1");
    CHECK(ts.backing == 5);
    CHECK(ts.evidence_labels.size() == 5);
  }

  SUBCASE("forced composition when the pool barely suffices") {
    DistractorPool tiny;
    tiny.entries.push_back({"d0", "x", {}});
    tiny.entries.push_back({"d1", "y", {}});
    tiny.entries.push_back({"d2", "z", {}});
    const auto evidence = make_objects(2, "e");
    SpecificityTestSet ts = build_test_set("t", evidence, tiny, 5, 5, 7, "u1");
    CHECK(ts.backing == 2);
    CHECK(ts.items.size() == 5);
  }

  SUBCASE("insufficient pool is an error, not a shrunken set") {
    DistractorPool tiny;
    tiny.entries.push_back({"d0", "x", {}});
    const auto evidence = make_objects(2, "e");
    CHECK_THROWS_AS(build_test_set("t", evidence, tiny, 5, 5, 7, "u1"),
                    InsufficientPoolError);
  }

  SUBCASE("evidence never doubles as a distractor") {
    // Pool built over a corpus that contains the evidence objects themselves.
    std::vector<ObjectText> corpus;
    for (int i = 0; i < 3; ++i) {
      corpus.push_back({"e" + std::to_string(i), "EVIDENCE text"});
    }
    for (int i = 0; i < 7; ++i) {
      corpus.push_back({"d" + std::to_string(i), "zxq" + std::to_string(i)});
    }
    DistractorPool shared_pool = build_pool(corpus, {}, 100, 7);
    std::vector<ObjectText> evidence;
    for (int i = 0; i < 3; ++i) {
      evidence.push_back({"e" + std::to_string(i), "EVIDENCE text"});
    }
    SpecificityTestSet ts = build_test_set("t", evidence, shared_pool, 8, 5, 7, "u1");
    CHECK(ts.items.size() == 8);
    CHECK(ts.evidence_labels.size() == 3);
    // Every EVIDENCE-texted item must be one of the evidence labels.
    for (const auto& item : ts.items) {
      if (item.text == "EVIDENCE text") {
        CHECK(ts.evidence_labels.count(item.label) == 1);
      }
    }
  }

  SUBCASE("same seed reproduces the identical shuffled set") {
    const auto evidence = make_objects(4, "e");
    SpecificityTestSet a = build_test_set("t", evidence, pool, 50, 5, 7, "u1");
    SpecificityTestSet b = build_test_set("t", evidence, pool, 50, 5, 7, "u1");
    REQUIRE(a.items.size() == b.items.size());
    for (std::size_t i = 0; i < a.items.size(); ++i) {
      CHECK(a.items[i].label == b.items[i].label);
      CHECK(a.items[i].text == b.items[i].text);
    }
    CHECK(a.evidence_labels == b.evidence_labels);
    SpecificityTestSet c = build_test_set("t", evidence, pool, 50, 5, 8, "u1");
    CHECK(a.evidence_labels != c.evidence_labels);  // near-certain with 50 slots
  }
}

TEST_CASE("score_retrieval counts correct picks against the evidence labels") {
  DistractorPool pool;
  for (int i = 0; i < 100; ++i) {
    pool.entries.push_back({"d" + std::to_string(i), "zxq" + std::to_string(i), {}});
  }
  std::vector<ObjectText> evidence;
  for (int i = 0; i < 4; ++i) {
    evidence.push_back({"e" + std::to_string(i),
                        "street food stall number " + std::to_string(i)});
  }
  SpecificityTestSet ts = build_test_set("street food", evidence, pool, 50, 5, 7, "u1");

  SUBCASE("scripted judge picking 3 of 4") {
    judge::ScriptedJudge scripted;
    std::vector<std::string> picks(ts.evidence_labels.begin(), ts.evidence_labels.end());
    picks.resize(3);
    picks.push_back("video_that_does_not_exist");  // ignored: not a valid label
    scripted.queue_retrieval(picks);
    SpecificityResult r = score_retrieval(ts, scripted);
    CHECK(r.correct == 3);
    CHECK(r.backing == 4);
  }

  SUBCASE("mock judge finds all evidence among zero-overlap distractors") {
    judge::MockJudge mock;
    SpecificityResult r = score_retrieval(ts, mock);
    CHECK(r.correct == r.backing);
    CHECK(r.backing == 4);
  }
}
