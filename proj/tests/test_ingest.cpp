#include "gist/ingest.hpp"

#include "gist/errors.hpp"
#include "gist/io.hpp"

#include <doctest.h>

#include <filesystem>
#include <map>
#include <set>

using namespace gist;
using namespace gist::ingest;

namespace {

EngagementRecord make_record(std::string user, std::string object, RawSignal raw,
                             std::int64_t ts, std::string text = "some text") {
  EngagementRecord rec;
  rec.dataset = "sim";
  rec.user_id = std::move(user);
  rec.object_id = std::move(object);
  rec.engagement_raw = std::move(raw);
  rec.object_text = std::move(text);
  rec.timestamp = ts;
  return rec;
}

}  // namespace

TEST_CASE("classify_engagement reproduces the documented mappings") {
  const MappingRegistry reg = MappingRegistry::with_defaults();
  CHECK(classify_engagement(reg, "kuairec", RawSignal::make_watch_ratio(0.95)) ==
        EngagementClass::ExplicitPositive);
  CHECK(classify_engagement(reg, "kuairec", RawSignal::make_watch_ratio(0.5)) ==
        EngagementClass::ImplicitPositive);
  CHECK(classify_engagement(reg, "kuairec", RawSignal::make_watch_ratio(0.9)) ==
        EngagementClass::ImplicitPositive);  // the open bound belongs to >0.9
  CHECK(classify_engagement(reg, "amazon_music", RawSignal::make_rating(2)) ==
        EngagementClass::ExplicitNegative);
  CHECK(classify_engagement(reg, "amazon_music", RawSignal::make_rating(5)) ==
        EngagementClass::ExplicitPositive);
  CHECK(classify_engagement(reg, "goodreads", RawSignal::make_rating(3)) ==
        EngagementClass::ImplicitPositive);
  CHECK(classify_engagement(reg, "synthetic", RawSignal::make_action("skip")) ==
        EngagementClass::ImplicitNegative);
  CHECK(classify_engagement(reg, "mind", RawSignal::make_action("non_click")) ==
        EngagementClass::ImplicitNegative);
}

TEST_CASE("classify_engagement error paths") {
  const MappingRegistry reg = MappingRegistry::with_defaults();
  CHECK_THROWS_AS(classify_engagement(reg, "kuairec", RawSignal::make_watch_ratio(0.1)),
                  UnmappedSignalError);
  CHECK_THROWS_AS(classify_engagement(reg, "nope", RawSignal::make_action("like")),
                  UnknownDatasetError);
  CHECK_THROWS_AS(classify_engagement(reg, "goodreads", RawSignal::make_rating(0)),
                  InvalidSignalError);
  CHECK_THROWS_AS(classify_engagement(reg, "goodreads", RawSignal::make_rating(6)),
                  InvalidSignalError);
  CHECK_THROWS_AS(classify_engagement(reg, "kuairec", RawSignal::make_watch_ratio(-0.2)),
                  InvalidSignalError);
}

TEST_CASE("classify_engagement is pure") {
  const MappingRegistry reg = MappingRegistry::with_defaults();
  for (int i = 0; i < 5; ++i) {
    CHECK(classify_engagement(reg, "synthetic", RawSignal::make_action("like")) ==
          EngagementClass::ExplicitPositive);
  }
}

TEST_CASE("overlapping watch intervals are rejected") {
  std::vector<SignalRule> rules;
  rules.push_back({.watch = SignalRule::Interval{.lo = 0.0, .hi = 0.5},
                   .cls = EngagementClass::ImplicitNegative});
  rules.push_back({.watch = SignalRule::Interval{.lo = 0.5, .hi = 1.0},
                   .cls = EngagementClass::ImplicitPositive});
  CHECK_THROWS_AS(SignalMapping("bad", std::move(rules)), ConfigError);
}

TEST_CASE("sample_users basics") {
  CHECK(sample_users({"u1", "u2", "u3"}, 5, 7).size() == 3);
  CHECK(sample_users({"u1", "u2", "u3"}, 0, 7).empty());

  // Permutation invariance and dedup.
  auto a = sample_users({"u1", "u2", "u3", "u4"}, 2, 7);
  auto b = sample_users({"u4", "u2", "u2", "u1", "u3"}, 2, 7);
  CHECK(a == b);
}

TEST_CASE("sample_users is deterministic at scale") {
  std::vector<std::string> ids;
  for (int i = 0; i < 1500; ++i) ids.push_back("user_" + std::to_string(i));
  auto first = sample_users(ids, 1000, 7);
  std::reverse(ids.begin(), ids.end());
  auto second = sample_users(ids, 1000, 7);
  CHECK(first.size() == 1000);
  CHECK(first == second);
  CHECK(sample_users(ids, 1000, 8) != first);  // seed matters
}

TEST_CASE("segment_history chunk arithmetic") {
  InteractionHistory history;
  history.user_id = "u";
  for (int i = 0; i < 250; ++i) {
    history.records.push_back(
        {make_record("u", "o" + std::to_string(i),
                     RawSignal::make_action("like"), 250 - i),
         EngagementClass::ExplicitPositive});
  }
  auto chunks = segment_history(history, 100);
  REQUIRE(chunks.size() == 3);
  CHECK(chunks[0].size() == 100);
  CHECK(chunks[1].size() == 100);
  CHECK(chunks[2].size() == 50);

  // Concatenation reproduces the history exactly.
  std::size_t offset = 0;
  for (const auto& chunk : chunks) {
    for (const auto& rec : chunk) {
      CHECK(rec.record.object_id == history.records[offset].record.object_id);
      ++offset;
    }
  }
  CHECK(offset == history.records.size());

  history.records.resize(100);
  CHECK(segment_history(history, 100).size() == 1);
  history.records.clear();
  CHECK(segment_history(history, 100).empty());
}

TEST_CASE("ingest_records classifies, dedups, sorts, and drops unmapped") {
  const MappingRegistry reg = MappingRegistry::with_defaults();
  std::vector<EngagementRecord> records;
  records.push_back(make_record("u1", "a", RawSignal::make_watch_ratio(0.95), 10));
  records.push_back(make_record("u1", "a", RawSignal::make_watch_ratio(0.95), 10));  // dup
  records.push_back(make_record("u1", "b", RawSignal::make_watch_ratio(0.1), 11));   // unmapped
  records.push_back(make_record("u1", "c", RawSignal::make_watch_ratio(0.5), 12));
  records.push_back(make_record("u1", "d", RawSignal::make_watch_ratio(0.5), 12));
  for (auto& rec : records) rec.dataset = "kuairec";

  IngestedDataset data = ingest_records("kuairec", records, reg, 10, 7);
  CHECK(data.stats.duplicates_collapsed == 1);
  CHECK(data.stats.dropped_unmapped == 1);
  CHECK(data.stats.records_kept == 3);
  REQUIRE(data.histories.size() == 1);
  const auto& recs = data.histories[0].records;
  REQUIRE(recs.size() == 3);
  // Most recent first; the timestamp tie (c, d) breaks by object_id ascending.
  CHECK(recs[0].record.object_id == "c");
  CHECK(recs[1].record.object_id == "d");
  CHECK(recs[2].record.object_id == "a");
}

TEST_CASE("chunk multiset equals classified history") {
  const MappingRegistry reg = MappingRegistry::with_defaults();
  std::vector<EngagementRecord> records;
  for (int i = 0; i < 137; ++i) {
    records.push_back(make_record("u", "o" + std::to_string(i),
                                  RawSignal::make_action(i % 3 ? "like" : "skip"),
                                  i % 17));
  }
  IngestedDataset data = ingest_records("sim", records, reg, 10, 7);
  REQUIRE(data.histories.size() == 1);
  std::multiset<std::string> all;
  for (const auto& rec : data.histories[0].records) {
    all.insert(rec.record.object_id);
  }
  std::multiset<std::string> chunked;
  for (const auto& chunk : segment_history(data.histories[0], 25)) {
    for (const auto& rec : chunk) chunked.insert(rec.record.object_id);
  }
  CHECK(all == chunked);
}

TEST_CASE("ingest_file validates structurally") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "gist_ingest_test";
  fs::create_directories(dir);
  const MappingRegistry reg = MappingRegistry::with_defaults();

  const fs::path good = dir / "good.jsonl";
  write_text_file(good,
      R"({"dataset":"goodreads","user_id":"u1","object_id":"b1","rating":5,"object_text":"space opera novel","timestamp":3})"
      "\n"
      R"({"dataset":"goodreads","user_id":"u1","object_id":"b2","rating":1,"object_text":"cookbook","timestamp":4})"
      "\n");
  IngestedDataset data = ingest_file(good, "goodreads", reg, 10, 7);
  CHECK(data.stats.records_kept == 2);
  CHECK(data.histories[0].records[0].cls == EngagementClass::ExplicitNegative);

  const fs::path bad_rating = dir / "bad_rating.jsonl";
  write_text_file(bad_rating,
      R"({"user_id":"u1","object_id":"b1","rating":0,"object_text":"x","timestamp":3})"
      "\n");
  CHECK_THROWS_AS(ingest_file(bad_rating, "goodreads", reg, 10, 7), IngestError);

  const fs::path empty_text = dir / "empty_text.jsonl";
  write_text_file(empty_text,
      R"({"user_id":"u1","object_id":"b1","rating":4,"object_text":"","timestamp":3})"
      "\n");
  CHECK_THROWS_AS(ingest_file(empty_text, "goodreads", reg, 10, 7), IngestError);

  const fs::path neg_ts = dir / "neg_ts.jsonl";
  write_text_file(neg_ts,
      R"({"user_id":"u1","object_id":"b1","rating":4,"object_text":"x","timestamp":-1})"
      "\n");
  CHECK_THROWS_AS(ingest_file(neg_ts, "goodreads", reg, 10, 7), IngestError);

  fs::remove_all(dir);
}
