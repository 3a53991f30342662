#include "gist/elicit.hpp"

#include "gist/errors.hpp"
#include "gist/hash.hpp"
#include "gist/io.hpp"

#include <doctest.h>

#include <filesystem>

using namespace gist;
using namespace gist::elicit;

namespace {

std::vector<ClassifiedRecord> make_chunk(std::size_t n) {
  std::vector<ClassifiedRecord> chunk;
  for (std::size_t i = 0; i < n; ++i) {
    ClassifiedRecord rec;
    rec.record.dataset = "sim";
    rec.record.user_id = "u";
    rec.record.object_id = "obj_" + std::to_string(i);
    rec.record.engagement_raw = RawSignal::make_action("like");
    rec.record.object_text = "text " + std::to_string(i);
    rec.record.timestamp = static_cast<std::int64_t>(n - i);
    rec.cls = EngagementClass::ExplicitPositive;
    chunk.push_back(std::move(rec));
  }
  return chunk;
}

}  // namespace

TEST_CASE("build_prompt renders numbered entries and the config thresholds") {
  gr::VerificationConfig config;
  auto chunk = make_chunk(3);
  PromptSpec spec = build_prompt(chunk, config);

  REQUIRE(spec.entries.size() == 3);
  CHECK(spec.entries[0].rfind("[0] (explicit_positive) text 0", 0) == 0);
  CHECK(spec.text.find("at least 3 implicit positive") != std::string::npos);
  CHECK(spec.text.find("at least 2 explicit positive") != std::string::npos);
  CHECK(spec.text.find("more than 3 implicit negative") != std::string::npos);
  CHECK(spec.text.find("more than 2 explicit negative") != std::string::npos);
  CHECK(spec.text.find("2-5 words") != std::string::npos);
  CHECK(spec.text.find("at most two interests") != std::string::npos);

  // Deterministic snapshot: identical inputs, identical text.
  CHECK(build_prompt(chunk, config).text == spec.text);
}

TEST_CASE("prompt thresholds track the verification config exactly") {
  Rng rng(123);
  auto chunk = make_chunk(1);
  for (int trial = 0; trial < 50; ++trial) {
    gr::VerificationConfig config;
    config.min_exp_pos = static_cast<int>(rng.bounded(5)) + 1;
    config.min_imp_pos = static_cast<int>(rng.bounded(5)) + 1;
    config.hybrid_exp = static_cast<int>(rng.bounded(config.min_exp_pos + 1));
    config.hybrid_imp = static_cast<int>(rng.bounded(config.min_imp_pos + 1));
    config.max_imp_neg = static_cast<int>(rng.bounded(6));
    config.max_exp_neg = static_cast<int>(rng.bounded(6));
    const std::string clause = build_prompt(chunk, config).threshold_clause;
    CHECK(clause.find("at least " + std::to_string(config.min_exp_pos) +
                      " explicit positive") != std::string::npos);
    CHECK(clause.find("at least " + std::to_string(config.min_imp_pos) +
                      " implicit positive") != std::string::npos);
    CHECK(clause.find("at least " + std::to_string(config.hybrid_exp) +
                      " explicit positive and " +
                      std::to_string(config.hybrid_imp) + " implicit") !=
          std::string::npos);
    CHECK(clause.find("more than " + std::to_string(config.max_imp_neg) +
                      " implicit negative") != std::string::npos);
    CHECK(clause.find("more than " + std::to_string(config.max_exp_neg) +
                      " explicit negative") != std::string::npos);
  }
}

TEST_CASE("build_prompt rejects an empty chunk") {
  gr::VerificationConfig config;
  CHECK_THROWS_AS(build_prompt({}, config), EmptyChunkError);
}

TEST_CASE("parse_response runs the shipped corpus") {
  const auto corpus =
      read_jsonl(std::filesystem::path(GIST_FIXTURE_DIR) / "parse_corpus.jsonl");
  REQUIRE(corpus.size() >= 20);
  for (const Json& fixture : corpus) {
    INFO("fixture: ", fixture.at("name").get<std::string>());
    const auto parsed = parse_response(fixture.at("raw").get<std::string>());
    if (fixture.value("unparsable", false)) {
      CHECK_FALSE(parsed.has_value());
      continue;
    }
    REQUIRE(parsed.has_value());
    const Json& expected = fixture.at("expected");
    REQUIRE(parsed->interests.size() == expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) {
      CHECK(parsed->interests[i].text == expected[i].at("text").get<std::string>());
      CHECK(parsed->interests[i].local_ids ==
            expected[i].at("ids").get<std::vector<int>>());
      CHECK(parsed->interests[i].flagged == expected[i].value("flagged", false));
    }
  }
}

TEST_CASE("cascade monotonicity: stage-k accepts stay identical without later stages") {
  const auto corpus =
      read_jsonl(std::filesystem::path(GIST_FIXTURE_DIR) / "parse_corpus.jsonl");
  for (const Json& fixture : corpus) {
    const std::string raw = fixture.at("raw").get<std::string>();
    const auto full = parse_response(raw, 3);
    if (!full) continue;
    const auto limited = parse_response(raw, full->stage);
    REQUIRE(limited.has_value());
    CHECK(limited->stage == full->stage);
    REQUIRE(limited->interests.size() == full->interests.size());
    for (std::size_t i = 0; i < full->interests.size(); ++i) {
      CHECK(limited->interests[i].text == full->interests[i].text);
      CHECK(limited->interests[i].local_ids == full->interests[i].local_ids);
    }
    if (full->stage > 1) CHECK_FALSE(parse_response(raw, full->stage - 1));
  }
}

TEST_CASE("resolve_fragment translates local ids and counts hallucinations") {
  auto chunk = make_chunk(3);
  ParsedFragment fragment;
  fragment.interests.push_back({"cats", {0, 2, 9, -1}, false});
  ProfileFragment resolved = resolve_fragment(fragment, chunk);
  CHECK(resolved.hallucinated_citations == 2);
  REQUIRE(resolved.interests.size() == 1);
  CHECK(resolved.interests[0].evidence_ids ==
        std::vector<std::string>{"obj_0", "obj_2"});
}

TEST_CASE("merge_chunks unions evidence by normalized text") {
  ProfileFragment a;
  a.interests.push_back({"NBA  Basketball", {"o1", "o2"}, false});
  ProfileFragment b;
  b.interests.push_back({"nba basketball", {"o3"}, false});
  b.interests.push_back({"cooking", {"o4"}, false});

  InterestProfile profile = merge_chunks({a, b}, "u1", "m1");
  REQUIRE(profile.interests.size() == 2);
  CHECK(profile.interests[0].text == "cooking");
  CHECK(profile.interests[1].text == "nba basketball");
  CHECK(profile.interests[1].evidence_ids ==
        std::vector<std::string>{"o1", "o2", "o3"});

  // Order-insensitive and associative over fragments.
  InterestProfile swapped = merge_chunks({b, a}, "u1", "m1");
  REQUIRE(swapped.interests.size() == profile.interests.size());
  for (std::size_t i = 0; i < profile.interests.size(); ++i) {
    CHECK(swapped.interests[i].text == profile.interests[i].text);
    CHECK(swapped.interests[i].evidence_ids == profile.interests[i].evidence_ids);
  }
}

TEST_CASE("merge_chunks flags and counts multi-cite violations") {
  ProfileFragment frag;
  frag.interests.push_back({"a", {"o1"}, false});
  frag.interests.push_back({"b", {"o1"}, false});
  frag.interests.push_back({"c", {"o1"}, false});
  frag.interests.push_back({"", {}, true});
  InterestProfile profile = merge_chunks({frag}, "u", "m");
  CHECK(profile.multi_cite_violations == 1);  // o1 cited by three interests
  bool found_flagged = false;
  for (const auto& interest : profile.interests) {
    if (interest.flagged) found_flagged = true;
  }
  CHECK(found_flagged);
}
