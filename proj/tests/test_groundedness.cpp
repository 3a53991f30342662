#include "gist/groundedness.hpp"

#include "gist/elicit.hpp"
#include "gist/errors.hpp"

#include <doctest.h>

using namespace gist;
using namespace gist::gr;

namespace {

std::vector<EvidenceObject> evidence_from(std::initializer_list<EngagementClass> classes) {
  std::vector<EvidenceObject> out;
  int i = 0;
  for (EngagementClass cls : classes) {
    out.push_back({"o" + std::to_string(i++), "text", cls, "label"});
  }
  return out;
}

// Independent truth table: enumerates every way the predicate can pass,
// written as plain case analysis rather than the production boolean form.
bool oracle_verified(const SignalCounts& c, const VerificationConfig& v) {
  bool pos = false;
  if (c.exp_pos >= v.min_exp_pos) pos = true;
  if (c.imp_pos >= v.min_imp_pos) pos = true;
  if (c.exp_pos >= v.hybrid_exp && c.imp_pos >= v.hybrid_imp) pos = true;
  if (c.imp_neg > v.max_imp_neg) return false;
  if (c.exp_neg > v.max_exp_neg) return false;
  return pos;
}

}  // namespace

TEST_CASE("count_signals matches the worked examples") {
  using EC = EngagementClass;
  auto nba = evidence_from({EC::ExplicitPositive, EC::ImplicitPositive,
                            EC::ImplicitPositive, EC::ExplicitPositive});
  CHECK(count_signals(nba) == SignalCounts{2, 2, 0, 0});

  auto italian = evidence_from({EC::ImplicitPositive, EC::ImplicitNegative,
                                EC::ImplicitNegative, EC::ImplicitPositive});
  CHECK(count_signals(italian) == SignalCounts{0, 2, 0, 2});

  CHECK(count_signals({}) == SignalCounts{0, 0, 0, 0});
  CHECK(count_signals(nba).total() == 4);
}

TEST_CASE("verify matches the worked verdicts") {
  const VerificationConfig defaults;

  auto nba = verify({2, 2, 0, 0}, defaults);
  CHECK(nba.verified);
  CHECK(nba.failure_modes.empty());

  auto italian = verify({0, 2, 0, 2}, defaults);
  CHECK_FALSE(italian.verified);
  REQUIRE(italian.failure_modes.size() == 2);
  CHECK(italian.failure_modes[0] == FailureMode::InsufficientImplicitPositive);
  CHECK(italian.failure_modes[1] == FailureMode::InsufficientExplicitPositive);

  auto zero = verify({0, 0, 0, 0}, defaults);
  CHECK_FALSE(zero.verified);
  CHECK(zero.failure_modes.size() == 2);

  auto negs = verify({5, 0, 0, 5}, defaults);
  CHECK_FALSE(negs.verified);
  CHECK(std::count(negs.failure_modes.begin(), negs.failure_modes.end(),
                   FailureMode::ExcessiveNegative) == 1);
}

TEST_CASE("verify agrees with the truth-table oracle on all of {0..5}^4") {
  const VerificationConfig defaults;
  for (int ep = 0; ep <= 5; ++ep)
    for (int ip = 0; ip <= 5; ++ip)
      for (int en = 0; en <= 5; ++en)
        for (int in = 0; in <= 5; ++in) {
          const SignalCounts counts{ep, ip, en, in};
          const VerificationVerdict verdict = verify(counts, defaults);
          CHECK(verdict.verified == oracle_verified(counts, defaults));
          CHECK(verdict.verified == verdict.failure_modes.empty());
        }
}

TEST_CASE("verify monotonicity in positive and negative evidence") {
  const VerificationConfig defaults;
  for (int ep = 0; ep <= 4; ++ep)
    for (int ip = 0; ip <= 4; ++ip)
      for (int en = 0; en <= 4; ++en)
        for (int in = 0; in <= 4; ++in) {
          const bool base = verify({ep, ip, en, in}, defaults).verified;
          if (base) {
            CHECK(verify({ep + 1, ip, en, in}, defaults).verified);
            CHECK(verify({ep, ip + 1, en, in}, defaults).verified);
          } else {
            CHECK_FALSE(verify({ep, ip, en + 1, in}, defaults).verified);
            CHECK_FALSE(verify({ep, ip, en, in + 1}, defaults).verified);
          }
        }
}

TEST_CASE("verification config validation") {
  VerificationConfig bad;
  bad.hybrid_exp = 5;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = {};
  bad.max_imp_neg = -1;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  CHECK_NOTHROW(VerificationConfig{}.validate());
}

TEST_CASE("filter_evidence keeps judge-relevant and counts the rest") {
  judge::MockJudge mock;
  std::map<std::string, EvidenceObject> resolver;
  resolver["v1"] = {"v1", "#NBA dunk compilation", EngagementClass::ExplicitPositive,
                    "like"};
  resolver["v2"] = {"v2", "sourdough starter tips", EngagementClass::ImplicitPositive,
                    "watch_long"};
  resolver["v3"] = {"v3", "nba draft grades", EngagementClass::ImplicitPositive,
                    "watch_long"};

  elicit::PredictedInterest interest;
  interest.text = "NBA Basketball";
  interest.evidence_ids = {"ghost", "v1", "v2", "v3"};

  FilteredEvidence filtered = filter_evidence(interest, resolver, mock);
  CHECK(filtered.unresolved == 1);
  CHECK(filtered.dropped_irrelevant == 1);
  REQUIRE(filtered.kept.size() == 2);
  CHECK(filtered.kept[0].object_id == "v1");
  CHECK(filtered.kept[1].object_id == "v3");

  elicit::PredictedInterest empty;
  empty.text = "anything";
  CHECK(filter_evidence(empty, resolver, mock).kept.empty());
}
