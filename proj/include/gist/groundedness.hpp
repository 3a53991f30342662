#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "gist/core.hpp"
#include "gist/judge.hpp"

namespace gist::elicit {
struct PredictedInterest;
}

namespace gist::gr {

struct SignalCounts {
  int exp_pos = 0;
  int imp_pos = 0;
  int exp_neg = 0;
  int imp_neg = 0;

  int total() const { return exp_pos + imp_pos + exp_neg + imp_neg; }
  bool operator==(const SignalCounts&) const = default;
};

// The dataset-specific verification predicate's thresholds. Defaults: >=2
// explicit positives, or >=3 implicit positives, or the 1-explicit +
// 2-implicit hybrid; at most 3 implicit negatives and 2 explicit negatives.
struct VerificationConfig {
  int min_exp_pos = 2;
  int min_imp_pos = 3;
  int hybrid_exp = 1;
  int hybrid_imp = 2;
  int max_imp_neg = 3;
  int max_exp_neg = 2;
  std::string dataset;

  void validate() const;  // throws ConfigError
};

enum class FailureMode {
  InsufficientImplicitPositive,
  InsufficientExplicitPositive,
  ExcessiveNegative,
};

std::string_view to_string(FailureMode mode);

struct VerificationVerdict {
  bool verified = false;
  std::vector<FailureMode> failure_modes;  // empty iff verified
  SignalCounts counts;
  int dropped_evidence = 0;     // removed by judge relevance filtering
  int unresolved_citations = 0; // cited ids that resolve to no object
};

struct EvidenceObject {
  std::string object_id;
  std::string object_text;
  EngagementClass cls = EngagementClass::ImplicitPositive;
  std::string engagement_label;
};

struct FilteredEvidence {
  std::vector<EvidenceObject> kept;
  int dropped_irrelevant = 0;
  int unresolved = 0;
};

// Resolves the interest's cited ids against the user's history and keeps the
// objects the judge deems relevant. Unresolvable ids (hallucinated citations)
// are dropped and counted.
FilteredEvidence filter_evidence(const elicit::PredictedInterest& interest,
                                 const std::map<std::string, EvidenceObject>& resolver,
                                 judge::Judge& judge);

SignalCounts count_signals(std::span<const EvidenceObject> evidence);

// positive_ok: exp_pos >= min_exp_pos, or imp_pos >= min_imp_pos, or the
// hybrid (exp_pos >= hybrid_exp and imp_pos >= hybrid_imp).
// negative_ok: imp_neg <= max_imp_neg and exp_neg <= max_exp_neg.
// Failure modes are non-exclusive and reported only for unverified interests.
VerificationVerdict verify(const SignalCounts& counts,
                           const VerificationConfig& config);

}  // namespace gist::gr
