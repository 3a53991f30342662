#include "gist/groundedness.hpp"

#include "gist/elicit.hpp"
#include "gist/errors.hpp"

namespace gist::gr {

void VerificationConfig::validate() const {
  for (int v : {min_exp_pos, min_imp_pos, hybrid_exp, hybrid_imp, max_imp_neg,
                max_exp_neg}) {
    if (v < 0) throw ConfigError("verification thresholds must be >= 0");
  }
  if (hybrid_exp > min_exp_pos || hybrid_imp > min_imp_pos) {
    throw ConfigError("hybrid thresholds must not exceed the standalone ones");
  }
}

std::string_view to_string(FailureMode mode) {
  switch (mode) {
    case FailureMode::InsufficientImplicitPositive: return "insufficient_implicit_positive";
    case FailureMode::InsufficientExplicitPositive: return "insufficient_explicit_positive";
    case FailureMode::ExcessiveNegative: return "excessive_negative";
  }
  return "unknown";
}

FilteredEvidence filter_evidence(const elicit::PredictedInterest& interest,
                                 const std::map<std::string, EvidenceObject>& resolver,
                                 judge::Judge& judge) {
  FilteredEvidence out;
  for (const std::string& id : interest.evidence_ids) {
    auto it = resolver.find(id);
    if (it == resolver.end()) {
      ++out.unresolved;
      continue;
    }
    const EvidenceObject& obj = it->second;
    if (judge.relevance(interest.text, obj.object_text, obj.engagement_label)) {
      out.kept.push_back(obj);
    } else {
      ++out.dropped_irrelevant;
    }
  }
  return out;
}

SignalCounts count_signals(std::span<const EvidenceObject> evidence) {
  SignalCounts counts;
  for (const EvidenceObject& obj : evidence) {
    switch (obj.cls) {
      case EngagementClass::ExplicitPositive: ++counts.exp_pos; break;
      case EngagementClass::ImplicitPositive: ++counts.imp_pos; break;
      case EngagementClass::ExplicitNegative: ++counts.exp_neg; break;
      case EngagementClass::ImplicitNegative: ++counts.imp_neg; break;
    }
  }
  return counts;
}

VerificationVerdict verify(const SignalCounts& counts,
                           const VerificationConfig& config) {
  VerificationVerdict verdict;
  verdict.counts = counts;

  const bool positive_ok =
      counts.exp_pos >= config.min_exp_pos ||
      counts.imp_pos >= config.min_imp_pos ||
      (counts.exp_pos >= config.hybrid_exp && counts.imp_pos >= config.hybrid_imp);
  const bool negative_ok =
      counts.imp_neg <= config.max_imp_neg && counts.exp_neg <= config.max_exp_neg;

  verdict.verified = positive_ok && negative_ok;
  if (!verdict.verified) {
    if (counts.imp_pos < config.min_imp_pos) {
      verdict.failure_modes.push_back(FailureMode::InsufficientImplicitPositive);
    }
    if (counts.exp_pos < config.min_exp_pos) {
      verdict.failure_modes.push_back(FailureMode::InsufficientExplicitPositive);
    }
    if (!negative_ok) {
      verdict.failure_modes.push_back(FailureMode::ExcessiveNegative);
    }
  }
  return verdict;
}

}  // namespace gist::gr
