#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gist/core.hpp"
#include "gist/groundedness.hpp"

namespace gist::elicit {

// A short free-text interest with the global object ids it cites.
struct PredictedInterest {
  std::string text;
  std::vector<std::string> evidence_ids;  // sorted, deduplicated
  // Empty text or no usable evidence; kept so it can fail verification.
  bool flagged = false;
};

struct InterestProfile {
  std::string user_id;
  std::string source_model;
  std::vector<PredictedInterest> interests;  // normalized-text ascending
  std::size_t unparsable_chunks = 0;
  std::size_t hallucinated_citations = 0;  // cited ids not present in any prompt
  std::size_t multi_cite_violations = 0;   // objects cited by >2 interests
};

struct PromptSpec {
  std::vector<std::string> entries;
  std::string threshold_clause;
  std::string style_clause;
  std::string text;
};

// Renders the generation prompt for one history chunk. Entries are numbered
// from 0 in chunk order; the threshold sentence is generated from the same
// VerificationConfig the verifier will enforce, so instruction and evaluation
// cannot diverge. Throws EmptyChunkError.
PromptSpec build_prompt(std::span<const ClassifiedRecord> chunk,
                        const gr::VerificationConfig& config);

struct ParsedInterest {
  std::string text;
  std::vector<int> local_ids;  // prompt entry numbers, deduplicated
  bool flagged = false;
};

struct ParsedFragment {
  std::vector<ParsedInterest> interests;
  int stage = 1;  // cascade stage that accepted the text (1..3)
};

// Best-effort extraction of the response document.
//   stage 1  strict parse of the whole text
//   stage 2  first balanced JSON value embedded in prose
//   stage 3  structural repair (trailing commas, unclosed brackets/strings)
// nullopt = unparsable; the generation is excluded from metrics and counted.
// max_stage limits the cascade (used to test stage monotonicity).
std::optional<ParsedFragment> parse_response(std::string_view raw, int max_stage = 3);

struct ProfileFragment {
  std::vector<PredictedInterest> interests;
  std::size_t hallucinated_citations = 0;
};

// Translates chunk-local entry numbers into global object ids. Out-of-range
// citations are dropped and counted.
ProfileFragment resolve_fragment(const ParsedFragment& fragment,
                                 std::span<const ClassifiedRecord> chunk);

// Deterministic reduction: interests with the same normalized text merge by
// evidence union; output is ordered by normalized text. Associative and
// order-insensitive over fragments.
InterestProfile merge_chunks(const std::vector<ProfileFragment>& fragments,
                             const std::string& user_id, const std::string& model);

}  // namespace gist::elicit
