#include "gist/elicit.hpp"

#include "gist/errors.hpp"
#include "gist/io.hpp"
#include "gist/text.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>

namespace gist::elicit {

namespace {

constexpr const char* kTextKeys[] = {"interest_text", "interest", "text", "name"};
constexpr const char* kEvidenceKeys[] = {"evidence_ids", "evidence", "object_ids",
                                         "objects"};

std::optional<int> parse_local_id(const Json& v) {
  if (v.is_number_integer()) return v.get<int>();
  if (v.is_string()) {
    // Accept "3" as well as labeled forms like "entry_3".
    const std::string s = v.get<std::string>();
    std::size_t i = 0;
    while (i < s.size() && !std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
    if (i == s.size()) return std::nullopt;
    std::size_t j = i;
    long value = 0;
    while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) {
      value = value * 10 + (s[j] - '0');
      if (value > 1'000'000) return std::nullopt;
      ++j;
    }
    return static_cast<int>(value);
  }
  return std::nullopt;
}

std::optional<ParsedInterest> interest_from_entry(const Json& entry) {
  ParsedInterest out;
  if (entry.is_string()) {
    out.text = entry.get<std::string>();
    out.flagged = true;  // no evidence cited
    return out;
  }
  if (!entry.is_object()) return std::nullopt;

  bool recognized = false;
  for (const char* key : kTextKeys) {
    if (entry.contains(key) && entry[key].is_string()) {
      out.text = entry[key].get<std::string>();
      recognized = true;
      break;
    }
  }
  std::set<int> ids;
  for (const char* key : kEvidenceKeys) {
    if (entry.contains(key) && entry[key].is_array()) {
      recognized = true;
      for (const Json& v : entry[key]) {
        if (std::optional<int> id = parse_local_id(v)) ids.insert(*id);
      }
      break;
    }
  }
  if (!recognized) return std::nullopt;
  out.local_ids.assign(ids.begin(), ids.end());
  out.flagged = out.text.empty() || out.local_ids.empty();
  return out;
}

// Accepts an array of entries, an object wrapping one under "interests",
// or a single entry object.
std::optional<std::vector<ParsedInterest>> fragment_from_json(const Json& doc) {
  const Json* entries = nullptr;
  if (doc.is_array()) {
    entries = &doc;
  } else if (doc.is_object()) {
    if (doc.contains("interests") && doc["interests"].is_array()) {
      entries = &doc["interests"];
    } else if (std::optional<ParsedInterest> single = interest_from_entry(doc)) {
      return std::vector<ParsedInterest>{std::move(*single)};
    } else {
      return std::nullopt;
    }
  } else {
    return std::nullopt;
  }

  std::vector<ParsedInterest> out;
  for (const Json& entry : *entries) {
    std::optional<ParsedInterest> parsed = interest_from_entry(entry);
    if (!parsed) return std::nullopt;  // alien entry: not our document
    out.push_back(std::move(*parsed));
  }
  return out;
}

std::optional<std::vector<ParsedInterest>> try_parse_strict(std::string_view text) {
  Json doc = Json::parse(text, nullptr, false);
  if (doc.is_discarded()) return std::nullopt;
  return fragment_from_json(doc);
}

// Finds the end (exclusive) of the balanced JSON value starting at `start`,
// honoring strings and escapes. npos when the value never closes.
std::size_t balanced_end(std::string_view text, std::size_t start) {
  int depth = 0;
  bool in_string = false;
  bool escaped = false;
  for (std::size_t i = start; i < text.size(); ++i) {
    char c = text[i];
    if (in_string) {
      if (escaped) escaped = false;
      else if (c == '\\') escaped = true;
      else if (c == '"') in_string = false;
      continue;
    }
    if (c == '"') in_string = true;
    else if (c == '{' || c == '[') ++depth;
    else if (c == '}' || c == ']') {
      --depth;
      if (depth == 0) return i + 1;
      if (depth < 0) return std::string_view::npos;
    }
  }
  return std::string_view::npos;
}

// First balanced JSON value embedded in prose that parses into a fragment.
std::optional<std::vector<ParsedInterest>> try_parse_embedded(std::string_view text) {
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '{' && text[i] != '[') continue;
    std::size_t end = balanced_end(text, i);
    if (end == std::string_view::npos) continue;
    if (auto fragment = try_parse_strict(text.substr(i, end - i))) return fragment;
    // Skip past this balanced-but-unusable value.
    i = end - 1;
  }
  return std::nullopt;
}

// Structural repair: cut leading prose, drop trailing commas, close an
// unterminated string and any unclosed brackets.
std::optional<std::vector<ParsedInterest>> try_parse_repaired(std::string_view text) {
  std::size_t start = text.find_first_of("{[");
  if (start == std::string_view::npos) return std::nullopt;
  text = text.substr(start);

  std::string fixed;
  fixed.reserve(text.size() + 8);
  std::vector<char> stack;
  bool in_string = false;
  bool escaped = false;

  auto drop_trailing_comma = [&] {
    std::size_t k = fixed.size();
    while (k > 0 && std::isspace(static_cast<unsigned char>(fixed[k - 1]))) --k;
    if (k > 0 && fixed[k - 1] == ',') fixed.erase(k - 1, 1);
  };

  for (char c : text) {
    if (in_string) {
      fixed.push_back(c);
      if (escaped) escaped = false;
      else if (c == '\\') escaped = true;
      else if (c == '"') in_string = false;
      continue;
    }
    switch (c) {
      case '"':
        in_string = true;
        fixed.push_back(c);
        break;
      case '{':
        stack.push_back('}');
        fixed.push_back(c);
        break;
      case '[':
        stack.push_back(']');
        fixed.push_back(c);
        break;
      case '}':
      case ']':
        if (stack.empty()) break;  // stray closer: drop it
        drop_trailing_comma();
        fixed.push_back(stack.back());  // normalizes mismatched closers
        stack.pop_back();
        break;
      default:
        fixed.push_back(c);
        break;
    }
    if (stack.empty() && !fixed.empty() && (fixed.back() == '}' || fixed.back() == ']')) {
      break;  // document complete; ignore trailing prose
    }
  }
  if (in_string) fixed.push_back('"');
  while (!stack.empty()) {
    drop_trailing_comma();
    fixed.push_back(stack.back());
    stack.pop_back();
  }
  return try_parse_strict(fixed);
}

}  // namespace

PromptSpec build_prompt(std::span<const ClassifiedRecord> chunk,
                        const gr::VerificationConfig& config) {
  if (chunk.empty()) throw EmptyChunkError("cannot build a prompt from an empty chunk");
  config.validate();

  PromptSpec spec;
  spec.entries.reserve(chunk.size());
  for (std::size_t i = 0; i < chunk.size(); ++i) {
    std::ostringstream entry;
    entry << "[" << i << "] (" << to_string(chunk[i].cls) << ") "
          << chunk[i].record.object_text;
    spec.entries.push_back(entry.str());
  }

  std::ostringstream thresholds;
  thresholds
      << "- An interest counts as grounded only if its cited evidence contains at least "
      << config.min_exp_pos << " explicit positive signals, or at least "
      << config.min_imp_pos << " implicit positive signals, or at least "
      << config.hybrid_exp << " explicit positive and " << config.hybrid_imp
      << " implicit positive signals combined.\n"
      << "- Do not claim an interest whose cited evidence includes more than "
      << config.max_imp_neg << " implicit negative signals or more than "
      << config.max_exp_neg << " explicit negative signals.";
  spec.threshold_clause = thresholds.str();

  spec.style_clause =
      "- State each interest in 2-5 words; be specific, not generic.\n"
      "- Cite the supporting entry numbers for every interest.\n"
      "- Associate each entry with at most two interests.";

  std::ostringstream text;
  text << "You are analyzing one user's engagement history with content items.\n"
       << "Each numbered entry shows the interaction type and the item's "
          "description.\n\nEngagements:\n";
  for (const std::string& entry : spec.entries) text << entry << "\n";
  text << "\nTask: identify the user's genuine interests from these engagements.\n"
       << "Requirements:\n"
       << spec.style_clause << "\n"
       << spec.threshold_clause << "\n\n"
       << "Respond with JSON only: a list of objects like\n"
       << "[{\"interest_text\": \"...\", \"evidence_ids\": [0, 2]}]\n";
  spec.text = text.str();
  return spec;
}

std::optional<ParsedFragment> parse_response(std::string_view raw, int max_stage) {
  if (max_stage >= 1) {
    if (auto interests = try_parse_strict(raw)) {
      return ParsedFragment{std::move(*interests), 1};
    }
  }
  if (max_stage >= 2) {
    if (auto interests = try_parse_embedded(raw)) {
      return ParsedFragment{std::move(*interests), 2};
    }
  }
  if (max_stage >= 3) {
    if (auto interests = try_parse_repaired(raw)) {
      return ParsedFragment{std::move(*interests), 3};
    }
  }
  return std::nullopt;
}

ProfileFragment resolve_fragment(const ParsedFragment& fragment,
                                 std::span<const ClassifiedRecord> chunk) {
  ProfileFragment out;
  for (const ParsedInterest& parsed : fragment.interests) {
    PredictedInterest interest;
    interest.text = parsed.text;
    std::set<std::string> ids;
    for (int local : parsed.local_ids) {
      if (local < 0 || static_cast<std::size_t>(local) >= chunk.size()) {
        ++out.hallucinated_citations;
        continue;
      }
      ids.insert(chunk[static_cast<std::size_t>(local)].record.object_id);
    }
    interest.evidence_ids.assign(ids.begin(), ids.end());
    interest.flagged = interest.text.empty() || interest.evidence_ids.empty();
    out.interests.push_back(std::move(interest));
  }
  return out;
}

InterestProfile merge_chunks(const std::vector<ProfileFragment>& fragments,
                             const std::string& user_id, const std::string& model) {
  InterestProfile profile;
  profile.user_id = user_id;
  profile.source_model = model;

  std::map<std::string, PredictedInterest> merged;  // by normalized text
  for (const ProfileFragment& fragment : fragments) {
    profile.hallucinated_citations += fragment.hallucinated_citations;
    for (const PredictedInterest& interest : fragment.interests) {
      std::string key = normalize_text(interest.text);
      auto [it, inserted] = merged.try_emplace(key);
      if (inserted) {
        it->second.text = key;
      }
      std::set<std::string> ids(it->second.evidence_ids.begin(),
                                it->second.evidence_ids.end());
      ids.insert(interest.evidence_ids.begin(), interest.evidence_ids.end());
      it->second.evidence_ids.assign(ids.begin(), ids.end());
    }
  }

  std::map<std::string, std::size_t> citations_per_object;
  for (auto& [key, interest] : merged) {
    interest.flagged = interest.text.empty() || interest.evidence_ids.empty();
    for (const std::string& id : interest.evidence_ids) ++citations_per_object[id];
    profile.interests.push_back(std::move(interest));
  }
  for (const auto& [object_id, n] : citations_per_object) {
    if (n > 2) ++profile.multi_cite_violations;
  }
  return profile;
}

}  // namespace gist::elicit
