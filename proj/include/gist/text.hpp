#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace gist {

// Case-fold (ASCII) and collapse whitespace runs to single spaces.
// This is the canonical form for interest-text dedup and cache keys.
std::string normalize_text(std::string_view text);

// Lowercased word tokens. Splits on non-alphanumerics and on intra-word case
// boundaries, so "#NBAPlayoffs" yields {"nba", "playoffs"} and "top10" yields
// {"top", "10"}.
std::vector<std::string> tokenize(std::string_view text);

bool is_stopword(std::string_view token);

// Tokens that carry content: stopwords and tokens shorter than 3 characters
// are removed. This set is what the mock judge compares.
std::set<std::string> content_tokens(std::string_view text);

std::size_t shared_token_count(const std::set<std::string>& a,
                               const std::set<std::string>& b);

}  // namespace gist
