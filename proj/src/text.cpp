#include "gist/text.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace gist {

namespace {

// Versioned stopword list. The mock judge's relevance and retrieval decisions
// depend on it, so changing it changes mock-judged scores; treat edits as a
// behavior change, not a cleanup.
constexpr std::array kStopwords = {
    "about", "above", "after", "again", "against", "all", "also", "and",
    "any",   "are",   "because", "been", "before", "being", "below",
    "between", "both", "but", "can", "could", "did", "does", "doing",
    "down",  "during", "each", "few", "for", "from", "had", "has", "have",
    "having", "her", "here", "hers", "him", "his", "how", "into", "its",
    "itself", "just", "may", "might", "more", "most", "must", "nor", "not",
    "once",  "only", "onto", "other", "our", "ours", "out", "over", "own",
    "same",  "shall", "she", "should", "some", "such", "than", "that", "the",
    "their", "theirs", "them", "then", "there", "these", "they", "this",
    "those", "through", "too", "under", "until", "very", "was", "were",
    "what",  "when", "where", "which", "while", "who", "whom", "whose",
    "why",   "will", "with", "would", "you", "your", "yours",
};

bool is_lower(char c) { return c >= 'a' && c <= 'z'; }
bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }
bool is_digit_c(char c) { return c >= '0' && c <= '9'; }
bool is_word_char(char c) { return is_lower(c) || is_upper(c) || is_digit_c(c); }
char to_lower_c(char c) { return is_upper(c) ? static_cast<char>(c - 'A' + 'a') : c; }

// Split one alphanumeric run at case and letter/digit boundaries.
void split_word_run(std::string_view run, std::vector<std::string>& out) {
  std::size_t start = 0;
  for (std::size_t i = 1; i <= run.size(); ++i) {
    bool boundary = (i == run.size());
    if (!boundary) {
      char prev = run[i - 1];
      char cur = run[i];
      if (is_lower(prev) && is_upper(cur)) boundary = true;
      else if (is_upper(prev) && is_upper(cur) && i + 1 < run.size() && is_lower(run[i + 1]))
        boundary = true;
      else if (is_digit_c(prev) != is_digit_c(cur)) boundary = true;
    }
    if (boundary) {
      std::string token(run.substr(start, i - start));
      std::transform(token.begin(), token.end(), token.begin(), to_lower_c);
      out.push_back(std::move(token));
      start = i;
    }
  }
}

}  // namespace

std::string normalize_text(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!out.empty()) pending_space = true;
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(to_lower_c(c));
  }
  return out;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    if (!is_word_char(text[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < text.size() && is_word_char(text[j])) ++j;
    split_word_run(text.substr(i, j - i), tokens);
    i = j;
  }
  return tokens;
}

bool is_stopword(std::string_view token) {
  return std::find(kStopwords.begin(), kStopwords.end(), token) != kStopwords.end();
}

std::set<std::string> content_tokens(std::string_view text) {
  std::set<std::string> out;
  for (std::string& t : tokenize(text)) {
    if (t.size() < 3 || is_stopword(t)) continue;
    out.insert(std::move(t));
  }
  return out;
}

std::size_t shared_token_count(const std::set<std::string>& a,
                               const std::set<std::string>& b) {
  const auto& small = a.size() <= b.size() ? a : b;
  const auto& large = a.size() <= b.size() ? b : a;
  std::size_t n = 0;
  for (const auto& t : small) n += large.count(t);
  return n;
}

}  // namespace gist
