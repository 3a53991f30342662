#include "gist/hash.hpp"
#include "gist/text.hpp"

#include <doctest.h>

#include <algorithm>
#include <set>

using namespace gist;

TEST_CASE("fnv1a64 is stable and order-sensitive") {
  CHECK(fnv1a64("") == kFnv64Offset);
  CHECK(fnv1a64("abc") == fnv1a64("abc"));
  CHECK(fnv1a64("abc") != fnv1a64("acb"));
  CHECK(seeded_hash(1, "user") != seeded_hash(2, "user"));
}

TEST_CASE("derive_seed separates part boundaries") {
  CHECK(derive_seed(7, {"ab", "c"}) != derive_seed(7, {"a", "bc"}));
  CHECK(derive_seed(7, {"x"}) != derive_seed(8, {"x"}));
  CHECK(derive_seed(7, {"x"}) == derive_seed(7, {"x"}));
}

TEST_CASE("rng bounded stays in range and replays") {
  Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) {
    std::uint64_t v = a.bounded(13);
    CHECK(v < 13);
    CHECK(v == b.bounded(13));
  }
}

TEST_CASE("shuffle is a seeded permutation") {
  std::vector<int> v(50);
  for (int i = 0; i < 50; ++i) v[i] = i;
  std::vector<int> w = v;
  Rng(99).shuffle(v);
  Rng(99).shuffle(w);
  CHECK(v == w);
  std::sort(w.begin(), w.end());
  for (int i = 0; i < 50; ++i) CHECK(w[i] == i);
}

TEST_CASE("sample_indices returns distinct in-range indices") {
  Rng rng(5);
  auto picks = rng.sample_indices(100, 10);
  CHECK(picks.size() == 10);
  std::set<std::size_t> unique(picks.begin(), picks.end());
  CHECK(unique.size() == 10);
  for (std::size_t p : picks) CHECK(p < 100);
  CHECK(Rng(5).sample_indices(100, 10) == picks);
  CHECK(Rng(5).sample_indices(3, 10).size() == 3);
}

TEST_CASE("tokenize splits hashtags and case boundaries") {
  auto t = tokenize("#NBAPlayoffs Conference finals recap");
  CHECK(t == std::vector<std::string>{"nba", "playoffs", "conference", "finals",
                                      "recap"});
  CHECK(tokenize("top10 plays") == std::vector<std::string>{"top", "10", "plays"});
  CHECK(tokenize("LeBron's dunk") == std::vector<std::string>{"le", "bron", "s",
                                                              "dunk"});
}

TEST_CASE("content_tokens drops stopwords and short tokens") {
  auto tokens = content_tokens("The dunk of the week vs all");
  CHECK(tokens.count("dunk") == 1);
  CHECK(tokens.count("week") == 1);
  CHECK(tokens.count("the") == 0);
  CHECK(tokens.count("vs") == 0);
  CHECK(tokens.count("all") == 0);
}

TEST_CASE("normalize_text folds case and whitespace") {
  CHECK(normalize_text("  NBA   Basketball\tHighlights ") ==
        "nba basketball highlights");
  CHECK(normalize_text("") == "");
}
