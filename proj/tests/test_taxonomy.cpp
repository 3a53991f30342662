#include "gist/taxonomy.hpp"

#include "gist/elicit.hpp"
#include "gist/errors.hpp"
#include "gist/io.hpp"

#include <doctest.h>

#include <filesystem>
#include <set>

using namespace gist;
using namespace gist::taxonomy;

namespace {

// Judge wrapper that counts batch mapping calls.
class CountingJudge : public judge::Judge {
 public:
  explicit CountingJudge(judge::Judge& inner) : inner_(inner) {}
  const std::string& id() const override { return inner_.id(); }
  bool relevance(const std::string& a, const std::string& b,
                 const std::string& c) override {
    return inner_.relevance(a, b, c);
  }
  std::vector<std::string> retrieve(const std::string& a, std::size_t n,
                                    std::span<const judge::Candidate> c) override {
    return inner_.retrieve(a, n, c);
  }
  bool overlap(const std::string& a, const std::string& b) override {
    return inner_.overlap(a, b);
  }
  std::vector<std::optional<std::string>> map_categories(
      std::span<const std::string> texts,
      std::span<const std::string> names) override {
    calls += texts.size();
    return inner_.map_categories(texts, names);
  }
  std::size_t calls = 0;

 private:
  judge::Judge& inner_;
};

}  // namespace

TEST_CASE("the shipped taxonomy has 325 categories across 35 domains") {
  const Taxonomy tax = Taxonomy::load(Taxonomy::default_path());
  CHECK(tax.categories().size() == 325);
  CHECK(tax.domain_count() == 35);
  CHECK(tax.by_name("Basketball") != nullptr);
  CHECK(tax.by_name("Baked Goods & Dessert") != nullptr);
  CHECK(tax.by_name("Soccer / Football") != nullptr);
  CHECK(tax.by_name("not a category") == nullptr);
  std::set<int> ids;
  for (const TaxonomyCategory& cat : tax.categories()) {
    CHECK(cat.id > 0);
    CHECK(ids.insert(cat.id).second);
  }
  CHECK(tax.category_name(kUnmappedCategoryId) == kUnmappedName);
}

TEST_CASE("collect_unique_interests dedups across models and users") {
  elicit::InterestProfile p1;
  p1.user_id = "u1";
  p1.source_model = "m1";
  p1.interests.push_back({"NBA draft picks", {"o1"}, false});
  elicit::InterestProfile p2;
  p2.user_id = "u2";
  p2.source_model = "m2";
  p2.interests.push_back({"nba  draft picks", {"o2"}, false});
  p2.interests.push_back({"cooking", {"o3"}, false});

  std::vector<elicit::InterestProfile> profiles = {p1, p2};
  auto unique = collect_unique_interests(profiles);
  CHECK(unique == std::vector<std::string>{"cooking", "nba draft picks"});
  CHECK(collect_unique_interests({}).empty());
}

TEST_CASE("map_interests assigns one category per text with caching") {
  const Taxonomy tax = Taxonomy::load(Taxonomy::default_path());

  judge::ScriptedJudge scripted;
  scripted.queue_category("Basketball");
  scripted.queue_category("Basketball");
  scripted.queue_category("Basketball");
  CountingJudge judge(scripted);

  AssignmentStore store;
  std::vector<std::string> texts = {"LeBron James", "NBA Draft Picks",
                                    "Lakers Trade Rumors"};
  auto assignments = map_interests(texts, judge, tax, 50, store);
  REQUIRE(assignments.size() == 3);
  const int basketball = tax.by_name("Basketball")->id;
  for (const auto& a : assignments) CHECK(a.category_id == basketball);
  CHECK(judge.calls == 3);

  // Cached texts never reach the judge again.
  auto again = map_interests(texts, judge, tax, 50, store);
  CHECK(judge.calls == 3);
  for (const auto& a : again) CHECK(a.category_id == basketball);
}

TEST_CASE("off-list responses retry once then go unmapped") {
  const Taxonomy tax = Taxonomy::load(Taxonomy::default_path());
  judge::ScriptedJudge scripted;
  scripted.queue_category("Not A Real Category");
  scripted.queue_category("Still Wrong");
  CountingJudge judge(scripted);

  AssignmentStore store;
  auto assignments = map_interests({"zxq gibberish"}, judge, tax, 50, store);
  REQUIRE(assignments.size() == 1);
  CHECK(assignments[0].category_id == kUnmappedCategoryId);
  CHECK(judge.calls == 2);  // initial + one retry
}

TEST_CASE("override file wins over judge assignments") {
  namespace fs = std::filesystem;
  const Taxonomy tax = Taxonomy::load(Taxonomy::default_path());
  const fs::path dir = fs::temp_directory_path() / "gist_tax_test";
  fs::create_directories(dir);
  const fs::path overrides = dir / "overrides.tsv";
  write_text_file(overrides, "Lakers Trade Rumors\tBasketball\n");

  judge::ScriptedJudge scripted;
  scripted.queue_category("Baseball");
  AssignmentStore store;
  store.load_overrides(overrides, tax);

  auto assignments = map_interests({"lakers trade rumors"}, scripted, tax, 50, store);
  REQUIRE(assignments.size() == 1);
  CHECK(assignments[0].category_id == tax.by_name("Basketball")->id);
  CHECK(assignments[0].source == CategoryAssignment::Source::Override);
  fs::remove_all(dir);
}

TEST_CASE("cache round-trips through its file format") {
  namespace fs = std::filesystem;
  const Taxonomy tax = Taxonomy::load(Taxonomy::default_path());
  const fs::path dir = fs::temp_directory_path() / "gist_tax_cache";
  fs::create_directories(dir);
  const fs::path cache = dir / "cache.tsv";

  AssignmentStore store;
  store.put("nba highlights", tax.by_name("Basketball")->id);
  store.put("zxq gibberish", kUnmappedCategoryId);
  store.save_cache(cache, tax);

  AssignmentStore loaded;
  loaded.load_cache(cache, tax);
  CHECK(loaded.lookup("nba highlights") == tax.by_name("Basketball")->id);
  CHECK(loaded.lookup("zxq gibberish") == kUnmappedCategoryId);
  CHECK_FALSE(loaded.lookup("missing").has_value());
  fs::remove_all(dir);
}
