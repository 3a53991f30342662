#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gist/judge.hpp"

namespace gist::elicit {
struct InterestProfile;
}

namespace gist::taxonomy {

// Category id 0 is the reserved bucket for interests no judge response could
// place; such interests still verify and score, they just share one bucket.
inline constexpr int kUnmappedCategoryId = 0;
inline constexpr const char* kUnmappedName = "(unmapped)";

struct TaxonomyCategory {
  int id = 0;
  std::string domain;
  std::string name;
};

// The interest-category scheme (shipped file: data/taxonomy.tsv, 325
// categories across 35 domains). Domains are display grouping only; all
// scoring is per category.
class Taxonomy {
 public:
  static Taxonomy load(const std::filesystem::path& path);
  static std::filesystem::path default_path();

  const std::vector<TaxonomyCategory>& categories() const { return categories_; }
  std::size_t domain_count() const;

  const TaxonomyCategory* by_id(int id) const;
  const TaxonomyCategory* by_name(const std::string& name) const;

  std::string category_name(int id) const;  // "(unmapped)" for id 0
  std::vector<std::string> category_names() const;

  std::uint64_t content_hash() const { return content_hash_; }

 private:
  std::vector<TaxonomyCategory> categories_;
  std::map<std::string, std::size_t> by_name_;
  std::map<int, std::size_t> by_id_;
  std::uint64_t content_hash_ = 0;
};

struct CategoryAssignment {
  std::string interest_text;  // normalized
  int category_id = kUnmappedCategoryId;
  enum class Source { Judge, Override } source = Source::Judge;
};

// Normalized-text -> category cache shared across models and users; the same
// interest string always maps to the same category. Line format:
// "<normalized text>\t<category name>".
class AssignmentStore {
 public:
  void load_cache(const std::filesystem::path& path, const Taxonomy& taxonomy);
  void save_cache(const std::filesystem::path& path, const Taxonomy& taxonomy) const;
  void load_overrides(const std::filesystem::path& path, const Taxonomy& taxonomy);

  std::optional<int> lookup(const std::string& normalized_text) const;
  bool is_override(const std::string& normalized_text) const;
  void put(const std::string& normalized_text, int category_id);

  const std::map<std::string, int>& entries() const { return cached_; }

 private:
  std::map<std::string, int> cached_;
  std::map<std::string, int> overrides_;
};

// Globally unique normalized interest texts across all profiles, sorted.
std::vector<std::string> collect_unique_interests(
    std::span<const elicit::InterestProfile> profiles);

// Assigns one category per text: cache first, then the judge in batches
// (invalid responses retried once, then Unmapped), manual overrides last.
std::vector<CategoryAssignment> map_interests(const std::vector<std::string>& texts,
                                              judge::Judge& judge,
                                              const Taxonomy& taxonomy,
                                              std::size_t batch_size,
                                              AssignmentStore& store);

// Every (text -> category) pair, line-delimited, for human review.
void export_audit(const std::filesystem::path& path, const AssignmentStore& store,
                  const Taxonomy& taxonomy, const std::string& header_comment);

}  // namespace gist::taxonomy
