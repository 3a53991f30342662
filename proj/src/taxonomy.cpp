#include "gist/taxonomy.hpp"

#include "gist/elicit.hpp"
#include "gist/errors.hpp"
#include "gist/hash.hpp"
#include "gist/io.hpp"
#include "gist/text.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace gist::taxonomy {

namespace {

std::vector<std::string> split_tsv(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, '\t')) fields.push_back(field);
  return fields;
}

}  // namespace

Taxonomy Taxonomy::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open taxonomy file " + path.string());

  Taxonomy tax;
  std::string content;
  std::string line;
  std::set<int> seen_ids;
  while (std::getline(in, line)) {
    content += line;
    content += '\n';
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> fields = split_tsv(line);
    if (fields.size() != 3) {
      throw ConfigError("taxonomy line must be id<TAB>domain<TAB>category: " + line);
    }
    TaxonomyCategory cat;
    cat.id = std::stoi(fields[0]);
    cat.domain = fields[1];
    cat.name = fields[2];
    if (cat.id <= 0) throw ConfigError("taxonomy ids must be positive");
    if (cat.domain.empty() || cat.name.empty()) {
      throw ConfigError("taxonomy domain/category must be non-empty");
    }
    if (!seen_ids.insert(cat.id).second) {
      throw ConfigError("duplicate taxonomy id " + fields[0]);
    }
    if (tax.by_name_.count(cat.name)) {
      throw ConfigError("duplicate taxonomy category '" + cat.name + "'");
    }
    tax.by_name_[cat.name] = tax.categories_.size();
    tax.by_id_[cat.id] = tax.categories_.size();
    tax.categories_.push_back(std::move(cat));
  }
  if (tax.categories_.empty()) throw ConfigError("taxonomy file is empty");
  tax.content_hash_ = fnv1a64(content);
  return tax;
}

std::filesystem::path Taxonomy::default_path() {
  return std::filesystem::path(GIST_DATA_DIR) / "taxonomy.tsv";
}

std::size_t Taxonomy::domain_count() const {
  std::set<std::string> domains;
  for (const TaxonomyCategory& cat : categories_) domains.insert(cat.domain);
  return domains.size();
}

const TaxonomyCategory* Taxonomy::by_id(int id) const {
  auto it = by_id_.find(id);
  return it == by_id_.end() ? nullptr : &categories_[it->second];
}

const TaxonomyCategory* Taxonomy::by_name(const std::string& name) const {
  auto it = by_name_.find(name);
  return it == by_name_.end() ? nullptr : &categories_[it->second];
}

std::string Taxonomy::category_name(int id) const {
  if (id == kUnmappedCategoryId) return kUnmappedName;
  const TaxonomyCategory* cat = by_id(id);
  if (!cat) throw Error("unknown category id " + std::to_string(id));
  return cat->name;
}

std::vector<std::string> Taxonomy::category_names() const {
  std::vector<std::string> names;
  names.reserve(categories_.size());
  for (const TaxonomyCategory& cat : categories_) names.push_back(cat.name);
  return names;
}

void AssignmentStore::load_cache(const std::filesystem::path& path,
                                 const Taxonomy& taxonomy) {
  if (!std::filesystem::exists(path)) return;
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::size_t tab = line.find('\t');
    if (tab == std::string::npos) continue;
    const std::string text = line.substr(0, tab);
    const std::string name = line.substr(tab + 1);
    if (name == kUnmappedName) {
      cached_[text] = kUnmappedCategoryId;
    } else if (const TaxonomyCategory* cat = taxonomy.by_name(name)) {
      cached_[text] = cat->id;
    }
    // Entries naming categories absent from the current taxonomy are ignored;
    // they will be re-judged.
  }
}

void AssignmentStore::save_cache(const std::filesystem::path& path,
                                 const Taxonomy& taxonomy) const {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot write taxonomy cache " + path.string());
  for (const auto& [text, id] : cached_) {
    out << text << '\t' << taxonomy.category_name(id) << '\n';
  }
}

void AssignmentStore::load_overrides(const std::filesystem::path& path,
                                     const Taxonomy& taxonomy) {
  if (!std::filesystem::exists(path)) return;
  std::ifstream in(path);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) +
                        ": override line must be text<TAB>category");
    }
    const std::string text = normalize_text(line.substr(0, tab));
    const std::string name = line.substr(tab + 1);
    if (name == kUnmappedName) {
      overrides_[text] = kUnmappedCategoryId;
      continue;
    }
    const TaxonomyCategory* cat = taxonomy.by_name(name);
    if (!cat) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) +
                        ": unknown category '" + name + "'");
    }
    overrides_[text] = cat->id;
  }
}

std::optional<int> AssignmentStore::lookup(const std::string& normalized_text) const {
  if (auto it = overrides_.find(normalized_text); it != overrides_.end()) {
    return it->second;
  }
  if (auto it = cached_.find(normalized_text); it != cached_.end()) {
    return it->second;
  }
  return std::nullopt;
}

bool AssignmentStore::is_override(const std::string& normalized_text) const {
  return overrides_.count(normalized_text) > 0;
}

void AssignmentStore::put(const std::string& normalized_text, int category_id) {
  cached_[normalized_text] = category_id;
}

std::vector<std::string> collect_unique_interests(
    std::span<const elicit::InterestProfile> profiles) {
  std::set<std::string> unique;
  for (const elicit::InterestProfile& profile : profiles) {
    for (const elicit::PredictedInterest& interest : profile.interests) {
      unique.insert(normalize_text(interest.text));
    }
  }
  return {unique.begin(), unique.end()};
}

std::vector<CategoryAssignment> map_interests(const std::vector<std::string>& texts,
                                              judge::Judge& judge,
                                              const Taxonomy& taxonomy,
                                              std::size_t batch_size,
                                              AssignmentStore& store) {
  if (batch_size == 0) batch_size = 1;
  const std::vector<std::string> category_names = taxonomy.category_names();

  std::vector<std::string> pending;
  for (const std::string& raw : texts) {
    const std::string text = normalize_text(raw);
    if (!store.lookup(text)) pending.push_back(text);
  }
  std::sort(pending.begin(), pending.end());
  pending.erase(std::unique(pending.begin(), pending.end()), pending.end());

  for (std::size_t start = 0; start < pending.size(); start += batch_size) {
    const std::size_t len = std::min(batch_size, pending.size() - start);
    std::span<const std::string> batch(pending.data() + start, len);
    std::vector<std::optional<std::string>> answers =
        judge.map_categories(batch, category_names);

    for (std::size_t i = 0; i < len; ++i) {
      std::optional<std::string> answer =
          i < answers.size() ? answers[i] : std::nullopt;
      const TaxonomyCategory* cat =
          answer ? taxonomy.by_name(*answer) : nullptr;
      if (!cat) {
        // One retry for an off-list or missing response, then Unmapped.
        std::vector<std::optional<std::string>> retry =
            judge.map_categories({&batch[i], 1}, category_names);
        if (!retry.empty() && retry[0]) cat = taxonomy.by_name(*retry[0]);
      }
      store.put(batch[i], cat ? cat->id : kUnmappedCategoryId);
    }
  }

  std::vector<CategoryAssignment> out;
  out.reserve(texts.size());
  std::set<std::string> emitted;
  for (const std::string& raw : texts) {
    const std::string text = normalize_text(raw);
    if (!emitted.insert(text).second) continue;
    CategoryAssignment assignment;
    assignment.interest_text = text;
    assignment.category_id = store.lookup(text).value_or(kUnmappedCategoryId);
    assignment.source = store.is_override(text) ? CategoryAssignment::Source::Override
                                                : CategoryAssignment::Source::Judge;
    out.push_back(std::move(assignment));
  }
  return out;
}

void export_audit(const std::filesystem::path& path, const AssignmentStore& store,
                  const Taxonomy& taxonomy, const std::string& header_comment) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot write audit export " + path.string());
  if (!header_comment.empty()) out << "# " << header_comment << '\n';
  for (const auto& [text, id] : store.entries()) {
    out << text << '\t' << taxonomy.category_name(id) << '\n';
  }
}

}  // namespace gist::taxonomy
