#include "gist/ingest.hpp"

#include "gist/errors.hpp"
#include "gist/hash.hpp"
#include "gist/io.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace gist::ingest {

namespace {

SignalMapping ratings_mapping(std::string dataset) {
  std::vector<SignalRule> rules;
  rules.push_back({.ratings = {5}, .cls = EngagementClass::ExplicitPositive});
  rules.push_back({.ratings = {3, 4}, .cls = EngagementClass::ImplicitPositive});
  rules.push_back({.ratings = {1, 2}, .cls = EngagementClass::ExplicitNegative});
  return SignalMapping(std::move(dataset), std::move(rules));
}

std::vector<SignalRule> action_rules(bool with_dislike) {
  std::vector<SignalRule> rules;
  for (const char* name : {"like", "comment", "share", "save", "follow", "click"}) {
    rules.push_back({.action = name, .cls = EngagementClass::ExplicitPositive});
  }
  rules.push_back({.action = "watch", .cls = EngagementClass::ImplicitPositive});
  rules.push_back({.action = "watch_long", .cls = EngagementClass::ImplicitPositive});
  rules.push_back({.action = "skip", .cls = EngagementClass::ImplicitNegative});
  if (with_dislike) {
    rules.push_back({.action = "dislike", .cls = EngagementClass::ExplicitNegative});
  }
  return rules;
}

}  // namespace

SignalMapping::SignalMapping(std::string dataset, std::vector<SignalRule> rules)
    : dataset_(std::move(dataset)), rules_(std::move(rules)) {
  validate();
}

void SignalMapping::validate() const {
  std::map<std::string, EngagementClass> actions;
  std::map<int, EngagementClass> ratings;
  std::vector<const SignalRule::Interval*> intervals;
  for (const SignalRule& rule : rules_) {
    int matchers = (rule.action ? 1 : 0) + (rule.watch ? 1 : 0) +
                   (rule.ratings.empty() ? 0 : 1);
    if (matchers != 1) {
      throw ConfigError("mapping rule for '" + dataset_ +
                        "' must have exactly one matcher");
    }
    if (rule.action) {
      auto [it, inserted] = actions.emplace(*rule.action, rule.cls);
      if (!inserted && it->second != rule.cls) {
        throw ConfigError("conflicting action rule '" + *rule.action + "' in '" +
                          dataset_ + "'");
      }
    }
    for (int r : rule.ratings) {
      if (r < 1 || r > 5) {
        throw ConfigError("rating rule outside 1..5 in '" + dataset_ + "'");
      }
      auto [it, inserted] = ratings.emplace(r, rule.cls);
      if (!inserted && it->second != rule.cls) {
        throw ConfigError("conflicting rating rule in '" + dataset_ + "'");
      }
    }
    if (rule.watch) intervals.push_back(&*rule.watch);
  }
  for (std::size_t i = 0; i < intervals.size(); ++i) {
    for (std::size_t j = i + 1; j < intervals.size(); ++j) {
      // Two intervals overlap iff some probe value lands in both; checking
      // both endpoints of each suffices for half-open real intervals.
      for (const auto* iv : {intervals[i], intervals[j]}) {
        for (double probe : {iv->lo, iv->hi_unbounded ? iv->lo : iv->hi}) {
          if (intervals[i]->contains(probe) && intervals[j]->contains(probe)) {
            throw ConfigError("overlapping watch-ratio intervals in '" +
                              dataset_ + "'");
          }
        }
      }
    }
  }
}

std::optional<EngagementClass> SignalMapping::match(const RawSignal& raw) const {
  switch (raw.kind) {
    case RawSignal::Kind::WatchRatio:
      if (raw.watch_ratio < 0.0) {
        throw InvalidSignalError("negative watch ratio in '" + dataset_ + "'");
      }
      break;
    case RawSignal::Kind::Rating:
      if (raw.rating < 1 || raw.rating > 5) {
        throw InvalidSignalError("rating " + std::to_string(raw.rating) +
                                 " outside 1..5 in '" + dataset_ + "'");
      }
      break;
    case RawSignal::Kind::Action:
      break;
  }
  for (const SignalRule& rule : rules_) {
    switch (raw.kind) {
      case RawSignal::Kind::Action:
        if (rule.action && *rule.action == raw.action) return rule.cls;
        break;
      case RawSignal::Kind::WatchRatio:
        if (rule.watch && rule.watch->contains(raw.watch_ratio)) return rule.cls;
        break;
      case RawSignal::Kind::Rating:
        if (std::find(rule.ratings.begin(), rule.ratings.end(), raw.rating) !=
            rule.ratings.end()) {
          return rule.cls;
        }
        break;
    }
  }
  return std::nullopt;
}

void MappingRegistry::add(SignalMapping mapping) {
  std::string key = mapping.dataset();
  mappings_[key] = std::move(mapping);
}

bool MappingRegistry::has(const std::string& dataset) const {
  return mappings_.count(dataset) > 0;
}

const SignalMapping& MappingRegistry::get(const std::string& dataset) const {
  auto it = mappings_.find(dataset);
  if (it == mappings_.end()) {
    throw UnknownDatasetError("no signal mapping registered for '" + dataset + "'");
  }
  return it->second;
}

MappingRegistry MappingRegistry::with_defaults() {
  MappingRegistry reg;
  {
    std::vector<SignalRule> rules;
    rules.push_back({.watch = SignalRule::Interval{.lo = 0.9,
                                                   .lo_exclusive = true,
                                                   .hi_unbounded = true},
                     .cls = EngagementClass::ExplicitPositive});
    rules.push_back({.watch = SignalRule::Interval{.lo = 0.3, .hi = 0.9},
                     .cls = EngagementClass::ImplicitPositive});
    reg.add(SignalMapping("kuairec", std::move(rules)));
  }
  reg.add(ratings_mapping("amazon_music"));
  reg.add(ratings_mapping("goodreads"));
  {
    std::vector<SignalRule> rules;
    rules.push_back({.action = "click", .cls = EngagementClass::ExplicitPositive});
    rules.push_back({.action = "non_click", .cls = EngagementClass::ImplicitNegative});
    reg.add(SignalMapping("mind", std::move(rules)));
  }
  reg.add(SignalMapping("synthetic", action_rules(/*with_dislike=*/false)));
  reg.add(SignalMapping("sim", action_rules(/*with_dislike=*/true)));
  return reg;
}

EngagementClass classify_engagement(const MappingRegistry& registry,
                                    const std::string& dataset,
                                    const RawSignal& raw) {
  const SignalMapping& mapping = registry.get(dataset);
  std::optional<EngagementClass> cls = mapping.match(raw);
  if (!cls) {
    throw UnmappedSignalError("signal '" + raw.label() + "' unmapped in '" +
                              dataset + "'");
  }
  return *cls;
}

std::vector<std::string> sample_users(const std::vector<std::string>& user_ids,
                                      std::size_t max_users, std::uint64_t seed) {
  std::set<std::string> unique(user_ids.begin(), user_ids.end());
  std::vector<std::pair<std::uint64_t, std::string>> hashed;
  hashed.reserve(unique.size());
  for (const std::string& id : unique) {
    hashed.emplace_back(seeded_hash(seed, id), id);
  }
  std::sort(hashed.begin(), hashed.end());
  if (hashed.size() > max_users) hashed.resize(max_users);
  std::vector<std::string> out;
  out.reserve(hashed.size());
  for (auto& [h, id] : hashed) out.push_back(std::move(id));
  return out;
}

std::vector<std::span<const ClassifiedRecord>> segment_history(
    const InteractionHistory& history, std::size_t window) {
  if (window == 0) throw Error("segment window must be >= 1");
  std::vector<std::span<const ClassifiedRecord>> chunks;
  const auto& recs = history.records;
  for (std::size_t start = 0; start < recs.size(); start += window) {
    std::size_t len = std::min(window, recs.size() - start);
    chunks.emplace_back(recs.data() + start, len);
  }
  return chunks;
}

IngestedDataset ingest_records(const std::string& dataset,
                               std::vector<EngagementRecord> records,
                               const MappingRegistry& registry,
                               std::size_t max_users, std::uint64_t seed) {
  IngestedDataset out;
  out.dataset = dataset;
  out.stats.records_read = records.size();

  const SignalMapping& mapping = registry.get(dataset);

  std::unordered_map<std::string, std::vector<ClassifiedRecord>> per_user;
  std::unordered_set<std::string> seen_keys;
  for (EngagementRecord& rec : records) {
    std::string key = rec.dataset;
    key += '\x1f';
    key += rec.user_id;
    key += '\x1f';
    key += rec.object_id;
    key += '\x1f';
    key += std::to_string(rec.timestamp);
    if (!seen_keys.insert(std::move(key)).second) {
      ++out.stats.duplicates_collapsed;
      continue;
    }
    std::optional<EngagementClass> cls = mapping.match(rec.engagement_raw);
    if (!cls) {
      ++out.stats.dropped_unmapped;
      continue;
    }
    std::string user = rec.user_id;
    per_user[user].push_back(ClassifiedRecord{std::move(rec), *cls});
    ++out.stats.records_kept;
  }

  std::vector<std::string> all_users;
  all_users.reserve(per_user.size());
  for (const auto& [user, recs] : per_user) all_users.push_back(user);
  out.stats.users_total = all_users.size();

  std::vector<std::string> selected = sample_users(all_users, max_users, seed);
  out.stats.users_selected = selected.size();

  for (const std::string& user : selected) {
    InteractionHistory hist;
    hist.user_id = user;
    hist.records = std::move(per_user[user]);
    std::sort(hist.records.begin(), hist.records.end(),
              [](const ClassifiedRecord& a, const ClassifiedRecord& b) {
                if (a.record.timestamp != b.record.timestamp) {
                  return a.record.timestamp > b.record.timestamp;
                }
                return a.record.object_id < b.record.object_id;
              });
    out.histories.push_back(std::move(hist));
  }
  return out;
}

IngestedDataset ingest_file(const std::filesystem::path& path,
                            const std::string& dataset,
                            const MappingRegistry& registry,
                            std::size_t max_users, std::uint64_t seed) {
  std::vector<EngagementRecord> records;
  std::size_t line_no = 0;
  for_each_jsonl(path, [&](const Json& j) {
    ++line_no;
    auto context = [&] {
      return path.string() + " record " + std::to_string(line_no);
    };
    EngagementRecord rec;
    try {
      rec.dataset = j.value("dataset", dataset);
      rec.user_id = j.at("user_id").get<std::string>();
      rec.object_id = j.at("object_id").get<std::string>();
      rec.object_text = j.at("object_text").get<std::string>();
      rec.timestamp = j.at("timestamp").get<std::int64_t>();
      if (j.contains("engagement_type")) {
        rec.engagement_raw = RawSignal::make_action(j.at("engagement_type"));
      } else if (j.contains("watch_ratio")) {
        rec.engagement_raw = RawSignal::make_watch_ratio(j.at("watch_ratio"));
      } else if (j.contains("rating")) {
        rec.engagement_raw = RawSignal::make_rating(j.at("rating"));
      } else {
        throw IngestError(context() + ": no engagement field");
      }
    } catch (const Json::exception& e) {
      throw IngestError(context() + ": " + e.what());
    }
    if (rec.object_text.empty()) {
      throw IngestError(context() + ": empty object_text");
    }
    if (rec.timestamp < 0) {
      throw IngestError(context() + ": negative timestamp");
    }
    if (rec.engagement_raw.kind == RawSignal::Kind::Rating &&
        (rec.engagement_raw.rating < 1 || rec.engagement_raw.rating > 5)) {
      throw IngestError(context() + ": rating outside 1..5");
    }
    if (rec.engagement_raw.kind == RawSignal::Kind::WatchRatio &&
        rec.engagement_raw.watch_ratio < 0.0) {
      throw IngestError(context() + ": negative watch ratio");
    }
    records.push_back(std::move(rec));
  });
  return ingest_records(dataset, std::move(records), registry, max_users, seed);
}

}  // namespace gist::ingest
