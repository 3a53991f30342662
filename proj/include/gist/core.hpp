#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gist {

// Two-axis engagement taxonomy: valence x explicitness.
enum class EngagementClass {
  ExplicitPositive = 0,
  ImplicitPositive = 1,
  ExplicitNegative = 2,
  ImplicitNegative = 3,
};

inline constexpr std::array<EngagementClass, 4> kAllEngagementClasses = {
    EngagementClass::ExplicitPositive,
    EngagementClass::ImplicitPositive,
    EngagementClass::ExplicitNegative,
    EngagementClass::ImplicitNegative,
};

std::string_view to_string(EngagementClass cls);
std::optional<EngagementClass> engagement_class_from(std::string_view name);

inline bool is_positive(EngagementClass cls) {
  return cls == EngagementClass::ExplicitPositive ||
         cls == EngagementClass::ImplicitPositive;
}

inline bool is_explicit(EngagementClass cls) {
  return cls == EngagementClass::ExplicitPositive ||
         cls == EngagementClass::ExplicitNegative;
}

// A raw engagement signal as it appears in a source dataset: an action name
// ("like", "skip"), a watch ratio in [0, inf), or a 1-5 star rating.
struct RawSignal {
  enum class Kind { Action, WatchRatio, Rating };

  Kind kind = Kind::Action;
  std::string action;
  double watch_ratio = 0.0;
  int rating = 0;

  static RawSignal make_action(std::string name) {
    RawSignal s;
    s.kind = Kind::Action;
    s.action = std::move(name);
    return s;
  }
  static RawSignal make_watch_ratio(double ratio) {
    RawSignal s;
    s.kind = Kind::WatchRatio;
    s.watch_ratio = ratio;
    return s;
  }
  static RawSignal make_rating(int stars) {
    RawSignal s;
    s.kind = Kind::Rating;
    s.rating = stars;
    return s;
  }

  // Printable descriptor, e.g. "like", "watch_ratio=0.95", "rating=4".
  std::string label() const;
};

// One interaction in the unified schema shared by every dataset.
struct EngagementRecord {
  std::string dataset;
  std::string user_id;
  std::string object_id;
  RawSignal engagement_raw;
  std::string object_text;
  std::int64_t timestamp = 0;
};

struct ClassifiedRecord {
  EngagementRecord record;
  EngagementClass cls = EngagementClass::ImplicitPositive;
};

// A user's records sorted most-recent-first (timestamp descending,
// ties by object_id ascending).
struct InteractionHistory {
  std::string user_id;
  std::vector<ClassifiedRecord> records;
};

}  // namespace gist
