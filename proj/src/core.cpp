#include "gist/core.hpp"

#include "gist/hash.hpp"

#include <cstdio>

namespace gist {

std::string_view to_string(EngagementClass cls) {
  switch (cls) {
    case EngagementClass::ExplicitPositive: return "explicit_positive";
    case EngagementClass::ImplicitPositive: return "implicit_positive";
    case EngagementClass::ExplicitNegative: return "explicit_negative";
    case EngagementClass::ImplicitNegative: return "implicit_negative";
  }
  return "unknown";
}

std::optional<EngagementClass> engagement_class_from(std::string_view name) {
  for (EngagementClass cls : kAllEngagementClasses) {
    if (to_string(cls) == name) return cls;
  }
  return std::nullopt;
}

std::string RawSignal::label() const {
  char buf[48];
  switch (kind) {
    case Kind::Action:
      return action;
    case Kind::WatchRatio:
      std::snprintf(buf, sizeof(buf), "watch_ratio=%g", watch_ratio);
      return buf;
    case Kind::Rating:
      std::snprintf(buf, sizeof(buf), "rating=%d", rating);
      return buf;
  }
  return {};
}

std::string hex16(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace gist
