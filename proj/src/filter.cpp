#include "socialoam/filter.hpp"

#include <algorithm>
#include <functional>

#include <fmt/format.h>

#include "socialoam/errors.hpp"
#include "socialoam/geodesy.hpp"
#include "socialoam/similarity.hpp"

namespace socialoam {
namespace {

using Predicate = std::function<std::optional<std::string>(const SocialEvent&)>;

// Applies a drop predicate (returning the reason to drop, if any).
FilterResult partition(std::vector<SocialEvent> events, FilterStage stage, const Predicate& drop_reason) {
  FilterResult result;
  result.kept.reserve(events.size());
  for (auto& e : events) {
    if (auto reason = drop_reason(e)) {
      result.dropped.push_back({e.event_id, stage, std::move(*reason)});
      result.penalized.push_back(std::move(e));
    } else {
      result.kept.push_back(std::move(e));
    }
  }
  return result;
}

std::optional<double> numeric_value(const SocialEvent& e, Field key) {
  switch (key) {
    case Field::Popularity: return e.popularity;
    case Field::Lat: return e.lat;
    case Field::Lon: return e.lon;
    default: throw ConfigError(fmt::format("rank key {} is not numeric", field_name(key)));
  }
}

}  // namespace

std::string_view stage_name(FilterStage s) {
  switch (s) {
    case FilterStage::Availability: return "availability";
    case FilterStage::Geographic: return "geographic";
    case FilterStage::Semantic: return "semantic";
    case FilterStage::Temporal: return "temporal";
  }
  return "?";
}

std::vector<std::string> default_blacklist_terms() {
  return {"bar", "cafe", "coffee", "pub", "tavern", "inn", "church", "shop", "club", "gospel", "lounge"};
}

void FilterConfig::validate() const {
  for (const auto& term : blacklist_terms) {
    if (term.empty()) throw ConfigError("blacklist terms must be non-empty");
    if (std::any_of(term.begin(), term.end(), [](unsigned char c) { return c >= 'A' && c <= 'Z'; })) {
      throw ConfigError("blacklist term '" + term + "' must be lowercase");
    }
  }
  geo.validate();
  if (time) time->validate();
  if (rank_key && *rank_key != Field::Popularity && *rank_key != Field::Lat && *rank_key != Field::Lon) {
    throw ConfigError(fmt::format("rank key {} is not numeric", field_name(*rank_key)));
  }
}

FilterResult filter_availability(std::vector<SocialEvent> events, const FilterConfig& cfg) {
  return partition(std::move(events), FilterStage::Availability, [&](const SocialEvent& e) -> std::optional<std::string> {
    for (Field f : cfg.required_fields) {
      if (!has_field(e, f)) return fmt::format("missing {}", field_name(f));
    }
    return std::nullopt;
  });
}

FilterResult filter_geographic(std::vector<SocialEvent> events, const FilterConfig& cfg) {
  if (!cfg.geo.box && !cfg.geo.circle) throw ConfigError("geographic filter needs a box or circle scope");
  const auto& box = cfg.geo.box;
  const auto& circle = cfg.geo.circle;
  return partition(std::move(events), FilterStage::Geographic, [&](const SocialEvent& e) -> std::optional<std::string> {
    if (!e.has_location()) return std::string("no coordinates");
    const GeoPoint p = e.location();
    if (box && !(p.lat >= box->lat_min && p.lat <= box->lat_max && p.lon >= box->lon_min && p.lon <= box->lon_max)) {
      return fmt::format("({}, {}) outside box", p.lat, p.lon);
    }
    if (circle) {
      const double d = haversine_km(circle->center, p);
      if (d > circle->radius_km) return fmt::format("{:.3f} km from center, radius {} km", d, circle->radius_km);
    }
    return std::nullopt;
  });
}

FilterResult filter_semantic(std::vector<SocialEvent> events, const FilterConfig& cfg) {
  std::set<std::string> whitelist;
  if (cfg.region_whitelist) {
    for (const auto& r : *cfg.region_whitelist) whitelist.insert(normalize_text(r));
  }
  return partition(std::move(events), FilterStage::Semantic, [&](const SocialEvent& e) -> std::optional<std::string> {
    for (Field f : cfg.blacklist_target_fields) {
      const auto text = text_field(e, f);
      if (!text) continue;
      for (const auto& term : cfg.blacklist_terms) {
        if (contains_word(*text, term)) return fmt::format("{} contains '{}'", field_name(f), term);
      }
    }
    if (cfg.region_whitelist && e.address && e.address->region &&
        !whitelist.contains(normalize_text(*e.address->region))) {
      return fmt::format("region '{}' outside whitelist", *e.address->region);
    }
    return std::nullopt;
  });
}

FilterResult filter_temporal(std::vector<SocialEvent> events, const FilterConfig& cfg) {
  if (!cfg.time) return {std::move(events), {}, {}};
  const TimeScope scope = *cfg.time;
  return partition(std::move(events), FilterStage::Temporal, [&](const SocialEvent& e) -> std::optional<std::string> {
    if (e.start_time < scope.start || e.start_time > scope.end) {
      return fmt::format("START_TIME {} outside scope", format_rfc3339(e.start_time));
    }
    return std::nullopt;
  });
}

std::vector<SocialEvent> rank_numeric(std::vector<SocialEvent> events, Field key, RankDirection direction) {
  // Validate the key even for empty input.
  numeric_value(SocialEvent{}, key);
  std::stable_sort(events.begin(), events.end(), [&](const SocialEvent& a, const SocialEvent& b) {
    const auto va = numeric_value(a, key);
    const auto vb = numeric_value(b, key);
    if (!va || !vb) return va.has_value() && !vb.has_value();
    return direction == RankDirection::Desc ? *va > *vb : *va < *vb;
  });
  return events;
}

FilterResult run_filters(std::vector<SocialEvent> events, const FilterConfig& cfg) {
  FilterResult total;
  const auto absorb = [&](FilterResult&& stage) {
    total.dropped.insert(total.dropped.end(), stage.dropped.begin(), stage.dropped.end());
    std::move(stage.penalized.begin(), stage.penalized.end(), std::back_inserter(total.penalized));
    return std::move(stage.kept);
  };
  events = absorb(filter_availability(std::move(events), cfg));
  if (cfg.geo.box || cfg.geo.circle) events = absorb(filter_geographic(std::move(events), cfg));
  events = absorb(filter_semantic(std::move(events), cfg));
  events = absorb(filter_temporal(std::move(events), cfg));
  if (cfg.rank_key) events = rank_numeric(std::move(events), *cfg.rank_key, cfg.rank_direction);
  total.kept = std::move(events);
  if (cfg.soft_mode) {
    std::move(total.penalized.begin(), total.penalized.end(), std::back_inserter(total.kept));
  }
  total.penalized.clear();
  return total;
}

}  // namespace socialoam
