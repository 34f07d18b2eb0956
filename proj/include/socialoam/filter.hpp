#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "socialoam/events.hpp"
#include "socialoam/ingest.hpp"

namespace socialoam {

enum class FilterStage { Availability, Geographic, Semantic, Temporal };

[[nodiscard]] std::string_view stage_name(FilterStage s);

enum class RankDirection { Desc, Asc };

/// Venue terms that rarely draw crowds large enough to load a macrocell.
/// Deployment specific; shipped as the default blacklist.
[[nodiscard]] std::vector<std::string> default_blacklist_terms();

struct FilterConfig {
  std::vector<Field> required_fields{Field::StartTime, Field::Lat, Field::Lon};
  std::vector<std::string> blacklist_terms = default_blacklist_terms();
  std::vector<Field> blacklist_target_fields{Field::Venue, Field::Name};
  std::optional<std::set<std::string>> region_whitelist;
  GeoScope geo = GeoScope::whole_earth();
  std::optional<TimeScope> time;
  /// Dropped events are appended after the kept ones instead of removed.
  bool soft_mode = false;
  std::optional<Field> rank_key = Field::Popularity;
  RankDirection rank_direction = RankDirection::Desc;

  /// Throws ConfigError (empty or non-lowercase terms, bad scopes).
  void validate() const;
};

struct FilterTrace {
  std::string event_id;
  FilterStage stage;
  std::string reason;

  friend bool operator==(const FilterTrace&, const FilterTrace&) = default;
};

struct FilterResult {
  std::vector<SocialEvent> kept;
  std::vector<FilterTrace> dropped;
  /// Events removed by a single stage, in drop order. run_filters appends
  /// them to `kept` in soft mode and otherwise leaves this empty.
  std::vector<SocialEvent> penalized;
};

[[nodiscard]] FilterResult filter_availability(std::vector<SocialEvent> events, const FilterConfig& cfg);
/// Inclusive box bounds; circle keeps haversine distance <= radius.
/// Throws ConfigError when the scope has neither a box nor a circle.
[[nodiscard]] FilterResult filter_geographic(std::vector<SocialEvent> events, const FilterConfig& cfg);
[[nodiscard]] FilterResult filter_semantic(std::vector<SocialEvent> events, const FilterConfig& cfg);
/// Keeps start_time within [start, end]; identity when no time scope is set.
[[nodiscard]] FilterResult filter_temporal(std::vector<SocialEvent> events, const FilterConfig& cfg);

/// Stable sort on a numeric field; events lacking it go last in either
/// direction. Throws ConfigError for non-numeric keys.
[[nodiscard]] std::vector<SocialEvent> rank_numeric(std::vector<SocialEvent> events, Field key, RankDirection direction);

/// availability -> geographic -> semantic -> temporal -> numeric ranking.
[[nodiscard]] FilterResult run_filters(std::vector<SocialEvent> events, const FilterConfig& cfg);

}  // namespace socialoam
