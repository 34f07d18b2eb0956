#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "socialoam/geodesy.hpp"
#include "socialoam/time.hpp"

namespace socialoam {

struct Address {
  std::optional<std::string> street;
  std::optional<std::string> city;
  std::optional<std::string> region;
  std::optional<std::string> country;
  /// Set by the consolidation step from the geocoder's answer.
  std::optional<std::string> normalized;

  [[nodiscard]] bool empty() const noexcept { return !street && !city && !region && !country && !normalized; }
  /// Non-empty parts joined with ", " (street, city, region, country), or the
  /// normalized form when no part is present.
  [[nodiscard]] std::string to_string() const;

  friend bool operator==(const Address&, const Address&) = default;
};

/// One social event in the common internal format.
struct SocialEvent {
  std::string event_id;  ///< source_id + "/" + raw_id
  std::string name;
  Timestamp start_time{};
  std::optional<Timestamp> end_time;
  std::optional<double> lat;
  std::optional<double> lon;
  std::optional<std::string> venue;
  std::optional<Address> address;
  std::optional<std::string> category;
  std::optional<double> popularity;
  std::string source_id;
  std::string raw_id;
  /// Merge conflicts recorded by source fusion.
  std::vector<std::string> notes;

  [[nodiscard]] bool has_location() const noexcept { return lat.has_value() && lon.has_value(); }
  [[nodiscard]] GeoPoint location() const { return {lat.value(), lon.value()}; }

  friend bool operator==(const SocialEvent&, const SocialEvent&) = default;
};

/// Canonical field vocabulary (upper-case names as used in configs and reports).
enum class Field {
  Id,
  Name,
  StartTime,
  EndTime,
  Lat,
  Lon,
  Venue,
  Address,
  Street,
  City,
  Region,
  Country,
  Type,
  Popularity,
};

/// Accepts `NAME`, `START_TIME`, `ADDRESS.CITY`, ... Throws ConfigError.
[[nodiscard]] Field parse_field(std::string_view name);
[[nodiscard]] std::string_view field_name(Field f);
[[nodiscard]] bool has_field(const SocialEvent& e, Field f);
/// Textual value for semantic matching; nullopt when absent or non-textual.
[[nodiscard]] std::optional<std::string> text_field(const SocialEvent& e, Field f);

/// Key used to group events by venue: the venue string, or the rounded
/// coordinates when no venue is known.
[[nodiscard]] std::string venue_key(const SocialEvent& e);

/// Serializes with upper-case canonical keys; absent optionals are omitted.
[[nodiscard]] nlohmann::json to_json(const SocialEvent& e);
[[nodiscard]] SocialEvent event_from_json(const nlohmann::json& j);

/// Newline-delimited canonical events.
void write_events(const std::string& path, const std::vector<SocialEvent>& events);
[[nodiscard]] std::vector<SocialEvent> read_events(const std::string& path);
[[nodiscard]] std::string events_to_ndjson(const std::vector<SocialEvent>& events);

/// Validates the SocialEvent invariants; throws InvariantError.
void validate(const SocialEvent& e);

}  // namespace socialoam
