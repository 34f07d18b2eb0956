#include "socialoam/events.hpp"

#include <array>
#include <fstream>
#include <sstream>
#include <utility>

#include <fmt/format.h>
#include <json.hpp>

#include "socialoam/errors.hpp"
#include "socialoam/io.hpp"

namespace socialoam {
namespace {

constexpr std::array<std::pair<Field, std::string_view>, 14> kFieldNames{{
    {Field::Id, "ID"},
    {Field::Name, "NAME"},
    {Field::StartTime, "START_TIME"},
    {Field::EndTime, "END_TIME"},
    {Field::Lat, "LAT"},
    {Field::Lon, "LON"},
    {Field::Venue, "VENUE"},
    {Field::Address, "ADDRESS"},
    {Field::Street, "ADDRESS.STREET"},
    {Field::City, "ADDRESS.CITY"},
    {Field::Region, "ADDRESS.REGION"},
    {Field::Country, "ADDRESS.COUNTRY"},
    {Field::Type, "TYPE"},
    {Field::Popularity, "POPULARITY"},
}};

template <typename T>
void put(nlohmann::json& j, const char* key, const std::optional<T>& v) {
  if (v) j[key] = *v;
}

template <typename T>
std::optional<T> get(const nlohmann::json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<T>();
}

}  // namespace

std::string Address::to_string() const {
  std::string out;
  for (const auto* part : {&street, &city, &region, &country}) {
    if (!*part || (*part)->empty()) continue;
    if (!out.empty()) out += ", ";
    out += **part;
  }
  if (out.empty() && normalized) out = *normalized;
  return out;
}

Field parse_field(std::string_view name) {
  // Bare sub-field names are accepted as shorthands.
  if (name == "STREET") return Field::Street;
  if (name == "CITY") return Field::City;
  if (name == "REGION") return Field::Region;
  if (name == "COUNTRY") return Field::Country;
  if (name == "STOP_TIME") return Field::EndTime;
  for (const auto& [f, n] : kFieldNames) {
    if (n == name) return f;
  }
  throw ConfigError(fmt::format("unknown canonical field '{}'", name));
}

std::string_view field_name(Field f) {
  for (const auto& [g, n] : kFieldNames) {
    if (g == f) return n;
  }
  return "?";
}

bool has_field(const SocialEvent& e, Field f) {
  switch (f) {
    case Field::Id: return !e.raw_id.empty();
    case Field::Name: return !e.name.empty();
    case Field::StartTime: return true;
    case Field::EndTime: return e.end_time.has_value();
    case Field::Lat: return e.lat.has_value();
    case Field::Lon: return e.lon.has_value();
    case Field::Venue: return e.venue.has_value();
    case Field::Address: return e.address.has_value() && !e.address->empty();
    case Field::Street: return e.address && e.address->street;
    case Field::City: return e.address && e.address->city;
    case Field::Region: return e.address && e.address->region;
    case Field::Country: return e.address && e.address->country;
    case Field::Type: return e.category.has_value();
    case Field::Popularity: return e.popularity.has_value();
  }
  return false;
}

std::optional<std::string> text_field(const SocialEvent& e, Field f) {
  switch (f) {
    case Field::Name: return e.name;
    case Field::Venue: return e.venue;
    case Field::Type: return e.category;
    case Field::Address:
      if (e.address && !e.address->empty()) return e.address->to_string();
      return std::nullopt;
    case Field::Street: return e.address ? e.address->street : std::nullopt;
    case Field::City: return e.address ? e.address->city : std::nullopt;
    case Field::Region: return e.address ? e.address->region : std::nullopt;
    case Field::Country: return e.address ? e.address->country : std::nullopt;
    default: return std::nullopt;
  }
}

std::string venue_key(const SocialEvent& e) {
  if (e.venue && !e.venue->empty()) return *e.venue;
  if (e.has_location()) return fmt::format("@{:.5f},{:.5f}", *e.lat, *e.lon);
  return "event:" + e.event_id;
}

nlohmann::json to_json(const SocialEvent& e) {
  nlohmann::json j;
  j["EVENT_ID"] = e.event_id;
  j["NAME"] = e.name;
  j["START_TIME"] = format_rfc3339(e.start_time);
  if (e.end_time) j["END_TIME"] = format_rfc3339(*e.end_time);
  put(j, "LAT", e.lat);
  put(j, "LON", e.lon);
  put(j, "VENUE", e.venue);
  if (e.address) {
    nlohmann::json a = nlohmann::json::object();
    put(a, "STREET", e.address->street);
    put(a, "CITY", e.address->city);
    put(a, "REGION", e.address->region);
    put(a, "COUNTRY", e.address->country);
    put(a, "NORMALIZED", e.address->normalized);
    j["ADDRESS"] = std::move(a);
  }
  put(j, "TYPE", e.category);
  put(j, "POPULARITY", e.popularity);
  j["SOURCE_ID"] = e.source_id;
  j["RAW_ID"] = e.raw_id;
  if (!e.notes.empty()) j["NOTES"] = e.notes;
  return j;
}

SocialEvent event_from_json(const nlohmann::json& j) {
  try {
    SocialEvent e;
    e.event_id = j.at("EVENT_ID").get<std::string>();
    e.name = j.at("NAME").get<std::string>();
    e.start_time = parse_rfc3339(j.at("START_TIME").get<std::string>());
    if (auto end = get<std::string>(j, "END_TIME")) e.end_time = parse_rfc3339(*end);
    e.lat = get<double>(j, "LAT");
    e.lon = get<double>(j, "LON");
    e.venue = get<std::string>(j, "VENUE");
    if (const auto it = j.find("ADDRESS"); it != j.end() && it->is_object()) {
      Address a;
      a.street = get<std::string>(*it, "STREET");
      a.city = get<std::string>(*it, "CITY");
      a.region = get<std::string>(*it, "REGION");
      a.country = get<std::string>(*it, "COUNTRY");
      a.normalized = get<std::string>(*it, "NORMALIZED");
      e.address = std::move(a);
    }
    e.category = get<std::string>(j, "TYPE");
    e.popularity = get<double>(j, "POPULARITY");
    e.source_id = j.value("SOURCE_ID", "");
    e.raw_id = j.value("RAW_ID", "");
    if (const auto it = j.find("NOTES"); it != j.end()) e.notes = it->get<std::vector<std::string>>();
    return e;
  } catch (const nlohmann::json::exception& ex) {
    throw MalformedPayload(std::string("bad canonical event: ") + ex.what());
  }
}

std::string events_to_ndjson(const std::vector<SocialEvent>& events) {
  std::string out;
  for (const auto& e : events) {
    out += to_json(e).dump();
    out += '\n';
  }
  return out;
}

void write_events(const std::string& path, const std::vector<SocialEvent>& events) {
  write_file_atomic(path, events_to_ndjson(events));
}

std::vector<SocialEvent> read_events(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open events file '" + path + "'");
  std::vector<SocialEvent> events;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& ex) {
      throw MalformedPayload("bad JSON line in '" + path + "': " + ex.what());
    }
    events.push_back(event_from_json(j));
  }
  return events;
}

void validate(const SocialEvent& e) {
  if (e.end_time && *e.end_time <= e.start_time) {
    throw InvariantError("event '" + e.event_id + "': END_TIME not after START_TIME");
  }
  if (e.lat.has_value() != e.lon.has_value()) {
    throw InvariantError("event '" + e.event_id + "': LAT and LON must be given together");
  }
  if (e.has_location() && !is_valid(e.location())) {
    throw InvariantError("event '" + e.event_id + "': coordinates out of range");
  }
  if (e.popularity && (!(*e.popularity >= 0.0))) {
    throw InvariantError("event '" + e.event_id + "': POPULARITY must be non-negative");
  }
}

}  // namespace socialoam
