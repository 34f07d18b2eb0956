#include "socialoam/ingest.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "socialoam/csv.hpp"
#include "socialoam/errors.hpp"
#include "socialoam/http.hpp"
#include "socialoam/io.hpp"
#include "socialoam/similarity.hpp"

namespace socialoam {
namespace {

const nlohmann::json* lookup(const nlohmann::json& obj, const std::string& path) {
  if (!obj.is_object()) return nullptr;
  if (const auto it = obj.find(path); it != obj.end()) return &*it;
  const nlohmann::json* cur = &obj;
  std::size_t begin = 0;
  while (begin <= path.size()) {
    const std::size_t dot = path.find('.', begin);
    const std::string key = path.substr(begin, dot == std::string::npos ? std::string::npos : dot - begin);
    if (!cur->is_object()) return nullptr;
    const auto it = cur->find(key);
    if (it == cur->end()) return nullptr;
    cur = &*it;
    if (dot == std::string::npos) return cur;
    begin = dot + 1;
  }
  return nullptr;
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::optional<std::string> as_text(const nlohmann::json* v) {
  if (v == nullptr || v->is_null()) return std::nullopt;
  std::string s = v->is_string() ? v->get<std::string>() : v->dump();
  s = trim(std::move(s));
  if (s.empty()) return std::nullopt;
  return s;
}

std::optional<double> as_number(const nlohmann::json* v, std::string_view what) {
  if (v == nullptr || v->is_null()) return std::nullopt;
  if (v->is_number()) return v->get<double>();
  if (v->is_string()) {
    const std::string s = trim(v->get<std::string>());
    if (s.empty()) return std::nullopt;
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec == std::errc{} && ptr == s.data() + s.size() && std::isfinite(value)) return value;
  }
  throw InvariantError(fmt::format("{} is not numeric: {}", what, v->dump()));
}

std::optional<Timestamp> as_time(const nlohmann::json* v, std::chrono::minutes offset) {
  if (v == nullptr || v->is_null()) return std::nullopt;
  if (v->is_number_integer()) return Timestamp(std::chrono::seconds(v->get<long long>()));
  if (v->is_string()) {
    const std::string s = trim(v->get<std::string>());
    if (s.empty()) return std::nullopt;
    return parse_rfc3339(s, offset);
  }
  throw UnparseableTimestamp("unparseable timestamp " + v->dump());
}

Address& address_of(SocialEvent& e) {
  if (!e.address) e.address.emplace();
  return *e.address;
}

}  // namespace

void SourceConfig::validate() const {
  if (source_id.empty()) throw ConfigError("source_id must be non-empty");
  if (priority < 0) throw ConfigError("source '" + source_id + "': priority must be >= 0");
  bool has_name = false;
  bool has_start = false;
  for (const auto& [from, to] : field_map) {
    const Field f = parse_field(to);
    has_name = has_name || f == Field::Name;
    has_start = has_start || f == Field::StartTime;
  }
  if (!has_name || !has_start) {
    throw ConfigError("source '" + source_id + "': field_map must map NAME and START_TIME");
  }
}

void validate_sources(const std::vector<SourceConfig>& sources) {
  std::set<std::string> seen;
  for (const auto& s : sources) {
    s.validate();
    if (!seen.insert(s.source_id).second) throw ConfigError("duplicate source_id '" + s.source_id + "'");
  }
}

void GeoScope::validate() const {
  if (!categorical && !box && !circle) throw ConfigError("geographic scope needs categorical, box or circle form");
  if (box) {
    const auto& b = *box;
    if (!(b.lat_min < b.lat_max) || !(b.lon_min < b.lon_max)) throw ConfigError("box scope: min must be below max");
    if (b.lat_min < -90 || b.lat_max > 90 || b.lon_min < -180 || b.lon_max > 180) {
      throw ConfigError("box scope: limits outside valid degree ranges");
    }
  }
  if (circle) {
    if (!is_valid(circle->center)) throw ConfigError("circle scope: invalid center");
    if (!(circle->radius_km >= 0.0)) throw ConfigError("circle scope: radius must be >= 0");
  }
}

void TimeScope::validate() const {
  if (!(start < end)) throw ConfigError("time scope: start must precede end");
}

std::vector<RawRecord> decode_payload(const std::string& payload, RecordFormat format) {
  std::vector<RawRecord> records;
  if (format == RecordFormat::JsonRecords) {
    // A JSON array is accepted as well as newline-delimited objects.
    const auto first = payload.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && payload[first] == '[') {
      nlohmann::json arr;
      try {
        arr = nlohmann::json::parse(payload);
      } catch (const nlohmann::json::parse_error& e) {
        throw MalformedPayload(std::string("undecodable JSON array: ") + e.what());
      }
      for (auto& item : arr) {
        if (!item.is_object()) throw MalformedPayload("JSON array element is not an object");
        records.push_back({std::move(item), records.size()});
      }
      return records;
    }
    std::istringstream in(payload);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(line);
      } catch (const nlohmann::json::parse_error& e) {
        throw MalformedPayload(fmt::format("undecodable JSON on line {}: {}", lineno, e.what()));
      }
      if (!j.is_object()) throw MalformedPayload(fmt::format("line {} is not a JSON object", lineno));
      records.push_back({std::move(j), records.size()});
    }
    return records;
  }

  std::istringstream in(payload);
  const csv::Table table = csv::read(in);
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    if (row.size() != table.header.size()) {
      throw MalformedPayload(fmt::format("CSV line {}: expected {} fields, got {}", table.lines[r],
                                         table.header.size(), row.size()));
    }
    nlohmann::json j = nlohmann::json::object();
    for (std::size_t c = 0; c < row.size(); ++c) j[table.header[c]] = row[c];
    records.push_back({std::move(j), records.size()});
  }
  return records;
}

std::vector<RawRecord> fetch_raw(const SourceConfig& source, const GeoScope& geo, const std::optional<TimeScope>& time) {
  std::string payload;
  if (source.kind == SourceKind::File) {
    try {
      payload = read_file(source.locator);
    } catch (const IoError& e) {
      throw SourceUnreachable(source.source_id, e.what());
    }
  } else {
    std::vector<std::pair<std::string, std::string>> params;
    if (time) {
      params.emplace_back("start", format_rfc3339(time->start));
      params.emplace_back("end", format_rfc3339(time->end));
    }
    if (geo.categorical) {
      if (!geo.categorical->country.empty()) params.emplace_back("country", geo.categorical->country);
      if (!geo.categorical->region.empty()) params.emplace_back("region", geo.categorical->region);
      if (!geo.categorical->city.empty()) params.emplace_back("city", geo.categorical->city);
    }
    const auto response = http_get(source.locator, params, std::chrono::seconds(30));
    if (!response) throw SourceUnreachable(source.source_id, "no response from " + source.locator);
    if (response->status != 200) {
      throw SourceUnreachable(source.source_id, fmt::format("HTTP {} from {}", response->status, source.locator));
    }
    payload = response->body;
  }
  try {
    return decode_payload(payload, source.format);
  } catch (const MalformedPayload& e) {
    throw MalformedPayload("source '" + source.source_id + "': " + e.what());
  }
}

SocialEvent parse_record(const RawRecord& raw, const SourceConfig& cfg) {
  SocialEvent e;
  e.source_id = cfg.source_id;
  bool have_start = false;
  for (const auto& [from, to] : cfg.field_map) {
    const Field field = parse_field(to);
    const nlohmann::json* v = lookup(raw.fields, from);
    switch (field) {
      case Field::Id:
        if (auto s = as_text(v)) e.raw_id = *s;
        break;
      case Field::Name:
        if (auto s = as_text(v)) e.name = *s;
        break;
      case Field::StartTime:
        if (auto t = as_time(v, cfg.utc_offset)) {
          e.start_time = *t;
          have_start = true;
        }
        break;
      case Field::EndTime: e.end_time = as_time(v, cfg.utc_offset); break;
      case Field::Lat: e.lat = as_number(v, "LAT"); break;
      case Field::Lon: e.lon = as_number(v, "LON"); break;
      case Field::Venue: e.venue = as_text(v); break;
      case Field::Address:
      case Field::Street:
        if (auto s = as_text(v)) address_of(e).street = *s;
        break;
      case Field::City:
        if (auto s = as_text(v)) address_of(e).city = *s;
        break;
      case Field::Region:
        if (auto s = as_text(v)) address_of(e).region = *s;
        break;
      case Field::Country:
        if (auto s = as_text(v)) address_of(e).country = *s;
        break;
      case Field::Type: e.category = as_text(v); break;
      case Field::Popularity: e.popularity = as_number(v, "POPULARITY"); break;
    }
  }
  if (e.raw_id.empty()) e.raw_id = fmt::format("r{}", raw.ordinal);
  e.event_id = cfg.source_id + "/" + e.raw_id;
  if (e.name.empty()) throw MissingRequiredField("record " + e.event_id + " lacks NAME");
  if (!have_start) throw MissingRequiredField("record " + e.event_id + " lacks START_TIME");
  validate(e);
  return e;
}

std::map<std::string, std::string> canonical_field_map() {
  return {
      {"RAW_ID", "ID"},
      {"NAME", "NAME"},
      {"START_TIME", "START_TIME"},
      {"END_TIME", "END_TIME"},
      {"LAT", "LAT"},
      {"LON", "LON"},
      {"VENUE", "VENUE"},
      {"ADDRESS.STREET", "ADDRESS.STREET"},
      {"ADDRESS.CITY", "ADDRESS.CITY"},
      {"ADDRESS.REGION", "ADDRESS.REGION"},
      {"ADDRESS.COUNTRY", "ADDRESS.COUNTRY"},
      {"TYPE", "TYPE"},
      {"POPULARITY", "POPULARITY"},
  };
}

StubGeocoder StubGeocoder::from_csv(const std::string& path) {
  const csv::Table table = csv::read_file(path);
  const auto q = table.column("query");
  const auto lat = table.column("lat");
  const auto lon = table.column("lon");
  const auto addr = table.column("normalized_address");
  if (!q || !lat || !lon || !addr) {
    throw SchemaError("geocoder table '" + path + "' needs columns query,lat,lon,normalized_address");
  }
  StubGeocoder stub;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    if (row.size() != table.header.size()) throw SchemaError(fmt::format("geocoder table line {}: bad field count", table.lines[r]));
    GeocodeResult result;
    try {
      result.point = {std::stod(row[*lat]), std::stod(row[*lon])};
    } catch (const std::exception&) {
      throw InvariantError("geocoder table: non-numeric coordinates", r + 1);
    }
    if (!is_valid(result.point)) throw InvariantError("geocoder table: coordinates out of range", r + 1);
    result.normalized_address = row[*addr];
    stub.add(row[*q], std::move(result));
  }
  return stub;
}

void StubGeocoder::add(const std::string& query, GeocodeResult result) {
  table_[normalize_text(query)] = std::move(result);
}

std::optional<GeocodeResult> StubGeocoder::resolve(const std::string& query) const {
  const auto it = table_.find(normalize_text(query));
  if (it == table_.end()) return std::nullopt;
  return it->second;
}

HttpGeocoder::HttpGeocoder(std::string endpoint, std::chrono::seconds timeout)
    : endpoint_(std::move(endpoint)), timeout_(timeout) {}

std::optional<GeocodeResult> HttpGeocoder::resolve(const std::string& query) const {
  const auto response = http_get(endpoint_, {{"q", query}}, timeout_);
  if (!response) {
    spdlog::warn("geocoder {} unreachable", endpoint_);
    return std::nullopt;
  }
  if (response->status == 404) return std::nullopt;
  if (response->status != 200) {
    spdlog::warn("geocoder {} answered HTTP {}", endpoint_, response->status);
    return std::nullopt;
  }
  try {
    const auto j = nlohmann::json::parse(response->body);
    GeocodeResult result{{j.at("lat").get<double>(), j.at("lon").get<double>()},
                         j.value("normalized_address", std::string{})};
    if (!is_valid(result.point)) return std::nullopt;
    return result;
  } catch (const nlohmann::json::exception& e) {
    spdlog::warn("geocoder {} returned an undecodable body: {}", endpoint_, e.what());
    return std::nullopt;
  }
}

SocialEvent consolidate(SocialEvent event, const GeocoderClient& geocoder) {
  if (event.has_location()) return event;
  std::vector<std::string> queries;
  if (event.address && !event.address->empty()) queries.push_back(event.address->to_string());
  if (event.venue) queries.push_back(*event.venue);
  if (queries.empty()) return event;

  for (const auto& query : queries) {
    if (auto hit = geocoder.resolve(query)) {
      event.lat = hit->point.lat;
      event.lon = hit->point.lon;
      if (!hit->normalized_address.empty() && !(event.address && event.address->normalized)) {
        address_of(event).normalized = hit->normalized_address;
      }
      return event;
    }
  }
  spdlog::info("consolidate: could not geocode event {} ('{}')", event.event_id, queries.front());
  return event;
}

}  // namespace socialoam
