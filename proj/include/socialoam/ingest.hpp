#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "socialoam/events.hpp"
#include "socialoam/geodesy.hpp"
#include "socialoam/time.hpp"

namespace socialoam {

enum class SourceKind { File, Http };
enum class RecordFormat { JsonRecords, CsvRecords };

/// Declarative description of one social source. `field_map` maps source
/// field names (dotted paths for nested JSON) to canonical field names.
struct SourceConfig {
  std::string source_id;
  SourceKind kind = SourceKind::File;
  std::string locator;
  RecordFormat format = RecordFormat::JsonRecords;
  std::map<std::string, std::string> field_map;
  int priority = 0;
  /// Applied to timestamps that carry no offset.
  std::chrono::minutes utc_offset{0};

  /// Throws ConfigError when NAME or START_TIME are not mapped, priority is
  /// negative, or a target is not a canonical field.
  void validate() const;
};

/// Validates one run's source list, including source_id uniqueness.
void validate_sources(const std::vector<SourceConfig>& sources);

struct CategoricalScope {
  std::string country;
  std::string region;
  std::string city;
};

struct BoxScope {
  double lat_min = -90.0;
  double lat_max = 90.0;
  double lon_min = -180.0;
  double lon_max = 180.0;
};

struct CircleScope {
  GeoPoint center;
  double radius_km = 0.0;
};

struct GeoScope {
  std::optional<CategoricalScope> categorical;
  std::optional<BoxScope> box;
  std::optional<CircleScope> circle;

  void validate() const;
  [[nodiscard]] static GeoScope whole_earth() { return {std::nullopt, BoxScope{}, std::nullopt}; }
};

struct TimeScope {
  Timestamp start{};
  Timestamp end{};

  void validate() const;
};

/// One undecoded source record: a flat or nested JSON object (CSV rows become
/// objects of strings) plus its 0-based position in the payload.
struct RawRecord {
  nlohmann::json fields;
  std::size_t ordinal = 0;
};

/// Decodes a payload in the given record format. Throws MalformedPayload.
[[nodiscard]] std::vector<RawRecord> decode_payload(const std::string& payload, RecordFormat format);

/// Retrieves every record the source yields. For HTTP sources the scope is
/// sent as query parameters; no coordinate filtering happens here.
/// Throws SourceUnreachable or MalformedPayload.
[[nodiscard]] std::vector<RawRecord> fetch_raw(const SourceConfig& source, const GeoScope& geo,
                                              const std::optional<TimeScope>& time);

/// Maps a raw record onto a SocialEvent via the source field map. Unmapped
/// optional fields stay absent. event_id = source_id + "/" + raw_id where
/// raw_id is the mapped ID field or `r<ordinal>`.
/// Throws MissingRequiredField, UnparseableTimestamp, InvariantError.
[[nodiscard]] SocialEvent parse_record(const RawRecord& raw, const SourceConfig& cfg);

/// Field map that reads the canonical serialization back.
[[nodiscard]] std::map<std::string, std::string> canonical_field_map();

struct GeocodeResult {
  GeoPoint point;
  std::string normalized_address;
};

class GeocoderClient {
 public:
  virtual ~GeocoderClient() = default;
  [[nodiscard]] virtual std::optional<GeocodeResult> resolve(const std::string& query) const = 0;
};

/// Fixture-table geocoder. Lookups use the normalized query text, so case and
/// punctuation differences resolve to the same row.
class StubGeocoder final : public GeocoderClient {
 public:
  StubGeocoder() = default;
  /// CSV with columns `query,lat,lon,normalized_address`.
  static StubGeocoder from_csv(const std::string& path);
  void add(const std::string& query, GeocodeResult result);
  [[nodiscard]] std::optional<GeocodeResult> resolve(const std::string& query) const override;
  [[nodiscard]] std::size_t size() const noexcept { return table_.size(); }

 private:
  std::map<std::string, GeocodeResult> table_;
};

/// Queries `GET <endpoint>?q=<query>` and expects
/// `{"lat":..,"lon":..,"normalized_address":".."}`; 404 means unresolved.
class HttpGeocoder final : public GeocoderClient {
 public:
  explicit HttpGeocoder(std::string endpoint, std::chrono::seconds timeout = std::chrono::seconds(10));
  [[nodiscard]] std::optional<GeocodeResult> resolve(const std::string& query) const override;

 private:
  std::string endpoint_;
  std::chrono::seconds timeout_;
};

/// Fills missing coordinates (and the normalized address) from the geocoder
/// using the address, falling back to the venue. Never overwrites present
/// values. Resolution failures are logged and leave the event unchanged.
[[nodiscard]] SocialEvent consolidate(SocialEvent event, const GeocoderClient& geocoder);

}  // namespace socialoam
