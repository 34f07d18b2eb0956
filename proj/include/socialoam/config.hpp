#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "socialoam/association.hpp"
#include "socialoam/filter.hpp"
#include "socialoam/fusion.hpp"
#include "socialoam/ingest.hpp"

namespace socialoam {

struct GeocoderConfig {
  std::optional<std::string> stub_table;  ///< CSV for StubGeocoder
  std::optional<std::string> endpoint;    ///< base URL for HttpGeocoder
};

struct RunPaths {
  std::optional<std::string> topology;
  std::optional<std::string> kpis;
  std::optional<std::string> events;  ///< canonical event file for filter/associate/analyze
  std::string out_dir = "out";
};

/// One run of the pipeline. Relative paths in the file are resolved against
/// the directory that holds it.
struct RunConfig {
  std::vector<SourceConfig> sources;
  GeocoderConfig geocoder;
  FilterConfig filter;  ///< carries the geographic and temporal scope
  FusionParams fusion;
  GeoAssocParams geo_assoc;
  EawParams eaw;
  Normalization normalization = Normalization::HourOfWeek;
  std::vector<std::string> metrics{"NUM_RRC_CONN", "NUM_DROPS", "DL_USER_THR"};
  double r_threshold = 0.7;
  AggregateStat aggregate_stat = AggregateStat::Mean;
  RunPaths paths;

  /// Throws ConfigError.
  void validate() const;
  [[nodiscard]] IdentifyParams identify_params() const;
};

/// Missing keys keep their defaults; unknown keys are rejected.
/// Throws ConfigError.
[[nodiscard]] RunConfig run_config_from_json(const nlohmann::json& j, const std::string& base_dir = {});
[[nodiscard]] nlohmann::json to_json(const RunConfig& cfg);

/// Throws IoError or ConfigError.
[[nodiscard]] RunConfig load_run_config(const std::string& path);
void save_run_config(const std::string& path, const RunConfig& cfg);

[[nodiscard]] GeoAssocParams geo_assoc_from_json(const nlohmann::json& j);
[[nodiscard]] nlohmann::json to_json(const GeoAssocParams& p);
[[nodiscard]] EawParams eaw_params_from_json(const nlohmann::json& j);
[[nodiscard]] nlohmann::json to_json(const EawParams& p);

[[nodiscard]] SourceKind parse_source_kind(std::string_view s);
[[nodiscard]] std::string_view source_kind_name(SourceKind k);
[[nodiscard]] RecordFormat parse_record_format(std::string_view s);
[[nodiscard]] std::string_view record_format_name(RecordFormat f);

}  // namespace socialoam
