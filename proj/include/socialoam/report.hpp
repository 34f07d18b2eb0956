#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "socialoam/association.hpp"
#include "socialoam/filter.hpp"

namespace socialoam {

struct CloseSite {
  std::string site_id;
  double distance_km = 0.0;

  friend bool operator==(const CloseSite&, const CloseSite&) = default;
};

struct CellBearing {
  std::string cell_id;
  std::optional<double> bearing_offset;  ///< absent for an event at the site itself
  bool in_beam = false;

  friend bool operator==(const CellBearing&, const CellBearing&) = default;
};

struct CorrelatedCell {
  std::string cell_id;
  std::string metric;
  std::optional<double> r;
  long long n_samples = 0;

  friend bool operator==(const CorrelatedCell&, const CorrelatedCell&) = default;
};

/// One event row of the association and cause reports. `rank` is the venue
/// rank, shared by every event of the venue.
struct OutputRecord {
  std::string event_id;
  std::string name;
  Timestamp start_time{};
  std::optional<Timestamp> end_time;
  std::optional<std::string> venue;
  std::optional<std::string> address;
  std::optional<double> lat;
  std::optional<double> lon;
  std::optional<std::size_t> rank;
  std::optional<bool> flagged;
  std::vector<CloseSite> close_sites;
  std::vector<CellBearing> cell_bearings;
  std::vector<CorrelatedCell> correlated_cells;

  friend bool operator==(const OutputRecord&, const OutputRecord&) = default;
};

[[nodiscard]] nlohmann::json to_json(const OutputRecord& r);
/// Throws SchemaError.
[[nodiscard]] OutputRecord output_record_from_json(const nlohmann::json& j);

[[nodiscard]] std::string records_to_json(const std::vector<OutputRecord>& records);
/// Throws SchemaError.
[[nodiscard]] std::vector<OutputRecord> records_from_json(const std::string& text);

/// Event fields shared by both reports.
[[nodiscard]] OutputRecord base_record(const SocialEvent& e);

/// Geographic association without correlations: close sites (ascending
/// distance) and bearing offsets for every cell of those sites. Events
/// without coordinates are skipped and reported through `skipped`.
[[nodiscard]] std::vector<OutputRecord> association_records(const std::vector<SocialEvent>& events, const Topology& topology,
                                                            const GeoAssocParams& params,
                                                            std::vector<std::string>* skipped = nullptr);

/// One record per candidate event, ordered by venue rank then start time.
[[nodiscard]] std::vector<OutputRecord> cause_records(const CauseAnalysis& analysis, const Topology& topology,
                                                      const GeoAssocParams& params);

/// `rank,venue,n_events,best_metric,best_abs_r,flagged`.
[[nodiscard]] std::string cause_summary_csv(const CauseAnalysis& analysis);

/// Venue-level aggregates per metric.
[[nodiscard]] nlohmann::json venue_impacts_json(const CauseAnalysis& analysis, AggregateStat stat, double r_threshold);

/// `event_id,stage,reason`.
[[nodiscard]] std::string drops_csv(const std::vector<FilterTrace>& dropped);

}  // namespace socialoam
