#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "socialoam/events.hpp"
#include "socialoam/indicator.hpp"
#include "socialoam/network.hpp"

namespace socialoam {

// ---------------------------------------------------------------------------
// Geographic association

struct GeoAssocParams {
  double max_dist_km = 2.0;
  std::size_t min_sites = 1;
  std::size_t max_sites = 7;

  void validate() const;
};

struct SiteDistance {
  std::string site_id;
  double distance_km = 0.0;

  friend bool operator==(const SiteDistance&, const SiteDistance&) = default;
};

/// Minimal angle between the cell azimuth and the bearing from its site to
/// `point`, in [0, 180]. Throws DegenerateGeometry when point == site.
[[nodiscard]] double cell_bearing_offset(const Cell& cell, const Site& site, const GeoPoint& point);

/// Sites within max_dist_km, nearest first (ties by site_id), truncated to
/// max_sites. When fewer than min_sites qualify, the min_sites nearest sites
/// are returned regardless of distance.
[[nodiscard]] std::vector<SiteDistance> associate_geographic(const GeoPoint& point, const std::vector<Site>& sites,
                                                             const GeoAssocParams& params);

/// Offset strictly below hor_width / 2; omni cells (width >= 360) always pass.
[[nodiscard]] bool in_beam(const Cell& cell, double offset_deg);

/// Cells whose bearing offset to `point` passes in_beam.
[[nodiscard]] std::vector<Cell> filter_by_bearing(const std::vector<Cell>& cells_of_site, const Site& site,
                                                  const GeoPoint& point);

// ---------------------------------------------------------------------------
// Event association windows and social indicators

struct EawParams {
  long pre_margin = 1;   ///< epochs before the start sample
  long post_margin = 1;  ///< epochs after the rounded-up stop
  Duration default_duration = std::chrono::hours(3);
  /// Overrides default_duration by event TYPE (matched after normalization).
  std::map<std::string, Duration> category_durations;
  double sigma_multiplier = 1.0;

  void validate() const;
  [[nodiscard]] Duration duration_for(const SocialEvent& e) const;
};

struct Eaw {
  std::string cell_id;
  std::string metric;
  std::string event_id;
  Eigen::Index n_start = 0;  ///< inclusive
  Eigen::Index n_end = 0;    ///< inclusive

  [[nodiscard]] Eigen::Index length() const noexcept { return n_end - n_start + 1; }
  friend bool operator==(const Eaw&, const Eaw&) = default;
};

/// n_start = index(start_time) - pre_margin; n_end = ceil-index(stop) +
/// post_margin, where stop is end_time or start_time + expected duration.
/// Both are clamped to the series. Throws OutOfRange when the event does not
/// overlap the series at all.
[[nodiscard]] Eaw build_eaw(const SocialEvent& event, const KpiSeries& series, const EawParams& params = {});

struct SocialIndicator {
  Eaw eaw;
  Eigen::VectorXd samples;
};

/// Gaussian s[n] over the window, mean at the midpoint, sigma = m * L / 6.
[[nodiscard]] SocialIndicator social_indicator(const Eaw& eaw, double sigma_multiplier = 1.0);

// ---------------------------------------------------------------------------
// Correlation and aggregation

struct EventCellCorrelation {
  std::string event_id;
  std::string cell_id;
  std::string metric;
  std::optional<double> r;  ///< nullopt = undefined (too few pairs or zero variance)
  Eigen::Index n_samples = 0;
  std::optional<Eaw> eaw;    ///< absent when the event lies outside the series
};

/// For every series: build the EAW, generate s[n] and correlate it with the
/// series restricted to the window. Series belonging to other cells are
/// skipped. Sign is kept. Propagates OutOfRange from build_eaw.
[[nodiscard]] std::vector<EventCellCorrelation> correlate_event(const SocialEvent& event, const Cell& cell,
                                                                const std::vector<KpiSeries>& metrics,
                                                                const EawParams& params = {});

enum class AggregateStat { Median, Mean, Max };

[[nodiscard]] AggregateStat parse_aggregate_stat(std::string_view s);
[[nodiscard]] std::string_view aggregate_stat_name(AggregateStat s);

struct VenueImpactReport {
  std::string venue_key;
  std::string cell_id;
  std::string metric;
  std::vector<double> r;  ///< defined correlations, signed, in event order
  std::vector<std::string> event_ids;
  std::size_t n_undefined = 0;
  double median_abs_r = 0.0;
  double mean_abs_r = 0.0;
  double max_abs_r = 0.0;

  [[nodiscard]] std::size_t n_events() const noexcept { return r.size(); }
  [[nodiscard]] double stat(AggregateStat s) const noexcept;
};

/// Aggregates |r| per (cell, metric). Throws NoDefinedCorrelations when a
/// group has no defined correlation.
[[nodiscard]] std::vector<VenueImpactReport> aggregate_venue(const std::string& venue_key,
                                                             const std::vector<EventCellCorrelation>& correlations);

// ---------------------------------------------------------------------------
// Cause identification

/// Extension point for coverage-based association (radio maps, propagation
/// models, geolocated traces). When supplied, it replaces the bearing test.
class CoverageAssociator {
 public:
  virtual ~CoverageAssociator() = default;
  [[nodiscard]] virtual std::vector<std::string> serving_cells(const SocialEvent& event) const = 0;
};

enum class Normalization { None, HourOfDay, HourOfWeek };

[[nodiscard]] Normalization parse_normalization(std::string_view s);
[[nodiscard]] std::string_view normalization_name(Normalization n);

struct IdentifyParams {
  GeoAssocParams geo;
  EawParams eaw;
  std::vector<std::string> metrics{"NUM_RRC_CONN", "NUM_DROPS", "DL_USER_THR"};
  double r_threshold = 0.7;
  AggregateStat stat = AggregateStat::Mean;
  Normalization normalization = Normalization::HourOfWeek;
  std::shared_ptr<const CoverageAssociator> coverage;
};

struct CandidateEvent {
  SocialEvent event;
  double distance_km = 0.0;
  std::optional<double> bearing_offset;  ///< absent when co-located with the site
};

struct CauseCandidate {
  std::size_t rank = 0;  ///< 1-based
  std::string venue_key;
  std::vector<CandidateEvent> events;
  std::map<std::string, VenueImpactReport> per_metric;  ///< metrics with >= 1 defined r
  std::vector<EventCellCorrelation> correlations;
  std::optional<double> score;  ///< best selected aggregate over metrics
  std::string best_metric;
  bool flagged = false;
};

struct CauseAnalysis {
  std::string cell_id;
  std::string site_id;
  std::vector<CauseCandidate> ranking;
  std::size_t candidate_events = 0;  ///< events with the site among their close sites
  std::size_t candidate_venues = 0;  ///< their distinct venues before the bearing test
};

/// Full performance-based pipeline for one degraded cell: geographic
/// association to the cell's site, bearing (or coverage) filter, EAW
/// correlation on the selected metrics, per-venue aggregation, ranking by the
/// selected aggregate (ties by venue key) and flagging of venues whose
/// aggregate exceeds r_threshold on any metric. The result does not depend on
/// the order of `events`. Throws UnknownCell (cell or site not in the
/// topology) and MissingData (no KPI series for the cell).
[[nodiscard]] CauseAnalysis identify_causes(const Cell& degraded_cell, const std::vector<SocialEvent>& events,
                                            const Topology& topology, const std::vector<KpiSeries>& kpis,
                                            const IdentifyParams& params = {});

/// Applies the configured normalization to every series.
[[nodiscard]] std::vector<KpiSeries> prepare_series(const std::vector<KpiSeries>& kpis, Normalization normalization);

}  // namespace socialoam
