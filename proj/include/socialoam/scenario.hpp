#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "socialoam/association.hpp"
#include "socialoam/config.hpp"
#include "socialoam/network.hpp"

namespace socialoam {

struct MetricSpec {
  std::string name;
  std::array<double, 24> profile{};  ///< daily baseline by UTC hour
  double noise_sigma = 0.0;
  /// +1 when events raise the metric, -1 when they lower it.
  double direction = 1.0;
};

/// Position relative to a site: bearing from the site and distance.
struct Anchor {
  std::string site_id;
  double bearing_deg = 0.0;
  double distance_km = 0.0;
};

struct InjectedEventSpec {
  std::string venue;
  std::string name;
  std::optional<GeoPoint> location;
  std::optional<Anchor> anchor;  ///< used when location is absent
  Timestamp start{};
  Duration duration = std::chrono::hours(2);
  std::optional<std::string> category;
  std::map<std::string, double> amplitude;  ///< per metric, >= 0
  /// Cells that see the anomaly. Empty: cells of the nearest site whose beam
  /// contains the venue.
  std::vector<std::string> affected_cells;
};

enum class DecoyPlacement { InSector, NearSite, Far, Anywhere };

[[nodiscard]] DecoyPlacement parse_decoy_placement(std::string_view s);

struct DecoyGroup {
  std::size_t venues = 0;
  std::size_t events_per_venue = 1;
  DecoyPlacement placement = DecoyPlacement::Anywhere;
  std::string target_cell;  ///< required for InSector
};

/// Everything generate() needs. Sites: SITE_1 sits at the centre of the area,
/// the rest are uniform in the box. Cells are named CELL_<site><letter> with
/// evenly spaced azimuths starting at 0.
struct ScenarioSpec {
  std::uint64_t seed = 1;
  std::size_t n_sites = 1;
  std::size_t sectors_per_site = 3;
  BoxScope area;
  Timestamp start{};
  int days = 14;
  Duration period = std::chrono::hours(1);
  std::vector<MetricSpec> metrics;
  std::vector<InjectedEventSpec> injected;
  std::vector<DecoyGroup> decoys;
  /// Decoy events keep this far from every injected event.
  Duration decoy_gap = std::chrono::hours(6);
  GeoAssocParams geo;
  EawParams eaw;
  Normalization normalization = Normalization::HourOfDay;

  /// Throws SpecError.
  void validate() const;
};

/// Throws SpecError.
[[nodiscard]] ScenarioSpec scenario_spec_from_json(const nlohmann::json& j);
[[nodiscard]] ScenarioSpec load_scenario_spec(const std::string& path);

struct GroundTruthEntry {
  std::string event_id;
  std::string venue;
  std::vector<std::string> causal_cells;
  std::vector<std::string> metrics;
};

struct GroundTruth {
  std::optional<std::string> target_cell;
  std::vector<GroundTruthEntry> injected;
  std::vector<std::string> decoy_venues;
  std::vector<std::string> far_venues;  ///< subset placed beyond max_dist of every site
};

[[nodiscard]] nlohmann::json to_json(const GroundTruth& g);
[[nodiscard]] GroundTruth ground_truth_from_json(const nlohmann::json& j);

struct ScenarioBundle {
  Topology topology;
  std::vector<KpiSeries> kpis;  ///< empty for event-only fixtures
  std::vector<SocialEvent> events;
  GroundTruth truth;
  RunConfig config;  ///< paths relative to the bundle directory
};

inline constexpr const char* kSimSource = "sim";

/// Field map of the feed written by write_bundle.
[[nodiscard]] std::map<std::string, std::string> sim_field_map();
/// Events in the simulated feed format (nested, lower-case keys).
[[nodiscard]] std::string sim_feed_ndjson(const std::vector<SocialEvent>& events);

/// KPI[n] = profile[hour(n)] + sum of direction * amplitude * gaussian for
/// each injected event affecting the cell + N(0, noise_sigma). The gaussian is
/// centred on the midpoint of the event's association window with
/// sigma = multiplier * L / 6. Deterministic per seed. Throws SpecError.
[[nodiscard]] ScenarioBundle generate(const ScenarioSpec& spec);

/// One tri-sector site near Malaga with 15 venues inside 2 km: five inside
/// CELL_1A's beam, with target per-venue correlations of 0.83 / 0.73 / 0.84, and ten
/// outside it. 29 events over nine days of hourly KPIs.
[[nodiscard]] ScenarioBundle table1_fixture();

/// Event-only feed of 2200 events at 600 venues; with the bundled filter
/// config 1768 events at 507 venues survive.
[[nodiscard]] ScenarioBundle funnel_fixture();

/// One causal venue with three events in CELL_1A's beam, twelve in-beam decoy
/// venues, four near other sites and three far away; 14 days, hourly.
[[nodiscard]] ScenarioSpec detection_spec(std::uint64_t seed);

/// Writes topology.csv, kpis.csv, source_events.ndjson, ground_truth.json and
/// config.json (files without content are skipped).
void write_bundle(const std::string& dir, const ScenarioBundle& bundle);

/// `table1`, `funnel` or `detection`. Throws SpecError for unknown names.
[[nodiscard]] ScenarioBundle preset_bundle(std::string_view name, std::uint64_t seed = 1);

}  // namespace socialoam
