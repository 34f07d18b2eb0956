#pragma once

#include <chrono>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "socialoam/geodesy.hpp"
#include "socialoam/time.hpp"

namespace socialoam {

struct Site {
  std::string site_id;
  GeoPoint location;
  std::vector<std::string> cell_ids;
};

struct Cell {
  std::string cell_id;
  std::string site_id;
  double azimuth = 0.0;    ///< degrees clockwise from north, [0, 360)
  double hor_width = 0.0;  ///< degrees, (0, 360]
  std::string technology;
};

/// Sites and cells with id lookup. Sites are ordered by site_id.
class Topology {
 public:
  Topology() = default;
  /// Groups cells by site_id. `site_locations` supplies each site's position.
  Topology(std::vector<Cell> cells, const std::map<std::string, GeoPoint>& site_locations);

  [[nodiscard]] const std::vector<Site>& sites() const noexcept { return sites_; }
  [[nodiscard]] const std::vector<Cell>& cells() const noexcept { return cells_; }
  [[nodiscard]] const Site* find_site(const std::string& id) const;
  [[nodiscard]] const Cell* find_cell(const std::string& id) const;
  [[nodiscard]] std::vector<Cell> cells_of(const Site& site) const;

 private:
  std::vector<Site> sites_;
  std::vector<Cell> cells_;
  std::map<std::string, std::size_t> site_index_;
  std::map<std::string, std::size_t> cell_index_;
};

/// Header: `cell_id,site_id,lat,lon,azimuth,hor_width,technology`.
/// Throws SchemaError or InvariantError (with the row number).
[[nodiscard]] Topology load_topology(const std::string& path);
[[nodiscard]] Topology parse_topology(std::istream& in);
void save_topology(const std::string& path, const Topology& topology);
[[nodiscard]] std::string topology_to_csv(const Topology& topology);

/// Uniformly sampled metric x[n]; sample n covers
/// [epoch0 + n*period, epoch0 + (n+1)*period). Absent samples are NaN.
struct KpiSeries {
  std::string cell_id;
  std::string metric;
  Timestamp epoch0{};
  Duration period = std::chrono::hours(1);
  Eigen::VectorXd values;

  [[nodiscard]] Eigen::Index size() const noexcept { return values.size(); }
  [[nodiscard]] Timestamp time_of(Eigen::Index n) const { return epoch0 + period * n; }
  [[nodiscard]] Timestamp end() const { return time_of(values.size()); }
};

enum class PeriodHint { HourOfWeek, HourOfDay };

[[nodiscard]] PeriodHint parse_period_hint(std::string_view s);
[[nodiscard]] std::string_view period_hint_name(PeriodHint h);

/// Residuals after subtracting a per-slot median baseline.
struct NormalizedSeries {
  KpiSeries residual;
  PeriodHint hint = PeriodHint::HourOfWeek;
  /// 168 hour-of-week or 24 hour-of-day medians; NaN for empty slots.
  Eigen::VectorXd baseline;

  /// Slot of sample n (hour-of-week counted from Monday 00:00 UTC).
  [[nodiscard]] Eigen::Index slot(Eigen::Index n) const;
  /// residual + baseline[slot(n)].
  [[nodiscard]] Eigen::VectorXd reconstruct() const;
};

[[nodiscard]] Eigen::Index slot_count(PeriodHint hint);
[[nodiscard]] Eigen::Index slot_of(Timestamp t, PeriodHint hint);

/// baseline[k] = median of present samples in slot k;
/// residual[n] = value[n] - baseline[slot(n)]. Absent samples stay absent.
/// Throws InsufficientHistory when the series spans fewer than two cycles.
[[nodiscard]] NormalizedSeries normalize_periodic(const KpiSeries& series, PeriodHint hint);

/// Long-format CSV `cell_id,metric,timestamp,value`. One series per
/// (cell_id, metric); gaps and empty/NA values become absent samples. The
/// period is the smallest positive timestamp delta; a single-row series
/// defaults to one hour. Throws SchemaError, NonUniformPeriod, InvariantError.
[[nodiscard]] std::vector<KpiSeries> load_kpis(const std::string& path);
[[nodiscard]] std::vector<KpiSeries> parse_kpis(std::istream& in);
void save_kpis(const std::string& path, const std::vector<KpiSeries>& series);
[[nodiscard]] std::string kpis_to_csv(const std::vector<KpiSeries>& series);

}  // namespace socialoam
