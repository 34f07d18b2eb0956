#include "socialoam/network.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <fmt/format.h>

#include "socialoam/csv.hpp"
#include "socialoam/errors.hpp"
#include "socialoam/io.hpp"
#include "socialoam/stats.hpp"

namespace socialoam {
namespace {

double parse_double(const std::string& s, const char* what, std::size_t row) {
  double v = 0.0;
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  while (first != last && *first == ' ') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last || !std::isfinite(v)) {
    throw InvariantError(fmt::format("{} '{}' is not a number", what, s), row);
  }
  return v;
}

std::size_t require_column(const csv::Table& t, const char* name) {
  const auto c = t.column(name);
  if (!c) throw SchemaError(fmt::format("missing column '{}'", name));
  return *c;
}

// Monday 1970-01-05 00:00 UTC, the first Monday of the epoch.
constexpr long long kFirstMondaySeconds = 4 * 86400;

}  // namespace

Topology::Topology(std::vector<Cell> cells, const std::map<std::string, GeoPoint>& site_locations)
    : cells_(std::move(cells)) {
  std::map<std::string, std::vector<std::string>> members;
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    members[cells_[i].site_id].push_back(cells_[i].cell_id);
    cell_index_[cells_[i].cell_id] = i;
  }
  for (auto& [site_id, ids] : members) {
    const auto loc = site_locations.find(site_id);
    if (loc == site_locations.end()) throw InvariantError("site '" + site_id + "' has no location");
    site_index_[site_id] = sites_.size();
    sites_.push_back({site_id, loc->second, std::move(ids)});
  }
}

const Site* Topology::find_site(const std::string& id) const {
  const auto it = site_index_.find(id);
  return it == site_index_.end() ? nullptr : &sites_[it->second];
}

const Cell* Topology::find_cell(const std::string& id) const {
  const auto it = cell_index_.find(id);
  return it == cell_index_.end() ? nullptr : &cells_[it->second];
}

std::vector<Cell> Topology::cells_of(const Site& site) const {
  std::vector<Cell> out;
  for (const auto& id : site.cell_ids) {
    if (const Cell* c = find_cell(id)) out.push_back(*c);
  }
  return out;
}

Topology parse_topology(std::istream& in) {
  const csv::Table t = csv::read(in);
  const auto c_cell = require_column(t, "cell_id");
  const auto c_site = require_column(t, "site_id");
  const auto c_lat = require_column(t, "lat");
  const auto c_lon = require_column(t, "lon");
  const auto c_az = require_column(t, "azimuth");
  const auto c_width = require_column(t, "hor_width");
  const auto c_tech = require_column(t, "technology");

  std::vector<Cell> cells;
  std::map<std::string, GeoPoint> sites;
  std::map<std::string, bool> seen_cells;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    const std::size_t rowno = r + 1;
    if (row.size() != t.header.size()) throw SchemaError(fmt::format("row {}: expected {} fields", rowno, t.header.size()));
    Cell cell;
    cell.cell_id = row[c_cell];
    cell.site_id = row[c_site];
    if (cell.cell_id.empty() || cell.site_id.empty()) throw InvariantError("empty cell_id or site_id", rowno);
    const GeoPoint p{parse_double(row[c_lat], "lat", rowno), parse_double(row[c_lon], "lon", rowno)};
    if (!is_valid(p)) throw InvariantError("coordinates out of range", rowno);
    cell.azimuth = parse_double(row[c_az], "azimuth", rowno);
    if (!(cell.azimuth >= 0.0 && cell.azimuth < 360.0)) {
      throw InvariantError(fmt::format("azimuth {} outside [0, 360)", cell.azimuth), rowno);
    }
    cell.hor_width = parse_double(row[c_width], "hor_width", rowno);
    if (!(cell.hor_width > 0.0 && cell.hor_width <= 360.0)) {
      throw InvariantError(fmt::format("hor_width {} outside (0, 360]", cell.hor_width), rowno);
    }
    cell.technology = row[c_tech];
    if (seen_cells[cell.cell_id]) throw InvariantError("duplicate cell_id '" + cell.cell_id + "'", rowno);
    seen_cells[cell.cell_id] = true;
    if (const auto it = sites.find(cell.site_id); it != sites.end() && !(it->second == p)) {
      throw InvariantError("site '" + cell.site_id + "' listed with different coordinates", rowno);
    }
    sites[cell.site_id] = p;
    cells.push_back(std::move(cell));
  }
  return Topology(std::move(cells), sites);
}

Topology load_topology(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open topology '" + path + "'");
  return parse_topology(in);
}

std::string topology_to_csv(const Topology& topology) {
  std::string out = "cell_id,site_id,lat,lon,azimuth,hor_width,technology\n";
  for (const auto& c : topology.cells()) {
    const Site* s = topology.find_site(c.site_id);
    out += csv::join({c.cell_id, c.site_id, fmt::format("{}", s->location.lat), fmt::format("{}", s->location.lon),
                      fmt::format("{}", c.azimuth), fmt::format("{}", c.hor_width), c.technology});
    out += '\n';
  }
  return out;
}

void save_topology(const std::string& path, const Topology& topology) {
  write_file_atomic(path, topology_to_csv(topology));
}

PeriodHint parse_period_hint(std::string_view s) {
  if (s == "hour_of_week") return PeriodHint::HourOfWeek;
  if (s == "hour_of_day") return PeriodHint::HourOfDay;
  throw ConfigError(fmt::format("unknown period hint '{}'", s));
}

std::string_view period_hint_name(PeriodHint h) {
  return h == PeriodHint::HourOfWeek ? "hour_of_week" : "hour_of_day";
}

Eigen::Index slot_count(PeriodHint hint) { return hint == PeriodHint::HourOfWeek ? 168 : 24; }

Eigen::Index slot_of(Timestamp t, PeriodHint hint) {
  const auto since_monday = t.time_since_epoch() - Duration(kFirstMondaySeconds);
  const long long hour = floor_div(since_monday, std::chrono::hours(1));
  const long long slots = slot_count(hint);
  return static_cast<Eigen::Index>(((hour % slots) + slots) % slots);
}

Eigen::Index NormalizedSeries::slot(Eigen::Index n) const { return slot_of(residual.time_of(n), hint); }

Eigen::VectorXd NormalizedSeries::reconstruct() const {
  Eigen::VectorXd out(residual.size());
  for (Eigen::Index n = 0; n < residual.size(); ++n) out[n] = residual.values[n] + baseline[slot(n)];
  return out;
}

NormalizedSeries normalize_periodic(const KpiSeries& series, PeriodHint hint) {
  const Duration cycle = hint == PeriodHint::HourOfWeek ? Duration(std::chrono::hours(168)) : Duration(std::chrono::hours(24));
  if (series.period * series.size() < 2 * cycle) {
    throw InsufficientHistory(fmt::format("{}/{}: {} samples cover less than two {} cycles", series.cell_id, series.metric,
                                          series.size(), period_hint_name(hint)));
  }
  NormalizedSeries out;
  out.hint = hint;
  out.residual = series;
  const Eigen::Index slots = slot_count(hint);
  std::vector<std::vector<double>> buckets(static_cast<std::size_t>(slots));
  std::vector<Eigen::Index> slot_index(static_cast<std::size_t>(series.size()));
  for (Eigen::Index n = 0; n < series.size(); ++n) {
    const Eigen::Index k = slot_of(series.time_of(n), hint);
    slot_index[static_cast<std::size_t>(n)] = k;
    if (!is_absent(series.values[n])) buckets[static_cast<std::size_t>(k)].push_back(series.values[n]);
  }
  out.baseline.resize(slots);
  for (Eigen::Index k = 0; k < slots; ++k) out.baseline[k] = median(std::move(buckets[static_cast<std::size_t>(k)]));
  for (Eigen::Index n = 0; n < series.size(); ++n) {
    out.residual.values[n] = series.values[n] - out.baseline[slot_index[static_cast<std::size_t>(n)]];
  }
  return out;
}

std::vector<KpiSeries> parse_kpis(std::istream& in) {
  const csv::Table t = csv::read(in);
  const auto c_cell = require_column(t, "cell_id");
  const auto c_metric = require_column(t, "metric");
  const auto c_time = require_column(t, "timestamp");
  const auto c_value = require_column(t, "value");

  struct Sample {
    Timestamp t;
    double v;
    std::size_t row;
  };
  std::map<std::pair<std::string, std::string>, std::vector<Sample>> grouped;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    const std::size_t rowno = r + 1;
    if (row.size() != t.header.size()) throw SchemaError(fmt::format("row {}: expected {} fields", rowno, t.header.size()));
    Timestamp ts;
    try {
      ts = parse_rfc3339(row[c_time]);
    } catch (const UnparseableTimestamp& e) {
      throw InvariantError(e.what(), rowno);
    }
    const std::string& raw = row[c_value];
    const bool missing = raw.empty() || raw == "NA" || raw == "NaN" || raw == "nan" || raw == "null";
    const double v = missing ? kAbsent<double> : parse_double(raw, "value", rowno);
    grouped[{row[c_cell], row[c_metric]}].push_back({ts, v, rowno});
  }

  std::vector<KpiSeries> out;
  for (auto& [key, samples] : grouped) {
    std::stable_sort(samples.begin(), samples.end(), [](const Sample& a, const Sample& b) { return a.t < b.t; });
    Duration period = std::chrono::hours(1);
    std::optional<Duration> min_delta;
    for (std::size_t i = 1; i < samples.size(); ++i) {
      const Duration d = samples[i].t - samples[i - 1].t;
      if (d.count() == 0) throw InvariantError(fmt::format("duplicate timestamp for {}/{}", key.first, key.second), samples[i].row);
      if (!min_delta || d < *min_delta) min_delta = d;
    }
    if (min_delta) period = *min_delta;
    for (std::size_t i = 1; i < samples.size(); ++i) {
      const Duration d = samples[i].t - samples[i - 1].t;
      if (d.count() % period.count() != 0) {
        throw NonUniformPeriod(fmt::format("{}/{}: delta {} s is not a multiple of {} s (row {})", key.first, key.second,
                                           d.count(), period.count(), samples[i].row));
      }
    }
    KpiSeries s;
    s.cell_id = key.first;
    s.metric = key.second;
    s.epoch0 = samples.front().t;
    s.period = period;
    const auto length = static_cast<Eigen::Index>((samples.back().t - s.epoch0) / period) + 1;
    s.values = Eigen::VectorXd::Constant(length, kAbsent<double>);
    for (const auto& smp : samples) s.values[static_cast<Eigen::Index>((smp.t - s.epoch0) / period)] = smp.v;
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<KpiSeries> load_kpis(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open KPI file '" + path + "'");
  return parse_kpis(in);
}

std::string kpis_to_csv(const std::vector<KpiSeries>& series) {
  std::string out = "cell_id,metric,timestamp,value\n";
  for (const auto& s : series) {
    for (Eigen::Index n = 0; n < s.size(); ++n) {
      const double v = s.values[n];
      out += csv::join({s.cell_id, s.metric, format_rfc3339(s.time_of(n)), is_absent(v) ? std::string() : fmt::format("{}", v)});
      out += '\n';
    }
  }
  return out;
}

void save_kpis(const std::string& path, const std::vector<KpiSeries>& series) {
  write_file_atomic(path, kpis_to_csv(series));
}

}  // namespace socialoam
