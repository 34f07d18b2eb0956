#include "socialoam/association.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include <fmt/format.h>

#include "socialoam/errors.hpp"
#include "socialoam/similarity.hpp"
#include "socialoam/stats.hpp"

namespace socialoam {

void GeoAssocParams::validate() const {
  if (!(max_dist_km > 0.0) || !std::isfinite(max_dist_km)) throw ConfigError("max_dist_km must be positive");
  if (max_sites < min_sites) throw ConfigError("max_sites must be >= min_sites");
}

double cell_bearing_offset(const Cell& cell, const Site& site, const GeoPoint& point) {
  return angular_difference_deg(cell.azimuth, initial_bearing_deg(site.location, point));
}

std::vector<SiteDistance> associate_geographic(const GeoPoint& point, const std::vector<Site>& sites,
                                               const GeoAssocParams& params) {
  std::vector<SiteDistance> all;
  all.reserve(sites.size());
  for (const auto& s : sites) all.push_back({s.site_id, haversine_km(point, s.location)});
  std::sort(all.begin(), all.end(), [](const SiteDistance& a, const SiteDistance& b) {
    return a.distance_km != b.distance_km ? a.distance_km < b.distance_km : a.site_id < b.site_id;
  });
  std::size_t within = 0;
  while (within < all.size() && all[within].distance_km <= params.max_dist_km) ++within;
  const std::size_t keep = std::min(all.size(), std::min(params.max_sites, std::max(within, params.min_sites)));
  all.resize(keep);
  return all;
}

bool in_beam(const Cell& cell, double offset_deg) { return cell.hor_width >= 360.0 || offset_deg < cell.hor_width / 2.0; }

std::vector<Cell> filter_by_bearing(const std::vector<Cell>& cells_of_site, const Site& site, const GeoPoint& point) {
  std::vector<Cell> out;
  for (const auto& c : cells_of_site) {
    if (in_beam(c, cell_bearing_offset(c, site, point))) out.push_back(c);
  }
  return out;
}

void EawParams::validate() const {
  if (pre_margin < 0 || post_margin < 0) throw ConfigError("EAW margins must be >= 0");
  if (default_duration.count() <= 0) throw ConfigError("default event duration must be positive");
  for (const auto& [type, d] : category_durations) {
    if (d.count() <= 0) throw ConfigError("duration for '" + type + "' must be positive");
  }
  if (!(sigma_multiplier > 0.0) || !std::isfinite(sigma_multiplier)) throw ConfigError("sigma multiplier must be positive");
}

Duration EawParams::duration_for(const SocialEvent& e) const {
  if (e.category && !category_durations.empty()) {
    const std::string key = normalize_text(*e.category);
    for (const auto& [type, d] : category_durations) {
      if (normalize_text(type) == key) return d;
    }
  }
  return default_duration;
}

Eaw build_eaw(const SocialEvent& event, const KpiSeries& series, const EawParams& params) {
  const Timestamp stop = event.end_time ? *event.end_time : event.start_time + params.duration_for(event);
  if (series.size() == 0 || stop < series.epoch0 || event.start_time >= series.end()) {
    throw OutOfRange(fmt::format("event '{}' lies outside {}/{}", event.event_id, series.cell_id, series.metric));
  }
  const long long first = floor_div(event.start_time - series.epoch0, series.period) - params.pre_margin;
  const long long last = ceil_div(stop - series.epoch0, series.period) + params.post_margin;
  const long long max_index = series.size() - 1;
  Eaw eaw;
  eaw.cell_id = series.cell_id;
  eaw.metric = series.metric;
  eaw.event_id = event.event_id;
  eaw.n_start = static_cast<Eigen::Index>(std::clamp(first, 0LL, max_index));
  eaw.n_end = static_cast<Eigen::Index>(std::clamp(last, 0LL, max_index));
  return eaw;
}

SocialIndicator social_indicator(const Eaw& eaw, double sigma_multiplier) {
  return {eaw, gaussian_window<double>(eaw.length(), sigma_multiplier)};
}

std::vector<EventCellCorrelation> correlate_event(const SocialEvent& event, const Cell& cell,
                                                  const std::vector<KpiSeries>& metrics, const EawParams& params) {
  std::vector<EventCellCorrelation> out;
  for (const auto& series : metrics) {
    if (series.cell_id != cell.cell_id) continue;
    const Eaw eaw = build_eaw(event, series, params);
    const SocialIndicator s = social_indicator(eaw, params.sigma_multiplier);
    const auto x = series.values.segment(eaw.n_start, eaw.length());
    EventCellCorrelation c;
    c.event_id = event.event_id;
    c.cell_id = cell.cell_id;
    c.metric = series.metric;
    c.r = pearson(s.samples, x);
    c.n_samples = count_present_pairs(s.samples, x);
    c.eaw = eaw;
    out.push_back(std::move(c));
  }
  return out;
}

AggregateStat parse_aggregate_stat(std::string_view s) {
  if (s == "median") return AggregateStat::Median;
  if (s == "mean") return AggregateStat::Mean;
  if (s == "max") return AggregateStat::Max;
  throw ConfigError(fmt::format("unknown aggregate stat '{}' (median|mean|max)", s));
}

std::string_view aggregate_stat_name(AggregateStat s) {
  switch (s) {
    case AggregateStat::Median: return "median";
    case AggregateStat::Mean: return "mean";
    case AggregateStat::Max: return "max";
  }
  return "mean";
}

double VenueImpactReport::stat(AggregateStat s) const noexcept {
  switch (s) {
    case AggregateStat::Median: return median_abs_r;
    case AggregateStat::Mean: return mean_abs_r;
    case AggregateStat::Max: return max_abs_r;
  }
  return mean_abs_r;
}

std::vector<VenueImpactReport> aggregate_venue(const std::string& venue_key,
                                               const std::vector<EventCellCorrelation>& correlations) {
  std::map<std::pair<std::string, std::string>, VenueImpactReport> groups;
  for (const auto& c : correlations) {
    auto& g = groups[{c.cell_id, c.metric}];
    g.venue_key = venue_key;
    g.cell_id = c.cell_id;
    g.metric = c.metric;
    if (c.r) {
      g.r.push_back(*c.r);
      g.event_ids.push_back(c.event_id);
    } else {
      ++g.n_undefined;
    }
  }
  std::vector<VenueImpactReport> out;
  for (auto& [key, g] : groups) {
    if (g.r.empty()) {
      throw NoDefinedCorrelations(
          fmt::format("venue '{}': no defined correlation for {}/{}", venue_key, key.first, key.second));
    }
    std::vector<double> abs_r(g.r.size());
    std::transform(g.r.begin(), g.r.end(), abs_r.begin(), [](double r) { return std::abs(r); });
    g.mean_abs_r = std::accumulate(abs_r.begin(), abs_r.end(), 0.0) / static_cast<double>(abs_r.size());
    g.max_abs_r = *std::max_element(abs_r.begin(), abs_r.end());
    g.median_abs_r = median(std::move(abs_r));
    out.push_back(std::move(g));
  }
  return out;
}

Normalization parse_normalization(std::string_view s) {
  if (s == "none" || s == "raw") return Normalization::None;
  if (s == "hour_of_day") return Normalization::HourOfDay;
  if (s == "hour_of_week") return Normalization::HourOfWeek;
  throw ConfigError(fmt::format("unknown normalization '{}' (none|hour_of_day|hour_of_week)", s));
}

std::string_view normalization_name(Normalization n) {
  switch (n) {
    case Normalization::None: return "none";
    case Normalization::HourOfDay: return "hour_of_day";
    case Normalization::HourOfWeek: return "hour_of_week";
  }
  return "none";
}

std::vector<KpiSeries> prepare_series(const std::vector<KpiSeries>& kpis, Normalization normalization) {
  if (normalization == Normalization::None) return kpis;
  const PeriodHint hint = normalization == Normalization::HourOfDay ? PeriodHint::HourOfDay : PeriodHint::HourOfWeek;
  std::vector<KpiSeries> out;
  out.reserve(kpis.size());
  for (const auto& s : kpis) out.push_back(normalize_periodic(s, hint).residual);
  return out;
}

namespace {

bool event_order(const CandidateEvent& a, const CandidateEvent& b) {
  if (a.event.start_time != b.event.start_time) return a.event.start_time < b.event.start_time;
  return a.event.event_id < b.event.event_id;
}

bool serves(const std::vector<std::string>& cells, const std::string& cell_id) {
  return std::find(cells.begin(), cells.end(), cell_id) != cells.end();
}

}  // namespace

CauseAnalysis identify_causes(const Cell& degraded_cell, const std::vector<SocialEvent>& events,
                              const Topology& topology, const std::vector<KpiSeries>& kpis,
                              const IdentifyParams& params) {
  params.geo.validate();
  params.eaw.validate();
  const Cell* cell = topology.find_cell(degraded_cell.cell_id);
  if (!cell) throw UnknownCell("cell '" + degraded_cell.cell_id + "' not in topology");
  const Site* site = topology.find_site(cell->site_id);
  if (!site) throw UnknownCell("site '" + cell->site_id + "' of cell '" + cell->cell_id + "' not in topology");

  std::vector<KpiSeries> cell_series;
  for (const auto& s : kpis) {
    if (s.cell_id == cell->cell_id && serves(params.metrics, s.metric)) cell_series.push_back(s);
  }
  if (cell_series.empty()) throw MissingData("no KPI series for cell '" + cell->cell_id + "'");
  std::sort(cell_series.begin(), cell_series.end(),
            [](const KpiSeries& a, const KpiSeries& b) { return a.metric < b.metric; });
  cell_series = prepare_series(cell_series, params.normalization);

  CauseAnalysis analysis;
  analysis.cell_id = cell->cell_id;
  analysis.site_id = site->site_id;

  std::set<std::string> near_venues;
  std::map<std::string, std::vector<CandidateEvent>> by_venue;
  for (const auto& e : events) {
    if (!e.has_location()) continue;
    const GeoPoint p = e.location();
    const auto close = associate_geographic(p, topology.sites(), params.geo);
    const auto hit = std::find_if(close.begin(), close.end(),
                                  [&](const SiteDistance& sd) { return sd.site_id == site->site_id; });
    if (hit == close.end()) continue;
    ++analysis.candidate_events;
    const std::string key = venue_key(e);
    near_venues.insert(key);

    CandidateEvent ce{e, hit->distance_km, std::nullopt};
    const bool co_located = p == site->location;
    if (!co_located) ce.bearing_offset = cell_bearing_offset(*cell, *site, p);
    bool pass = false;
    if (params.coverage) {
      pass = serves(params.coverage->serving_cells(e), cell->cell_id);
    } else {
      pass = co_located || !filter_by_bearing({*cell}, *site, p).empty();
    }
    if (pass) by_venue[key].push_back(std::move(ce));
  }
  analysis.candidate_venues = near_venues.size();

  for (auto& [key, members] : by_venue) {
    std::sort(members.begin(), members.end(), event_order);
    CauseCandidate cand;
    cand.venue_key = key;
    for (const auto& ce : members) {
      std::vector<EventCellCorrelation> cs;
      try {
        cs = correlate_event(ce.event, *cell, cell_series, params.eaw);
      } catch (const OutOfRange&) {
        for (const auto& s : cell_series) {
          EventCellCorrelation c;
          c.event_id = ce.event.event_id;
          c.cell_id = cell->cell_id;
          c.metric = s.metric;
          cs.push_back(std::move(c));
        }
      }
      cand.correlations.insert(cand.correlations.end(), cs.begin(), cs.end());
    }
    cand.events = std::move(members);

    // Aggregate per metric so one metric without defined r does not hide the rest.
    for (const auto& metric : params.metrics) {
      std::vector<EventCellCorrelation> subset;
      std::copy_if(cand.correlations.begin(), cand.correlations.end(), std::back_inserter(subset),
                   [&](const EventCellCorrelation& c) { return c.metric == metric; });
      if (subset.empty() || std::none_of(subset.begin(), subset.end(), [](const auto& c) { return c.r.has_value(); })) {
        continue;
      }
      auto reports = aggregate_venue(key, subset);
      cand.per_metric.emplace(metric, std::move(reports.front()));
    }
    for (const auto& metric : params.metrics) {
      const auto it = cand.per_metric.find(metric);
      if (it == cand.per_metric.end()) continue;
      const double v = it->second.stat(params.stat);
      if (!cand.score || v > *cand.score) {
        cand.score = v;
        cand.best_metric = metric;
      }
      if (v > params.r_threshold) cand.flagged = true;
    }
    analysis.ranking.push_back(std::move(cand));
  }

  std::sort(analysis.ranking.begin(), analysis.ranking.end(), [](const CauseCandidate& a, const CauseCandidate& b) {
    if (a.score.has_value() != b.score.has_value()) return a.score.has_value();
    if (a.score && *a.score != *b.score) return *a.score > *b.score;
    return a.venue_key < b.venue_key;
  });
  for (std::size_t i = 0; i < analysis.ranking.size(); ++i) analysis.ranking[i].rank = i + 1;
  return analysis;
}

}  // namespace socialoam
