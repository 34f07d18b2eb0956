#include "socialoam/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <set>

#include <fmt/format.h>

#include "socialoam/errors.hpp"
#include "socialoam/io.hpp"
#include "socialoam/rng.hpp"
#include "json_reader.hpp"

namespace socialoam {
namespace {

using nlohmann::json;
using std::chrono::hours;
using std::chrono::minutes;

constexpr double kKmPerDegLat = kEarthRadiusKm * std::numbers::pi / 180.0;

std::array<double, 24> daily_profile(double base, double swing) {
  std::array<double, 24> p{};
  for (int h = 0; h < 24; ++h) {
    const double shape = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * (h - 3) / 24.0);
    p[static_cast<std::size_t>(h)] = base + swing * shape;
  }
  return p;
}

std::string site_name(std::size_t i) { return fmt::format("SITE_{}", i + 1); }

std::string cell_name(std::size_t site, std::size_t sector) {
  return fmt::format("CELL_{}{}", site + 1, static_cast<char>('A' + sector));
}

Topology build_topology(const std::vector<GeoPoint>& sites, std::size_t sectors) {
  std::vector<Cell> cells;
  std::map<std::string, GeoPoint> locations;
  const double width = 360.0 / static_cast<double>(sectors);
  for (std::size_t s = 0; s < sites.size(); ++s) {
    locations[site_name(s)] = sites[s];
    for (std::size_t k = 0; k < sectors; ++k) {
      cells.push_back({cell_name(s, k), site_name(s), width * static_cast<double>(k), width, "LTE"});
    }
  }
  return Topology(std::move(cells), locations);
}

KpiSeries empty_series(const std::string& cell, const std::string& metric, Timestamp start, Duration period,
                       Eigen::Index n) {
  KpiSeries s;
  s.cell_id = cell;
  s.metric = metric;
  s.epoch0 = start;
  s.period = period;
  s.values = Eigen::VectorXd::Zero(n);
  return s;
}

SocialEvent make_event(const std::string& raw_id, const std::string& name, Timestamp start,
                       std::optional<Timestamp> end, const GeoPoint& where, const std::string& venue,
                       std::optional<std::string> category, double popularity) {
  SocialEvent e;
  e.source_id = kSimSource;
  e.raw_id = raw_id;
  e.event_id = std::string(kSimSource) + "/" + raw_id;
  e.name = name;
  e.start_time = start;
  e.end_time = end;
  e.lat = where.lat;
  e.lon = where.lon;
  e.venue = venue;
  e.category = std::move(category);
  e.popularity = popularity;
  return e;
}

void set_address(SocialEvent& e, const char* city, const char* region) {
  Address a;
  a.city = city;
  a.region = region;
  a.country = "ES";
  e.address = a;
}

RunConfig bundle_config(const std::vector<std::string>& metrics, const GeoAssocParams& geo, const EawParams& eaw,
                        Normalization normalization, bool with_network) {
  RunConfig cfg;
  SourceConfig src;
  src.source_id = kSimSource;
  src.kind = SourceKind::File;
  src.locator = "source_events.ndjson";
  src.format = RecordFormat::JsonRecords;
  src.field_map = sim_field_map();
  cfg.sources.push_back(src);
  cfg.fusion.source_priority[kSimSource] = 0;
  cfg.geo_assoc = geo;
  cfg.eaw = eaw;
  cfg.normalization = normalization;
  if (!metrics.empty()) cfg.metrics = metrics;
  if (with_network) {
    cfg.paths.topology = "topology.csv";
    cfg.paths.kpis = "kpis.csv";
  }
  cfg.paths.out_dir = ".";
  return cfg;
}

// Window residual with Pearson correlation exactly `r` against the indicator
// `s`: amp * (r * u + sqrt(1 - r^2) * v), u the centred indicator and v an
// antisymmetric ramp (orthogonal to u and to the constant). Shifted so the
// window rests on the baseline.
Eigen::VectorXd shaped_window(const Eigen::VectorXd& s, double r, double amp) {
  const Eigen::Index n = s.size();
  Eigen::VectorXd u = s.array() - s.mean();
  u /= u.norm();
  Eigen::VectorXd v(n);
  for (Eigen::Index k = 0; k < n; ++k) v[k] = static_cast<double>(k) - static_cast<double>(n - 1) / 2.0;
  v /= v.norm();
  Eigen::VectorXd w = amp * (r * u + std::sqrt(1.0 - r * r) * v);
  w.array() -= r >= 0.0 ? w.minCoeff() : w.maxCoeff();
  return w;
}

bool far_enough(Timestamp t, const std::vector<Timestamp>& taken, Duration gap) {
  return std::none_of(taken.begin(), taken.end(), [&](Timestamp o) { return (t > o ? t - o : o - t) < gap; });
}

}  // namespace

DecoyPlacement parse_decoy_placement(std::string_view s) {
  if (s == "in_sector") return DecoyPlacement::InSector;
  if (s == "near_site") return DecoyPlacement::NearSite;
  if (s == "far") return DecoyPlacement::Far;
  if (s == "anywhere") return DecoyPlacement::Anywhere;
  throw SpecError(fmt::format("unknown decoy placement '{}' (in_sector|near_site|far|anywhere)", s));
}

void ScenarioSpec::validate() const {
  if (n_sites == 0) throw SpecError("n_sites must be >= 1");
  if (sectors_per_site == 0 || sectors_per_site > 26) throw SpecError("sectors_per_site must be in 1..26");
  if (!(area.lat_min < area.lat_max) || !(area.lon_min < area.lon_max)) throw SpecError("area: min must be below max");
  if (days <= 0) throw SpecError("days must be positive");
  if (period.count() <= 0 || hours(24) % period != Duration::zero()) throw SpecError("period must divide one day");
  if (metrics.empty()) throw SpecError("at least one metric is required");
  std::set<std::string> names;
  for (const auto& m : metrics) {
    if (m.name.empty() || !names.insert(m.name).second) throw SpecError("metric names must be unique and non-empty");
    if (!(m.noise_sigma >= 0.0)) throw SpecError("noise_sigma must be >= 0");
    if (m.direction != 1.0 && m.direction != -1.0) throw SpecError("direction must be +1 or -1");
  }
  for (const auto& e : injected) {
    if (e.venue.empty()) throw SpecError("injected event needs a venue");
    if (!e.location && !e.anchor) throw SpecError("injected event at '" + e.venue + "' needs a location or an anchor");
    if (e.duration.count() <= 0) throw SpecError("injected event duration must be positive");
    for (const auto& [metric, amp] : e.amplitude) {
      if (!names.contains(metric)) throw SpecError("amplitude for unknown metric '" + metric + "'");
      if (!(amp >= 0.0)) throw SpecError("amplitudes must be >= 0");
    }
  }
  for (const auto& d : decoys) {
    if (d.events_per_venue == 0) throw SpecError("decoys: events_per_venue must be >= 1");
    if (d.placement == DecoyPlacement::InSector && d.target_cell.empty()) {
      throw SpecError("decoys: in_sector placement needs target_cell");
    }
  }
  try {
    geo.validate();
    eaw.validate();
  } catch (const ConfigError& e) {
    throw SpecError(e.what());
  }
}

ScenarioSpec scenario_spec_from_json(const nlohmann::json& j) {
  using detail::Obj;
  try {
    ScenarioSpec spec;
    Obj o(j, "spec");
    o.read("seed", spec.seed);
    o.read("n_sites", spec.n_sites);
    o.read("sectors_per_site", spec.sectors_per_site);
    if (const json* a = o.get("area")) {
      Obj ao(*a, "spec.area");
      ao.read("lat_min", spec.area.lat_min);
      ao.read("lat_max", spec.area.lat_max);
      ao.read("lon_min", spec.area.lon_min);
      ao.read("lon_max", spec.area.lon_max);
      ao.finish();
    }
    if (const json* s = o.get("start")) spec.start = parse_rfc3339(o.as<std::string>(*s, "start"));
    o.read("days", spec.days);
    if (const json* p = o.get("period_minutes")) spec.period = minutes(o.as<long long>(*p, "period_minutes"));
    if (const json* ms = o.get("metrics")) {
      for (const auto& m : *ms) {
        Obj mo(m, "spec.metrics[]");
        MetricSpec spec_m;
        mo.read("name", spec_m.name);
        if (const json* p = mo.get("profile")) {
          const auto values = mo.as<std::vector<double>>(*p, "profile");
          if (values.size() != 24) throw SpecError("metric profile must have 24 values");
          std::copy(values.begin(), values.end(), spec_m.profile.begin());
        }
        mo.read("noise_sigma", spec_m.noise_sigma);
        mo.read("direction", spec_m.direction);
        mo.finish();
        spec.metrics.push_back(std::move(spec_m));
      }
    }
    if (const json* es = o.get("injected_events")) {
      for (const auto& e : *es) {
        Obj eo(e, "spec.injected_events[]");
        InjectedEventSpec ie;
        eo.read("venue", ie.venue);
        eo.read("name", ie.name);
        const json* lat = eo.get("lat");
        const json* lon = eo.get("lon");
        if (lat && lon) ie.location = GeoPoint{eo.as<double>(*lat, "lat"), eo.as<double>(*lon, "lon")};
        if (const json* a = eo.get("anchor")) {
          Obj an(*a, "spec.injected_events[].anchor");
          Anchor anchor;
          an.read("site", anchor.site_id);
          an.read("bearing_deg", anchor.bearing_deg);
          an.read("distance_km", anchor.distance_km);
          an.finish();
          ie.anchor = anchor;
        }
        if (const json* s = eo.get("start")) ie.start = parse_rfc3339(eo.as<std::string>(*s, "start"));
        if (const json* d = eo.get("duration_minutes")) ie.duration = minutes(eo.as<long long>(*d, "duration_minutes"));
        if (const json* c = eo.get("category")) ie.category = eo.as<std::string>(*c, "category");
        eo.read("amplitude", ie.amplitude);
        eo.read("affected_cells", ie.affected_cells);
        eo.finish();
        spec.injected.push_back(std::move(ie));
      }
    }
    if (const json* ds = o.get("decoys")) {
      for (const auto& d : *ds) {
        Obj dobj(d, "spec.decoys[]");
        DecoyGroup g;
        dobj.read("venues", g.venues);
        dobj.read("events_per_venue", g.events_per_venue);
        if (const json* p = dobj.get("placement")) g.placement = parse_decoy_placement(dobj.as<std::string>(*p, "placement"));
        dobj.read("target_cell", g.target_cell);
        dobj.finish();
        spec.decoys.push_back(std::move(g));
      }
    }
    if (const json* g = o.get("decoy_gap_minutes")) spec.decoy_gap = minutes(o.as<long long>(*g, "decoy_gap_minutes"));
    if (const json* g = o.get("geo_assoc")) spec.geo = geo_assoc_from_json(*g);
    if (const json* e = o.get("eaw")) spec.eaw = eaw_params_from_json(*e);
    if (const json* n = o.get("normalization")) spec.normalization = parse_normalization(o.as<std::string>(*n, "normalization"));
    o.finish();
    spec.validate();
    return spec;
  } catch (const ConfigError& e) {
    throw SpecError(e.what());
  } catch (const UnparseableTimestamp& e) {
    throw SpecError(e.what());
  }
}

ScenarioSpec load_scenario_spec(const std::string& path) {
  const std::string text = read_file(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SpecError("spec '" + path + "': " + e.what());
  }
  return scenario_spec_from_json(j);
}

nlohmann::json to_json(const GroundTruth& g) {
  json injected = json::array();
  for (const auto& e : g.injected) {
    injected.push_back(
        {{"event_id", e.event_id}, {"venue", e.venue}, {"causal_cells", e.causal_cells}, {"metrics", e.metrics}});
  }
  json j{{"injected", injected}, {"decoy_venues", g.decoy_venues}, {"far_venues", g.far_venues}};
  j["target_cell"] = g.target_cell ? json(*g.target_cell) : json(nullptr);
  return j;
}

GroundTruth ground_truth_from_json(const nlohmann::json& j) {
  try {
    GroundTruth g;
    if (const auto it = j.find("target_cell"); it != j.end() && !it->is_null()) g.target_cell = it->get<std::string>();
    for (const auto& e : j.at("injected")) {
      g.injected.push_back({e.at("event_id").get<std::string>(), e.at("venue").get<std::string>(),
                            e.at("causal_cells").get<std::vector<std::string>>(),
                            e.at("metrics").get<std::vector<std::string>>()});
    }
    g.decoy_venues = j.at("decoy_venues").get<std::vector<std::string>>();
    g.far_venues = j.at("far_venues").get<std::vector<std::string>>();
    return g;
  } catch (const json::exception& e) {
    throw SchemaError(std::string("bad ground truth: ") + e.what());
  }
}

std::map<std::string, std::string> sim_field_map() {
  return {
      {"id", "ID"},
      {"title", "NAME"},
      {"start", "START_TIME"},
      {"end", "END_TIME"},
      {"location.lat", "LAT"},
      {"location.lon", "LON"},
      {"place.name", "VENUE"},
      {"place.street", "ADDRESS.STREET"},
      {"place.city", "ADDRESS.CITY"},
      {"place.region", "ADDRESS.REGION"},
      {"place.country", "ADDRESS.COUNTRY"},
      {"category", "TYPE"},
      {"popularity", "POPULARITY"},
  };
}

std::string sim_feed_ndjson(const std::vector<SocialEvent>& events) {
  std::string out;
  for (const auto& e : events) {
    json j{{"id", e.raw_id}, {"title", e.name}, {"start", format_rfc3339(e.start_time)}};
    if (e.end_time) j["end"] = format_rfc3339(*e.end_time);
    if (e.has_location()) j["location"] = {{"lat", *e.lat}, {"lon", *e.lon}};
    json place = json::object();
    if (e.venue) place["name"] = *e.venue;
    if (e.address) {
      if (e.address->street) place["street"] = *e.address->street;
      if (e.address->city) place["city"] = *e.address->city;
      if (e.address->region) place["region"] = *e.address->region;
      if (e.address->country) place["country"] = *e.address->country;
    }
    if (!place.empty()) j["place"] = place;
    if (e.category) j["category"] = *e.category;
    if (e.popularity) j["popularity"] = *e.popularity;
    out += j.dump();
    out += '\n';
  }
  return out;
}

ScenarioBundle generate(const ScenarioSpec& spec) {
  spec.validate();
  const SplitMix64 root(spec.seed);
  ScenarioBundle bundle;

  // Sites: SITE_1 at the centre, the others uniform with 0.5 km separation.
  SplitMix64 site_rng = root.fork(1);
  std::vector<GeoPoint> site_points{{(spec.area.lat_min + spec.area.lat_max) / 2.0,
                                     (spec.area.lon_min + spec.area.lon_max) / 2.0}};
  for (int attempt = 0; site_points.size() < spec.n_sites; ++attempt) {
    if (attempt > 100000) throw SpecError("cannot place sites 0.5 km apart inside the area");
    const GeoPoint p{site_rng.uniform(spec.area.lat_min, spec.area.lat_max),
                     site_rng.uniform(spec.area.lon_min, spec.area.lon_max)};
    if (std::all_of(site_points.begin(), site_points.end(), [&](const GeoPoint& q) { return haversine_km(p, q) >= 0.5; })) {
      site_points.push_back(p);
    }
  }
  bundle.topology = build_topology(site_points, spec.sectors_per_site);
  const Topology& topo = bundle.topology;

  const Eigen::Index n_samples = static_cast<Eigen::Index>(hours(24) * spec.days / spec.period);
  const Timestamp span_end = spec.start + spec.period * n_samples;
  const KpiSeries axis = empty_series("", "", spec.start, spec.period, n_samples);

  // Injected events and their causal cells.
  struct Injection {
    SocialEvent event;
    std::vector<std::string> cells;
    Eaw eaw;
  };
  std::vector<Injection> injections;
  for (std::size_t i = 0; i < spec.injected.size(); ++i) {
    const auto& ie = spec.injected[i];
    GeoPoint where;
    if (ie.location) {
      where = *ie.location;
    } else {
      const Site* s = topo.find_site(ie.anchor->site_id);
      if (!s) throw SpecError("anchor site '" + ie.anchor->site_id + "' does not exist");
      where = destination_point(s->location, ie.anchor->bearing_deg, ie.anchor->distance_km);
    }
    if (!is_valid(where)) throw SpecError("injected event at '" + ie.venue + "' has invalid coordinates");
    const Timestamp stop = ie.start + ie.duration;
    if (ie.start < spec.start || stop > span_end) {
      throw SpecError(fmt::format("injected event at '{}' outside the scenario time span", ie.venue));
    }
    Injection inj;
    inj.event = make_event(fmt::format("inj-{}", i + 1), ie.name.empty() ? fmt::format("Event {}", i + 1) : ie.name,
                           ie.start, stop, where, ie.venue, ie.category, 100.0);
    if (!ie.affected_cells.empty()) {
      for (const auto& c : ie.affected_cells) {
        if (!topo.find_cell(c)) throw SpecError("affected cell '" + c + "' does not exist");
      }
      inj.cells = ie.affected_cells;
    } else {
      GeoAssocParams nearest{std::numeric_limits<double>::max(), 1, 1};
      const auto close = associate_geographic(where, topo.sites(), nearest);
      const Site* s = topo.find_site(close.front().site_id);
      if (where == s->location) {
        for (const auto& c : topo.cells_of(*s)) inj.cells.push_back(c.cell_id);
      } else {
        for (const auto& c : filter_by_bearing(topo.cells_of(*s), *s, where)) inj.cells.push_back(c.cell_id);
      }
    }
    inj.eaw = build_eaw(inj.event, axis, spec.eaw);
    GroundTruthEntry truth{inj.event.event_id, ie.venue, inj.cells, {}};
    for (const auto& m : spec.metrics) {
      if (const auto it = ie.amplitude.find(m.name); it != ie.amplitude.end() && it->second > 0.0) {
        truth.metrics.push_back(m.name);
      }
    }
    bundle.truth.injected.push_back(std::move(truth));
    injections.push_back(std::move(inj));
  }
  for (const auto& d : spec.decoys) {
    if (d.placement == DecoyPlacement::InSector) {
      bundle.truth.target_cell = d.target_cell;
      break;
    }
  }
  if (!bundle.truth.target_cell && !injections.empty() && !injections.front().cells.empty()) {
    bundle.truth.target_cell = injections.front().cells.front();
  }

  // KPI series: one noise stream per (cell, metric).
  for (std::size_t ci = 0; ci < topo.cells().size(); ++ci) {
    const Cell& cell = topo.cells()[ci];
    for (std::size_t mi = 0; mi < spec.metrics.size(); ++mi) {
      const MetricSpec& m = spec.metrics[mi];
      KpiSeries s = empty_series(cell.cell_id, m.name, spec.start, spec.period, n_samples);
      SplitMix64 noise = root.fork(1000 + ci * 64 + mi);
      for (Eigen::Index n = 0; n < n_samples; ++n) {
        double v = m.profile[static_cast<std::size_t>(slot_of(s.time_of(n), PeriodHint::HourOfDay))];
        for (std::size_t k = 0; k < injections.size(); ++k) {
          const auto& inj = injections[k];
          if (std::find(inj.cells.begin(), inj.cells.end(), cell.cell_id) == inj.cells.end()) continue;
          const auto amp = spec.injected[k].amplitude.find(m.name);
          if (amp == spec.injected[k].amplitude.end()) continue;
          const double mu = static_cast<double>(inj.eaw.n_start + inj.eaw.n_end) / 2.0;
          const double sigma = indicator_sigma(inj.eaw.length(), spec.eaw.sigma_multiplier);
          v += m.direction * amp->second * gaussian_at(static_cast<double>(n), mu, sigma);
        }
        if (m.noise_sigma > 0.0) v += m.noise_sigma * noise.normal();
        s.values[n] = v;
      }
      bundle.kpis.push_back(std::move(s));
    }
  }

  std::vector<Timestamp> taken;
  for (const auto& inj : injections) {
    bundle.events.push_back(inj.event);
    taken.push_back(inj.event.start_time);
  }

  // Decoys: placement first, then times that keep clear of every injection.
  static const char* kKinds[] = {"Concert", "Festival", "Exhibition", "Match", "Conference", "Fair", "Show", "Parade"};
  SplitMix64 decoy_rng = root.fork(2);
  const long long total_hours = std::chrono::duration_cast<hours>(span_end - spec.start).count();
  for (std::size_t g = 0; g < spec.decoys.size(); ++g) {
    const DecoyGroup& group = spec.decoys[g];
    const Cell* target = nullptr;
    if (group.placement == DecoyPlacement::InSector) {
      target = topo.find_cell(group.target_cell);
      if (!target) throw SpecError("decoy target cell '" + group.target_cell + "' does not exist");
    }
    for (std::size_t v = 0; v < group.venues; ++v) {
      const std::string venue = fmt::format("DECOY_{}_{}", g + 1, v + 1);
      GeoPoint where;
      switch (group.placement) {
        case DecoyPlacement::InSector: {
          const Site* s = topo.find_site(target->site_id);
          const double half = std::min(target->hor_width, 359.0) / 2.0;
          const double bearing = wrap_360(target->azimuth + decoy_rng.uniform(-0.8, 0.8) * half);
          where = destination_point(s->location, bearing, decoy_rng.uniform(0.2, 0.95 * spec.geo.max_dist_km));
          break;
        }
        case DecoyPlacement::NearSite: {
          const Site& s = topo.sites()[decoy_rng.below(topo.sites().size())];
          where = destination_point(s.location, decoy_rng.uniform(0.0, 360.0),
                                    decoy_rng.uniform(0.2, 0.95 * spec.geo.max_dist_km));
          break;
        }
        case DecoyPlacement::Far: {
          // Sampled in the area grown by 3 km on every side.
          const double pad_lat = 3.0 / kKmPerDegLat;
          const double mid_lat = (spec.area.lat_min + spec.area.lat_max) / 2.0 * std::numbers::pi / 180.0;
          const double pad_lon = pad_lat / std::max(0.01, std::cos(mid_lat));
          bool placed = false;
          for (int attempt = 0; attempt < 100000 && !placed; ++attempt) {
            where = {std::clamp(decoy_rng.uniform(spec.area.lat_min - pad_lat, spec.area.lat_max + pad_lat), -90.0, 90.0),
                     wrap_lon(decoy_rng.uniform(spec.area.lon_min - pad_lon, spec.area.lon_max + pad_lon))};
            placed = std::all_of(topo.sites().begin(), topo.sites().end(), [&](const Site& s) {
              return haversine_km(where, s.location) > 1.25 * spec.geo.max_dist_km;
            });
          }
          if (!placed) throw SpecError("cannot place a far decoy away from every site");
          bundle.truth.far_venues.push_back(venue);
          break;
        }
        case DecoyPlacement::Anywhere:
          where = {decoy_rng.uniform(spec.area.lat_min, spec.area.lat_max),
                   decoy_rng.uniform(spec.area.lon_min, spec.area.lon_max)};
          break;
      }
      bundle.truth.decoy_venues.push_back(venue);

      for (std::size_t k = 0; k < group.events_per_venue; ++k) {
        bool placed = false;
        for (int attempt = 0; attempt < 100000 && !placed; ++attempt) {
          const Timestamp start = spec.start + hours(2 + static_cast<long long>(decoy_rng.below(
                                                           static_cast<std::uint64_t>(std::max(1LL, total_hours - 8)))));
          const Timestamp stop = start + hours(2 + static_cast<long long>(decoy_rng.below(2)));
          const bool clear = std::all_of(injections.begin(), injections.end(), [&](const Injection& inj) {
            return stop + spec.decoy_gap <= inj.event.start_time || start >= *inj.event.end_time + spec.decoy_gap;
          });
          if (!clear || !far_enough(start, taken, minutes(35))) continue;
          taken.push_back(start);
          const char* kind = kKinds[decoy_rng.below(std::size(kKinds))];
          bundle.events.push_back(make_event(fmt::format("dec-{}-{}-{}", g + 1, v + 1, k + 1),
                                             fmt::format("{} {} {}", kind, venue, k + 1), start, stop, where, venue,
                                             std::string(kind), std::round(decoy_rng.uniform(10.0, 500.0))));
          placed = true;
        }
        if (!placed) throw SpecError("cannot schedule decoy events clear of the injected events");
      }
    }
  }

  std::vector<std::string> metric_names;
  for (const auto& m : spec.metrics) metric_names.push_back(m.name);
  bundle.config = bundle_config(metric_names, spec.geo, spec.eaw, spec.normalization, true);
  return bundle;
}

ScenarioBundle table1_fixture() {
  ScenarioBundle bundle;
  const GeoPoint site{36.7213, -4.4214};
  bundle.topology = build_topology({site}, 3);
  // CELL_1A points at 120 degrees, CELL_1B at 240, CELL_1C at 0.
  {
    std::vector<Cell> cells = bundle.topology.cells();
    cells[0].azimuth = 120.0;
    cells[1].azimuth = 240.0;
    cells[2].azimuth = 0.0;
    bundle.topology = Topology(std::move(cells), {{"SITE_1", site}});
  }

  const Timestamp day1 = parse_rfc3339("2017-03-06T00:00:00Z");
  constexpr int kDays = 9;
  const Eigen::Index n = 24 * kDays;
  const std::vector<std::string> metrics{"NUM_RRC_CONN", "NUM_DROPS", "DL_USER_THR"};
  const std::array<std::array<double, 24>, 3> profiles{daily_profile(25.0, 70.0), daily_profile(1.5, 2.5),
                                                       daily_profile(22.0, -9.0)};

  struct Venue {
    const char* name;
    double km;
    double bearing;  // absolute, from the site
  };
  const Venue in_beam[] = {{"VENUE_L", 0.56, 135.22},
                           {"VENUE_M", 1.2, 115.54},
                           {"VENUE_U", 0.53, 101.37},
                           {"VENUE_W", 1.61, 125.79},
                           {"VENUE_Z", 0.67, 86.83}};
  const Venue off_beam[] = {{"VENUE_A", 0.45, 200.0}, {"VENUE_B", 1.1, 250.0},  {"VENUE_C", 1.8, 300.0},
                            {"VENUE_D", 0.9, 340.0},  {"VENUE_E", 1.4, 20.0},   {"VENUE_F", 0.75, 45.0},
                            {"VENUE_G", 1.95, 190.0}, {"VENUE_H", 0.35, 275.0}, {"VENUE_I", 1.25, 320.0},
                            {"VENUE_J", 1.7, 5.0}};

  struct Planned {
    std::size_t venue;  // index into in_beam
    const char* name;
    const char* category;
    int day;  // 0-based
    int hour;
    int hours_long;  // 0: no end time
    std::array<double, 3> r;
    std::array<double, 3> amp;
  };
  const Planned planned[] = {
      {0, "Summer concert", "concert", 1, 20, 3, {0.86, 0.80, -0.88}, {60.0, 30.0, 7.0}},
      {0, "Town hall rally", "politics", 2, 18, 3, {0.85, 0.78, -0.86}, {55.0, 26.0, 6.0}},
      {0, "Youth football match", "sport", 6, 12, 2, {0.78, 0.61, -0.78}, {35.0, 6.0, 5.0}},
      {1, "Book fair", "fair", 0, 10, 2, {0.13, 0.19, -0.26}, {15.0, 2.0, 2.0}},
      {2, "Jazz night", "concert", 3, 19, 0, {0.24, 0.03, -0.11}, {15.0, 2.0, 2.0}},
      {3, "Craft market", "fair", 4, 11, 2, {0.07, 0.07, -0.03}, {15.0, 2.0, 2.0}},
      {4, "Film screening", "cinema", 7, 17, 3, {0.28, 0.40, -0.12}, {15.0, 2.0, 2.0}},
  };

  std::vector<KpiSeries> series_1a;
  for (std::size_t m = 0; m < metrics.size(); ++m) {
    KpiSeries s = empty_series("CELL_1A", metrics[m], day1, hours(1), n);
    for (Eigen::Index k = 0; k < n; ++k) s.values[k] = profiles[m][static_cast<std::size_t>(k % 24)];
    series_1a.push_back(std::move(s));
  }

  std::vector<Timestamp> taken;
  const EawParams eaw;
  for (std::size_t i = 0; i < std::size(planned); ++i) {
    const Planned& p = planned[i];
    const Venue& v = in_beam[p.venue];
    const Timestamp start = day1 + hours(24 * p.day + p.hour);
    const std::optional<Timestamp> end =
        p.hours_long > 0 ? std::optional<Timestamp>(start + hours(p.hours_long)) : std::nullopt;
    SocialEvent e = make_event(fmt::format("t1-{}", i + 1), p.name, start, end, destination_point(site, v.bearing, v.km),
                               v.name, std::string(p.category), 500.0 - 40.0 * static_cast<double>(i));
    set_address(e, "Malaga", "Andalusia");
    for (std::size_t m = 0; m < metrics.size(); ++m) {
      KpiSeries& s = series_1a[m];
      const Eaw w = build_eaw(e, s, eaw);
      const SocialIndicator ind = social_indicator(w, eaw.sigma_multiplier);
      s.values.segment(w.n_start, w.length()) += shaped_window(ind.samples, p.r[m], p.amp[m]);
    }
    if (p.venue == 0) bundle.truth.injected.push_back({e.event_id, v.name, {"CELL_1A"}, metrics});
    taken.push_back(start);
    bundle.events.push_back(std::move(e));
  }
  for (std::size_t i = 1; i < std::size(in_beam); ++i) bundle.truth.decoy_venues.push_back(in_beam[i].name);
  bundle.truth.target_cell = "CELL_1A";

  // Off-beam venues: 2 or 3 events each, no KPI footprint on CELL_1A.
  static const char* kKinds[] = {"Flamenco evening", "Poetry reading", "Chess open", "Choir recital",
                                 "Street theatre",   "Food festival",  "Dance class", "Photo walk"};
  SplitMix64 rng(2017);
  std::size_t counter = 0;
  for (std::size_t vi = 0; vi < std::size(off_beam); ++vi) {
    const Venue& v = off_beam[vi];
    const std::size_t count = vi < 2 ? 3 : 2;
    for (std::size_t k = 0; k < count; ++k) {
      Timestamp start;
      do {
        start = day1 + hours(24 * static_cast<long long>(rng.below(kDays)) + 9 + static_cast<long long>(rng.below(13)));
      } while (!far_enough(start, taken, minutes(35)));
      taken.push_back(start);
      ++counter;
      const char* kind = kKinds[(vi + k) % std::size(kKinds)];
      SocialEvent e = make_event(fmt::format("t1-{}", std::size(planned) + counter),
                                 fmt::format("{} {}", kind, counter), start, start + hours(2),
                                 destination_point(site, v.bearing, v.km), v.name, std::nullopt,
                                 std::round(rng.uniform(20.0, 300.0)));
      set_address(e, "Malaga", "Andalusia");
      bundle.events.push_back(std::move(e));
    }
    bundle.truth.decoy_venues.push_back(v.name);
  }

  // Other sectors: the same daily shape with a little noise.
  bundle.kpis = std::move(series_1a);
  for (const char* cell : {"CELL_1B", "CELL_1C"}) {
    for (std::size_t m = 0; m < metrics.size(); ++m) {
      KpiSeries s = empty_series(cell, metrics[m], day1, hours(1), n);
      const double sigma = std::abs(profiles[m][15] - profiles[m][3]) * 0.05;
      for (Eigen::Index k = 0; k < n; ++k) s.values[k] = profiles[m][static_cast<std::size_t>(k % 24)] + sigma * rng.normal();
      bundle.kpis.push_back(std::move(s));
    }
  }

  bundle.config = bundle_config(metrics, GeoAssocParams{}, eaw, Normalization::HourOfDay, true);
  return bundle;
}

ScenarioBundle funnel_fixture() {
  ScenarioBundle bundle;
  struct Group {
    std::size_t venues;
    std::size_t four_event_venues;  // the rest hold three events
    int kind;                       // 0 in region, 1 blacklisted, 2 other region
  };
  const Group groups[] = {{507, 367, 0}, {70, 22, 1}, {23, 11, 2}};
  static const char* kPlaces[] = {"Teatro", "Auditorio", "Plaza", "Estadio", "Palacio", "Sala", "Recinto", "Museo"};
  static const char* kKinds[] = {"Concert", "Festival", "Exhibition", "Match", "Conference", "Fair", "Show", "Parade"};
  const auto terms = default_blacklist_terms();

  struct Draft {
    std::string venue;
    int kind;
    bool located;
  };
  std::vector<Draft> drafts;
  std::size_t venue_no = 0;
  std::size_t missing_coords = 0;
  for (const Group& g : groups) {
    for (std::size_t v = 0; v < g.venues; ++v, ++venue_no) {
      std::string venue;
      if (g.kind == 1) {
        std::string term = terms[v % terms.size()];
        term[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(term[0])));
        venue = fmt::format("{} {}", term, venue_no + 1);
      } else {
        venue = fmt::format("{} {}", kPlaces[venue_no % std::size(kPlaces)], venue_no + 1);
      }
      const std::size_t count = v < g.four_event_venues ? 4 : 3;
      for (std::size_t k = 0; k < count; ++k) {
        // The first event of 120 in-region venues carries no coordinates.
        const bool located = !(g.kind == 0 && k == 0 && missing_coords < 120 && count == 4);
        if (!located) ++missing_coords;
        drafts.push_back({venue, g.kind, located});
      }
    }
  }

  // Start slots 40 minutes apart, shuffled, so no two events are fusion duplicates.
  const Timestamp t0 = parse_rfc3339("2017-01-02T08:00:00Z");
  std::vector<std::size_t> slots(drafts.size());
  for (std::size_t i = 0; i < slots.size(); ++i) slots[i] = i;
  SplitMix64 rng(600);
  for (std::size_t i = slots.size(); i > 1; --i) std::swap(slots[i - 1], slots[rng.below(i)]);

  std::map<std::string, GeoPoint> venue_points;
  for (std::size_t i = 0; i < drafts.size(); ++i) {
    const Draft& d = drafts[i];
    auto [it, fresh] = venue_points.try_emplace(d.venue);
    if (fresh) it->second = {rng.uniform(36.65, 36.80), rng.uniform(-4.55, -4.35)};
    const Timestamp start = t0 + minutes(40 * static_cast<long long>(slots[i]));
    SocialEvent e = make_event(fmt::format("f-{}", i + 1), fmt::format("{} {}", kKinds[i % std::size(kKinds)], i + 1),
                               start, start + hours(2), it->second, d.venue, std::nullopt,
                               std::round(rng.uniform(5.0, 900.0)));
    if (!d.located) {
      e.lat.reset();
      e.lon.reset();
    }
    set_address(e, d.kind == 2 ? "Cartagena" : "Malaga", d.kind == 2 ? "Murcia" : "Andalusia");
    bundle.events.push_back(std::move(e));
  }

  bundle.config = bundle_config({}, GeoAssocParams{}, EawParams{}, Normalization::HourOfWeek, false);
  bundle.config.filter.region_whitelist = std::set<std::string>{"Andalusia"};
  return bundle;
}

ScenarioSpec detection_spec(std::uint64_t seed) {
  ScenarioSpec spec;
  spec.seed = seed;
  spec.n_sites = 5;
  spec.area = {36.68, 36.76, -4.47, -4.37};
  spec.start = parse_rfc3339("2017-03-06T00:00:00Z");
  spec.days = 14;
  spec.metrics = {
      {"NUM_RRC_CONN", daily_profile(30.0, 50.0), 5.0, 1.0},
      {"NUM_DROPS", daily_profile(1.0, 3.0), 1.0, 1.0},
      {"DL_USER_THR", daily_profile(20.0, -8.0), 0.8, -1.0},
  };
  SplitMix64 rng = SplitMix64(seed).fork(99);
  const double bearing = wrap_360(rng.uniform(-40.0, 40.0));
  const double km = rng.uniform(0.3, 1.6);
  std::vector<int> days;
  while (days.size() < 3) {
    const int d = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(spec.days - 2)));
    if (std::find(days.begin(), days.end(), d) == days.end()) days.push_back(d);
  }
  std::sort(days.begin(), days.end());
  for (std::size_t i = 0; i < days.size(); ++i) {
    InjectedEventSpec e;
    e.venue = "CAUSAL_VENUE";
    e.name = fmt::format("Headline event {}", i + 1);
    e.anchor = Anchor{"SITE_1", bearing, km};
    e.start = spec.start + hours(24 * days[i] + 17 + static_cast<long long>(rng.below(5)));
    e.duration = hours(2 + static_cast<long long>(rng.below(2)));
    e.category = "concert";
    e.amplitude = {{"NUM_RRC_CONN", 35.0}, {"NUM_DROPS", 7.0}, {"DL_USER_THR", 5.5}};
    e.affected_cells = {"CELL_1A"};
    spec.injected.push_back(std::move(e));
  }
  spec.decoys = {
      {12, 2, DecoyPlacement::InSector, "CELL_1A"},
      {4, 2, DecoyPlacement::NearSite, ""},
      {3, 1, DecoyPlacement::Far, ""},
  };
  return spec;
}

ScenarioBundle preset_bundle(std::string_view name, std::uint64_t seed) {
  if (name == "table1") return table1_fixture();
  if (name == "funnel") return funnel_fixture();
  if (name == "detection") return generate(detection_spec(seed));
  throw SpecError(fmt::format("unknown preset '{}' (table1|funnel|detection)", name));
}

void write_bundle(const std::string& dir, const ScenarioBundle& bundle) {
  const std::filesystem::path root(dir);
  if (!bundle.topology.cells().empty()) save_topology((root / "topology.csv").string(), bundle.topology);
  if (!bundle.kpis.empty()) save_kpis((root / "kpis.csv").string(), bundle.kpis);
  write_file_atomic((root / "source_events.ndjson").string(), sim_feed_ndjson(bundle.events));
  write_file_atomic((root / "ground_truth.json").string(), to_json(bundle.truth).dump(2) + "\n");
  save_run_config((root / "config.json").string(), bundle.config);
}

}  // namespace socialoam
