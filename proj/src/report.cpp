#include "socialoam/report.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "socialoam/csv.hpp"
#include "socialoam/errors.hpp"

namespace socialoam {
namespace {

using nlohmann::json;

template <typename T>
void put(json& j, const char* key, const std::optional<T>& v) {
  if (v) j[key] = *v;
}

template <typename T>
std::optional<T> opt(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<T>();
}

std::string fmt_r(double r) { return fmt::format("{:.4f}", r); }

}  // namespace

nlohmann::json to_json(const OutputRecord& r) {
  json j;
  j["EVENT_ID"] = r.event_id;
  j["NAME"] = r.name;
  j["START_TIME"] = format_rfc3339(r.start_time);
  j["END_TIME"] = r.end_time ? json(format_rfc3339(*r.end_time)) : json(nullptr);
  j["VENUE"] = r.venue ? json(*r.venue) : json(nullptr);
  j["ADDRESS"] = r.address ? json(*r.address) : json(nullptr);
  j["LAT"] = r.lat ? json(*r.lat) : json(nullptr);
  j["LON"] = r.lon ? json(*r.lon) : json(nullptr);
  put(j, "RANK", r.rank);
  put(j, "FLAGGED", r.flagged);
  json sites = json::array();
  for (const auto& s : r.close_sites) sites.push_back({{"SITE_ID", s.site_id}, {"DISTANCE_KM", s.distance_km}});
  j["GEOGRAPHICAL_CLOSE_SITES"] = sites;
  json bearings = json::array();
  for (const auto& b : r.cell_bearings) {
    bearings.push_back({{"CELL_ID", b.cell_id},
                        {"BEARING_OFFSET", b.bearing_offset ? json(*b.bearing_offset) : json(nullptr)},
                        {"IN_BEAM", b.in_beam}});
  }
  j["CELL_BEARINGS"] = bearings;
  json cells = json::array();
  for (const auto& c : r.correlated_cells) {
    cells.push_back({{"CELL_ID", c.cell_id},
                     {"METRIC", c.metric},
                     {"R", c.r ? json(*c.r) : json(nullptr)},
                     {"N_SAMPLES", c.n_samples}});
  }
  j["CORRELATED_CELLS"] = cells;
  return j;
}

OutputRecord output_record_from_json(const nlohmann::json& j) {
  try {
    OutputRecord r;
    r.event_id = j.at("EVENT_ID").get<std::string>();
    r.name = j.at("NAME").get<std::string>();
    r.start_time = parse_rfc3339(j.at("START_TIME").get<std::string>());
    if (auto end = opt<std::string>(j, "END_TIME")) r.end_time = parse_rfc3339(*end);
    r.venue = opt<std::string>(j, "VENUE");
    r.address = opt<std::string>(j, "ADDRESS");
    r.lat = opt<double>(j, "LAT");
    r.lon = opt<double>(j, "LON");
    r.rank = opt<std::size_t>(j, "RANK");
    r.flagged = opt<bool>(j, "FLAGGED");
    for (const auto& s : j.at("GEOGRAPHICAL_CLOSE_SITES")) {
      r.close_sites.push_back({s.at("SITE_ID").get<std::string>(), s.at("DISTANCE_KM").get<double>()});
    }
    if (const auto it = j.find("CELL_BEARINGS"); it != j.end()) {
      for (const auto& b : *it) {
        r.cell_bearings.push_back({b.at("CELL_ID").get<std::string>(), opt<double>(b, "BEARING_OFFSET"),
                                   b.at("IN_BEAM").get<bool>()});
      }
    }
    for (const auto& c : j.at("CORRELATED_CELLS")) {
      r.correlated_cells.push_back({c.at("CELL_ID").get<std::string>(), c.at("METRIC").get<std::string>(),
                                    opt<double>(c, "R"), c.at("N_SAMPLES").get<long long>()});
    }
    return r;
  } catch (const json::exception& e) {
    throw SchemaError(std::string("bad output record: ") + e.what());
  } catch (const UnparseableTimestamp& e) {
    throw SchemaError(std::string("bad output record: ") + e.what());
  }
}

std::string records_to_json(const std::vector<OutputRecord>& records) {
  json a = json::array();
  for (const auto& r : records) a.push_back(to_json(r));
  return a.dump(2) + "\n";
}

std::vector<OutputRecord> records_from_json(const std::string& text) {
  json a;
  try {
    a = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("report is not JSON: ") + e.what());
  }
  if (!a.is_array()) throw SchemaError("report must be a JSON array");
  std::vector<OutputRecord> out;
  for (const auto& j : a) out.push_back(output_record_from_json(j));
  return out;
}

OutputRecord base_record(const SocialEvent& e) {
  OutputRecord r;
  r.event_id = e.event_id;
  r.name = e.name;
  r.start_time = e.start_time;
  r.end_time = e.end_time;
  r.venue = e.venue;
  if (e.address && !e.address->empty()) r.address = e.address->to_string();
  r.lat = e.lat;
  r.lon = e.lon;
  return r;
}

std::vector<OutputRecord> association_records(const std::vector<SocialEvent>& events, const Topology& topology,
                                              const GeoAssocParams& params, std::vector<std::string>* skipped) {
  std::vector<OutputRecord> out;
  for (const auto& e : events) {
    if (!e.has_location()) {
      if (skipped) skipped->push_back(e.event_id);
      continue;
    }
    OutputRecord r = base_record(e);
    const GeoPoint p = e.location();
    for (const auto& sd : associate_geographic(p, topology.sites(), params)) {
      r.close_sites.push_back({sd.site_id, sd.distance_km});
      const Site* site = topology.find_site(sd.site_id);
      for (const auto& cell : topology.cells_of(*site)) {
        CellBearing b{cell.cell_id, std::nullopt, true};
        if (!(p == site->location)) {
          b.bearing_offset = cell_bearing_offset(cell, *site, p);
          b.in_beam = in_beam(cell, *b.bearing_offset);
        }
        r.cell_bearings.push_back(std::move(b));
      }
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<OutputRecord> cause_records(const CauseAnalysis& analysis, const Topology& topology,
                                        const GeoAssocParams& params) {
  std::vector<OutputRecord> out;
  for (const auto& cand : analysis.ranking) {
    for (const auto& ce : cand.events) {
      OutputRecord r = base_record(ce.event);
      r.rank = cand.rank;
      r.flagged = cand.flagged;
      for (const auto& sd : associate_geographic(ce.event.location(), topology.sites(), params)) {
        r.close_sites.push_back({sd.site_id, sd.distance_km});
      }
      r.cell_bearings.push_back({analysis.cell_id, ce.bearing_offset, true});
      for (const auto& c : cand.correlations) {
        if (c.event_id == ce.event.event_id) r.correlated_cells.push_back({c.cell_id, c.metric, c.r, c.n_samples});
      }
      out.push_back(std::move(r));
    }
  }
  return out;
}

std::string cause_summary_csv(const CauseAnalysis& analysis) {
  std::string out = "rank,venue,n_events,best_metric,best_abs_r,flagged\n";
  for (const auto& c : analysis.ranking) {
    out += csv::join({std::to_string(c.rank), c.venue_key, std::to_string(c.events.size()), c.best_metric,
                      c.score ? fmt_r(*c.score) : std::string(), c.flagged ? "true" : "false"});
    out += '\n';
  }
  return out;
}

nlohmann::json venue_impacts_json(const CauseAnalysis& analysis, AggregateStat stat, double r_threshold) {
  json venues = json::array();
  for (const auto& c : analysis.ranking) {
    json metrics = json::object();
    for (const auto& [metric, rep] : c.per_metric) {
      metrics[metric] = {{"r", rep.r},
                         {"event_ids", rep.event_ids},
                         {"n_events", rep.n_events()},
                         {"n_undefined", rep.n_undefined},
                         {"median_abs_r", rep.median_abs_r},
                         {"mean_abs_r", rep.mean_abs_r},
                         {"max_abs_r", rep.max_abs_r}};
    }
    venues.push_back({{"rank", c.rank},
                      {"venue", c.venue_key},
                      {"n_events", c.events.size()},
                      {"score", c.score ? json(*c.score) : json(nullptr)},
                      {"best_metric", c.best_metric},
                      {"flagged", c.flagged},
                      {"metrics", metrics}});
  }
  return {{"cell_id", analysis.cell_id},
          {"site_id", analysis.site_id},
          {"aggregate_stat", aggregate_stat_name(stat)},
          {"r_threshold", r_threshold},
          {"candidate_events", analysis.candidate_events},
          {"candidate_venues", analysis.candidate_venues},
          {"venues", venues}};
}

std::string drops_csv(const std::vector<FilterTrace>& dropped) {
  std::string out = "event_id,stage,reason\n";
  for (const auto& d : dropped) {
    out += csv::join({d.event_id, std::string(stage_name(d.stage)), d.reason});
    out += '\n';
  }
  return out;
}

}  // namespace socialoam
