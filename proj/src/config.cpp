#include "socialoam/config.hpp"

#include <cmath>
#include <filesystem>
#include <set>

#include <fmt/format.h>

#include "socialoam/errors.hpp"
#include "socialoam/io.hpp"
#include "json_reader.hpp"

namespace socialoam {
namespace {

using nlohmann::json;
using detail::Obj;

std::string resolve(const std::string& base, const std::string& p) {
  if (base.empty() || p.empty()) return p;
  const std::filesystem::path path(p);
  if (path.is_absolute()) return p;
  return (std::filesystem::path(base) / path).lexically_normal().string();
}

Timestamp read_time(const json& v, const std::string& where) {
  if (!v.is_string()) throw ConfigError(where + ": expected an RFC 3339 string");
  try {
    return parse_rfc3339(v.get<std::string>());
  } catch (const UnparseableTimestamp& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

Duration minutes_to_duration(double m, const std::string& where) {
  if (!std::isfinite(m)) throw ConfigError(where + ": not a number");
  return Duration(static_cast<long long>(std::llround(m * 60.0)));
}

double duration_to_minutes(Duration d) { return static_cast<double>(d.count()) / 60.0; }

std::string format_offset(std::chrono::minutes m) {
  const long long total = m.count();
  const char sign = total < 0 ? '-' : '+';
  const long long a = total < 0 ? -total : total;
  return fmt::format("{}{:02}:{:02}", sign, a / 60, a % 60);
}

std::vector<Field> read_fields(const json& v, const std::string& where) {
  if (!v.is_array()) throw ConfigError(where + ": expected an array of field names");
  std::vector<Field> out;
  for (const auto& f : v) {
    if (!f.is_string()) throw ConfigError(where + ": field names must be strings");
    out.push_back(parse_field(f.get<std::string>()));
  }
  return out;
}

json fields_json(const std::vector<Field>& fields) {
  json a = json::array();
  for (Field f : fields) a.push_back(std::string(field_name(f)));
  return a;
}

SourceConfig read_source(const json& j, std::size_t i, const std::string& base) {
  Obj o(j, fmt::format("sources[{}]", i));
  SourceConfig s;
  o.read("source_id", s.source_id);
  if (const json* v = o.get("kind")) s.kind = parse_source_kind(o.as<std::string>(*v, "kind"));
  o.read("locator", s.locator);
  if (const json* v = o.get("format")) s.format = parse_record_format(o.as<std::string>(*v, "format"));
  o.read("field_map", s.field_map);
  o.read("priority", s.priority);
  if (const json* v = o.get("utc_offset")) {
    try {
      s.utc_offset = parse_utc_offset(o.as<std::string>(*v, "utc_offset"));
    } catch (const UnparseableTimestamp& e) {
      throw ConfigError(o.where() + ".utc_offset: " + e.what());
    }
  }
  o.finish();
  if (s.kind == SourceKind::File) s.locator = resolve(base, s.locator);
  return s;
}

void read_scope(const json& j, FilterConfig& f) {
  Obj o(j, "scope");
  if (const json* g = o.get("geo")) {
    Obj go(*g, "scope.geo");
    GeoScope geo;
    geo.box.reset();
    if (const json* c = go.get("categorical")) {
      Obj co(*c, "scope.geo.categorical");
      CategoricalScope cat;
      co.read("country", cat.country);
      co.read("region", cat.region);
      co.read("city", cat.city);
      co.finish();
      geo.categorical = cat;
    }
    if (const json* b = go.get("box")) {
      Obj bo(*b, "scope.geo.box");
      BoxScope box;
      bo.read("lat_min", box.lat_min);
      bo.read("lat_max", box.lat_max);
      bo.read("lon_min", box.lon_min);
      bo.read("lon_max", box.lon_max);
      bo.finish();
      geo.box = box;
    }
    if (const json* c = go.get("circle")) {
      Obj co(*c, "scope.geo.circle");
      CircleScope circle;
      co.read("lat", circle.center.lat);
      co.read("lon", circle.center.lon);
      co.read("radius_km", circle.radius_km);
      co.finish();
      geo.circle = circle;
    }
    go.finish();
    f.geo = geo;
  }
  if (const json* t = o.get("time")) {
    Obj to(*t, "scope.time");
    TimeScope ts;
    const json* start = to.get("start");
    const json* end = to.get("end");
    if (!start || !end) throw ConfigError("scope.time: start and end are required");
    ts.start = read_time(*start, "scope.time.start");
    ts.end = read_time(*end, "scope.time.end");
    to.finish();
    f.time = ts;
  }
  o.finish();
}

void read_filter(const json& j, FilterConfig& f) {
  Obj o(j, "filter");
  if (const json* v = o.get("required_fields")) f.required_fields = read_fields(*v, "filter.required_fields");
  o.read("blacklist_terms", f.blacklist_terms);
  if (const json* v = o.get("blacklist_target_fields")) {
    f.blacklist_target_fields = read_fields(*v, "filter.blacklist_target_fields");
  }
  if (const json* v = o.get("region_whitelist")) {
    f.region_whitelist = o.as<std::set<std::string>>(*v, "region_whitelist");
  }
  o.read("soft_mode", f.soft_mode);
  if (const json* v = o.get("rank_key")) {
    f.rank_key = parse_field(o.as<std::string>(*v, "rank_key"));
  } else if (j.contains("rank_key")) {
    f.rank_key.reset();  // explicit null disables ranking
  }
  if (const json* v = o.get("rank_direction")) {
    const auto d = o.as<std::string>(*v, "rank_direction");
    if (d == "desc") {
      f.rank_direction = RankDirection::Desc;
    } else if (d == "asc") {
      f.rank_direction = RankDirection::Asc;
    } else {
      throw ConfigError("filter.rank_direction must be 'asc' or 'desc'");
    }
  }
  o.finish();
}

}  // namespace

SourceKind parse_source_kind(std::string_view s) {
  if (s == "file") return SourceKind::File;
  if (s == "http") return SourceKind::Http;
  throw ConfigError(fmt::format("unknown source kind '{}' (file|http)", s));
}

std::string_view source_kind_name(SourceKind k) { return k == SourceKind::File ? "file" : "http"; }

RecordFormat parse_record_format(std::string_view s) {
  if (s == "json") return RecordFormat::JsonRecords;
  if (s == "csv") return RecordFormat::CsvRecords;
  throw ConfigError(fmt::format("unknown record format '{}' (json|csv)", s));
}

std::string_view record_format_name(RecordFormat f) { return f == RecordFormat::JsonRecords ? "json" : "csv"; }

GeoAssocParams geo_assoc_from_json(const nlohmann::json& j) {
  GeoAssocParams p;
  Obj o(j, "geo_assoc");
  o.read("max_dist_km", p.max_dist_km);
  o.read("min_sites", p.min_sites);
  o.read("max_sites", p.max_sites);
  o.finish();
  return p;
}

nlohmann::json to_json(const GeoAssocParams& p) {
  return {{"max_dist_km", p.max_dist_km}, {"min_sites", p.min_sites}, {"max_sites", p.max_sites}};
}

EawParams eaw_params_from_json(const nlohmann::json& j) {
  EawParams p;
  Obj o(j, "eaw");
  o.read("pre_margin", p.pre_margin);
  o.read("post_margin", p.post_margin);
  if (const json* d = o.get("default_duration_minutes")) {
    p.default_duration = minutes_to_duration(o.as<double>(*d, "default_duration_minutes"), "eaw");
  }
  if (const json* c = o.get("category_durations_minutes")) {
    for (const auto& [k, m] : o.as<std::map<std::string, double>>(*c, "category_durations_minutes")) {
      p.category_durations[k] = minutes_to_duration(m, "eaw.category_durations_minutes");
    }
  }
  o.read("sigma_multiplier", p.sigma_multiplier);
  o.finish();
  return p;
}

nlohmann::json to_json(const EawParams& p) {
  json cats = json::object();
  for (const auto& [k, d] : p.category_durations) cats[k] = duration_to_minutes(d);
  return {{"pre_margin", p.pre_margin},
          {"post_margin", p.post_margin},
          {"default_duration_minutes", duration_to_minutes(p.default_duration)},
          {"category_durations_minutes", cats},
          {"sigma_multiplier", p.sigma_multiplier}};
}

void RunConfig::validate() const {
  validate_sources(sources);
  if (geocoder.stub_table && geocoder.endpoint) throw ConfigError("geocoder: give stub_table or endpoint, not both");
  filter.validate();
  if (!(fusion.name_threshold > 0.0 && fusion.name_threshold <= 1.0)) {
    throw ConfigError("fusion.name_threshold must be in (0, 1]");
  }
  if (fusion.time_tolerance.count() < 0) throw ConfigError("fusion.time_tolerance_minutes must be >= 0");
  geo_assoc.validate();
  eaw.validate();
  if (metrics.empty()) throw ConfigError("metrics must not be empty");
  if (!(r_threshold > 0.0 && r_threshold <= 1.0)) throw ConfigError("r_threshold must be in (0, 1]");
  if (paths.out_dir.empty()) throw ConfigError("paths.out_dir must not be empty");
}

IdentifyParams RunConfig::identify_params() const {
  IdentifyParams p;
  p.geo = geo_assoc;
  p.eaw = eaw;
  p.metrics = metrics;
  p.r_threshold = r_threshold;
  p.stat = aggregate_stat;
  p.normalization = normalization;
  return p;
}

RunConfig run_config_from_json(const nlohmann::json& j, const std::string& base_dir) {
  RunConfig cfg;
  Obj o(j, "config");
  if (const json* v = o.get("sources")) {
    if (!v->is_array()) throw ConfigError("sources: expected an array");
    for (std::size_t i = 0; i < v->size(); ++i) cfg.sources.push_back(read_source((*v)[i], i, base_dir));
  }
  if (const json* v = o.get("geocoder")) {
    Obj go(*v, "geocoder");
    if (const json* t = go.get("stub_table")) cfg.geocoder.stub_table = resolve(base_dir, go.as<std::string>(*t, "stub_table"));
    if (const json* e = go.get("endpoint")) cfg.geocoder.endpoint = go.as<std::string>(*e, "endpoint");
    go.finish();
  }
  if (const json* v = o.get("scope")) read_scope(*v, cfg.filter);
  if (const json* v = o.get("filter")) read_filter(*v, cfg.filter);
  if (const json* v = o.get("fusion")) {
    Obj fo(*v, "fusion");
    fo.read("name_threshold", cfg.fusion.name_threshold);
    if (const json* t = fo.get("time_tolerance_minutes")) {
      cfg.fusion.time_tolerance = minutes_to_duration(fo.as<double>(*t, "time_tolerance_minutes"), "fusion");
    }
    fo.read("source_priority", cfg.fusion.source_priority);
    fo.finish();
  }
  // Source priorities double as fusion priorities unless given explicitly.
  for (const auto& s : cfg.sources) cfg.fusion.source_priority.try_emplace(s.source_id, s.priority);
  if (const json* v = o.get("geo_assoc")) cfg.geo_assoc = geo_assoc_from_json(*v);
  if (const json* v = o.get("eaw")) cfg.eaw = eaw_params_from_json(*v);
  if (const json* v = o.get("normalization")) cfg.normalization = parse_normalization(o.as<std::string>(*v, "normalization"));
  o.read("metrics", cfg.metrics);
  o.read("r_threshold", cfg.r_threshold);
  if (const json* v = o.get("aggregate_stat")) cfg.aggregate_stat = parse_aggregate_stat(o.as<std::string>(*v, "aggregate_stat"));
  if (const json* v = o.get("paths")) {
    Obj po(*v, "paths");
    if (const json* p = po.get("topology")) cfg.paths.topology = resolve(base_dir, po.as<std::string>(*p, "topology"));
    if (const json* p = po.get("kpis")) cfg.paths.kpis = resolve(base_dir, po.as<std::string>(*p, "kpis"));
    if (const json* p = po.get("events")) cfg.paths.events = resolve(base_dir, po.as<std::string>(*p, "events"));
    if (const json* p = po.get("out_dir")) cfg.paths.out_dir = resolve(base_dir, po.as<std::string>(*p, "out_dir"));
    po.finish();
  } else if (!base_dir.empty()) {
    cfg.paths.out_dir = resolve(base_dir, cfg.paths.out_dir);
  }
  o.finish();
  cfg.validate();
  return cfg;
}

nlohmann::json to_json(const RunConfig& cfg) {
  json j;
  json sources = json::array();
  for (const auto& s : cfg.sources) {
    sources.push_back({{"source_id", s.source_id},
                       {"kind", source_kind_name(s.kind)},
                       {"locator", s.locator},
                       {"format", record_format_name(s.format)},
                       {"field_map", s.field_map},
                       {"priority", s.priority},
                       {"utc_offset", format_offset(s.utc_offset)}});
  }
  j["sources"] = sources;
  if (cfg.geocoder.stub_table) j["geocoder"]["stub_table"] = *cfg.geocoder.stub_table;
  if (cfg.geocoder.endpoint) j["geocoder"]["endpoint"] = *cfg.geocoder.endpoint;

  const auto& f = cfg.filter;
  json geo = json::object();
  if (f.geo.categorical) {
    geo["categorical"] = {{"country", f.geo.categorical->country},
                          {"region", f.geo.categorical->region},
                          {"city", f.geo.categorical->city}};
  }
  if (f.geo.box) {
    geo["box"] = {{"lat_min", f.geo.box->lat_min},
                  {"lat_max", f.geo.box->lat_max},
                  {"lon_min", f.geo.box->lon_min},
                  {"lon_max", f.geo.box->lon_max}};
  }
  if (f.geo.circle) {
    geo["circle"] = {{"lat", f.geo.circle->center.lat},
                     {"lon", f.geo.circle->center.lon},
                     {"radius_km", f.geo.circle->radius_km}};
  }
  j["scope"]["geo"] = geo;
  if (f.time) j["scope"]["time"] = {{"start", format_rfc3339(f.time->start)}, {"end", format_rfc3339(f.time->end)}};

  json filter{{"required_fields", fields_json(f.required_fields)},
              {"blacklist_terms", f.blacklist_terms},
              {"blacklist_target_fields", fields_json(f.blacklist_target_fields)},
              {"soft_mode", f.soft_mode},
              {"rank_key", f.rank_key ? json(std::string(field_name(*f.rank_key))) : json(nullptr)},
              {"rank_direction", f.rank_direction == RankDirection::Desc ? "desc" : "asc"}};
  if (f.region_whitelist) filter["region_whitelist"] = *f.region_whitelist;
  j["filter"] = filter;

  j["fusion"] = {{"name_threshold", cfg.fusion.name_threshold},
                 {"time_tolerance_minutes", duration_to_minutes(cfg.fusion.time_tolerance)},
                 {"source_priority", cfg.fusion.source_priority}};
  j["geo_assoc"] = to_json(cfg.geo_assoc);
  j["eaw"] = to_json(cfg.eaw);
  j["normalization"] = normalization_name(cfg.normalization);
  j["metrics"] = cfg.metrics;
  j["r_threshold"] = cfg.r_threshold;
  j["aggregate_stat"] = aggregate_stat_name(cfg.aggregate_stat);
  json paths{{"out_dir", cfg.paths.out_dir}};
  if (cfg.paths.topology) paths["topology"] = *cfg.paths.topology;
  if (cfg.paths.kpis) paths["kpis"] = *cfg.paths.kpis;
  if (cfg.paths.events) paths["events"] = *cfg.paths.events;
  j["paths"] = paths;
  return j;
}

RunConfig load_run_config(const std::string& path) {
  const std::string text = read_file(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path + "': " + e.what());
  }
  const auto base = std::filesystem::path(path).parent_path().string();
  return run_config_from_json(j, base.empty() ? "." : base);
}

void save_run_config(const std::string& path, const RunConfig& cfg) {
  write_file_atomic(path, to_json(cfg).dump(2) + "\n");
}

}  // namespace socialoam
