// Command-line front end: ingest, filter, associate, analyze, simulate.

#include <chrono>
#include <filesystem>
#include <future>
#include <iostream>
#include <set>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "socialoam/association.hpp"
#include "socialoam/config.hpp"
#include "socialoam/errors.hpp"
#include "socialoam/events.hpp"
#include "socialoam/filter.hpp"
#include "socialoam/fusion.hpp"
#include "socialoam/ingest.hpp"
#include "socialoam/io.hpp"
#include "socialoam/network.hpp"
#include "socialoam/report.hpp"
#include "socialoam/scenario.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace socialoam;

namespace {

struct Common {
  std::string config;
  std::string out;
  std::string events;
  std::string topology;
  std::string kpis;
  bool verbose = false;
  bool stamp = false;
};

RunConfig load_config(const Common& c, bool required) {
  RunConfig cfg;
  if (!c.config.empty()) {
    cfg = load_run_config(c.config);
  } else if (required) {
    throw ConfigError("--config is required for this command");
  }
  if (!c.out.empty()) cfg.paths.out_dir = c.out;
  if (!c.events.empty()) cfg.paths.events = c.events;
  if (!c.topology.empty()) cfg.paths.topology = c.topology;
  if (!c.kpis.empty()) cfg.paths.kpis = c.kpis;
  return cfg;
}

std::string out_path(const RunConfig& cfg, const char* name) { return (fs::path(cfg.paths.out_dir) / name).string(); }

std::string events_input(const RunConfig& cfg, const char* fallback) {
  return cfg.paths.events ? *cfg.paths.events : out_path(cfg, fallback);
}

void write_stamp(const Common& c, const std::string& dir, const char* command) {
  if (!c.stamp) return;
  const auto now = std::chrono::time_point_cast<std::chrono::seconds>(std::chrono::system_clock::now());
  const json j{{"command", command}, {"generated_at", format_rfc3339(now)}};
  write_file_atomic((fs::path(dir) / "stamp.json").string(), j.dump(2) + "\n");
}

std::size_t count_venues(const std::vector<SocialEvent>& events) {
  std::set<std::string> keys;
  for (const auto& e : events) keys.insert(venue_key(e));
  return keys.size();
}

void print(const json& j) { std::cout << j.dump(2) << '\n'; }

int cmd_ingest(const Common& c) {
  const RunConfig cfg = load_config(c, true);
  if (cfg.sources.empty()) throw ConfigError("no sources configured");

  std::vector<std::future<std::vector<RawRecord>>> pending;
  for (const auto& src : cfg.sources) {
    pending.push_back(std::async(std::launch::async, [&src, &cfg] { return fetch_raw(src, cfg.filter.geo, cfg.filter.time); }));
  }
  std::vector<SocialEvent> parsed;
  std::size_t fetched = 0;
  std::size_t rejected = 0;
  std::size_t failed_sources = 0;
  std::exception_ptr first_failure;
  json per_source = json::object();
  for (std::size_t i = 0; i < pending.size(); ++i) {
    const SourceConfig& src = cfg.sources[i];
    std::vector<RawRecord> raw;
    try {
      raw = pending[i].get();
    } catch (const Error& e) {
      spdlog::warn("{}", e.what());
      ++failed_sources;
      if (!first_failure) first_failure = std::current_exception();
      per_source[src.source_id] = {{"error", e.what()}};
      continue;
    }
    fetched += raw.size();
    std::size_t ok = 0;
    for (const auto& r : raw) {
      try {
        parsed.push_back(parse_record(r, src));
        ++ok;
      } catch (const Error& e) {
        ++rejected;
        spdlog::warn("source '{}' record {}: {}", src.source_id, r.ordinal, e.what());
      }
    }
    per_source[src.source_id] = {{"fetched", raw.size()}, {"parsed", ok}};
  }
  if (failed_sources == cfg.sources.size()) std::rethrow_exception(first_failure);

  const std::size_t fetched_venues = count_venues(parsed);
  std::unique_ptr<GeocoderClient> geocoder;
  if (cfg.geocoder.stub_table) {
    geocoder = std::make_unique<StubGeocoder>(StubGeocoder::from_csv(*cfg.geocoder.stub_table));
  } else if (cfg.geocoder.endpoint) {
    geocoder = std::make_unique<HttpGeocoder>(*cfg.geocoder.endpoint);
  }
  std::size_t geocoded = 0;
  if (geocoder) {
    for (auto& e : parsed) {
      const bool had = e.has_location();
      e = consolidate(std::move(e), *geocoder);
      if (!had && e.has_location()) ++geocoded;
    }
  }
  const std::size_t located = static_cast<std::size_t>(
      std::count_if(parsed.begin(), parsed.end(), [](const SocialEvent& e) { return e.has_location(); }));
  const std::size_t n_parsed = parsed.size();
  const auto fused = fuse_sources(std::move(parsed), cfg.fusion);
  write_events(out_path(cfg, "events.ndjson"), fused);
  write_stamp(c, cfg.paths.out_dir, "ingest");
  print({{"fetched", fetched},
         {"venues", fetched_venues},
         {"parsed", n_parsed},
         {"rejected", rejected},
         {"consolidated", located},
         {"geocoded", geocoded},
         {"fused", fused.size()},
         {"fused_venues", count_venues(fused)},
         {"failed_sources", failed_sources},
         {"sources", per_source}});
  return 0;
}

int cmd_filter(const Common& c) {
  const RunConfig cfg = load_config(c, false);
  cfg.filter.validate();
  const auto events = read_events(events_input(cfg, "events.ndjson"));
  const auto result = run_filters(events, cfg.filter);
  write_events(out_path(cfg, "filtered_events.ndjson"), result.kept);
  write_file_atomic(out_path(cfg, "drops.csv"), drops_csv(result.dropped));
  write_stamp(c, cfg.paths.out_dir, "filter");
  json by_stage = json::object();
  for (const auto& d : result.dropped) {
    auto& n = by_stage[std::string(stage_name(d.stage))];
    n = n.is_null() ? 1 : n.get<int>() + 1;
  }
  print({{"input", events.size()},
         {"input_venues", count_venues(events)},
         {"kept", result.kept.size()},
         {"kept_venues", count_venues(result.kept)},
         {"dropped", result.dropped.size()},
         {"dropped_by_stage", by_stage},
         {"soft_mode", cfg.filter.soft_mode}});
  return 0;
}

Topology require_topology(const RunConfig& cfg) {
  if (!cfg.paths.topology) throw ConfigError("no topology path (paths.topology or --topology)");
  return load_topology(*cfg.paths.topology);
}

int cmd_associate(const Common& c) {
  const RunConfig cfg = load_config(c, false);
  cfg.geo_assoc.validate();
  const Topology topology = require_topology(cfg);
  const auto events = read_events(events_input(cfg, "filtered_events.ndjson"));
  std::vector<std::string> skipped;
  const auto records = association_records(events, topology, cfg.geo_assoc, &skipped);
  for (const auto& id : skipped) spdlog::info("event '{}' has no coordinates; left out of the association", id);
  write_file_atomic(out_path(cfg, "associations.json"), records_to_json(records));
  write_stamp(c, cfg.paths.out_dir, "associate");

  // Venue counts per site, before and after the per-cell beam test.
  std::map<std::string, std::set<std::string>> venues_near;
  std::map<std::string, std::size_t> events_near;
  std::map<std::string, std::set<std::string>> venues_in_beam;
  for (const auto& r : records) {
    const std::string key = r.venue ? *r.venue : r.event_id;
    for (const auto& s : r.close_sites) {
      venues_near[s.site_id].insert(key);
      ++events_near[s.site_id];
    }
    for (const auto& b : r.cell_bearings) {
      if (b.in_beam) venues_in_beam[b.cell_id].insert(key);
    }
  }
  json sites = json::object();
  for (const auto& site : topology.sites()) {
    json cells = json::object();
    for (const auto& id : site.cell_ids) cells[id] = venues_in_beam[id].size();
    sites[site.site_id] = {{"events", events_near[site.site_id]},
                           {"venues", venues_near[site.site_id].size()},
                           {"venues_in_beam", cells}};
  }
  print({{"events", events.size()}, {"associated", records.size()}, {"skipped", skipped.size()}, {"sites", sites}});
  return 0;
}

int cmd_analyze(const Common& c, const std::string& cell_id, std::optional<double> threshold,
                const std::string& stat) {
  RunConfig cfg = load_config(c, false);
  if (threshold) cfg.r_threshold = *threshold;
  if (!stat.empty()) cfg.aggregate_stat = parse_aggregate_stat(stat);
  if (!(cfg.r_threshold > 0.0 && cfg.r_threshold <= 1.0)) throw ConfigError("--threshold must be in (0, 1]");
  const Topology topology = require_topology(cfg);
  const Cell* cell = topology.find_cell(cell_id);
  if (!cell) throw UnknownCell("cell '" + cell_id + "' not in topology");
  if (!cfg.paths.kpis) throw ConfigError("no KPI path (paths.kpis or --kpis)");
  const auto kpis = load_kpis(*cfg.paths.kpis);
  const auto events = read_events(events_input(cfg, "filtered_events.ndjson"));

  const IdentifyParams params = cfg.identify_params();
  const CauseAnalysis analysis = identify_causes(*cell, events, topology, kpis, params);
  write_file_atomic(out_path(cfg, "causes.json"), records_to_json(cause_records(analysis, topology, cfg.geo_assoc)));
  write_file_atomic(out_path(cfg, "causes_summary.csv"), cause_summary_csv(analysis));
  write_file_atomic(out_path(cfg, "venue_impacts.json"),
                    venue_impacts_json(analysis, cfg.aggregate_stat, cfg.r_threshold).dump(2) + "\n");
  write_stamp(c, cfg.paths.out_dir, "analyze");

  json ranking = json::array();
  json flagged = json::array();
  for (const auto& cand : analysis.ranking) {
    ranking.push_back({{"rank", cand.rank},
                       {"venue", cand.venue_key},
                       {"n_events", cand.events.size()},
                       {"best_metric", cand.best_metric},
                       {"best_abs_r", cand.score ? json(*cand.score) : json(nullptr)},
                       {"flagged", cand.flagged}});
    if (cand.flagged) flagged.push_back(cand.venue_key);
  }
  print({{"cell", analysis.cell_id},
         {"site", analysis.site_id},
         {"aggregate_stat", aggregate_stat_name(cfg.aggregate_stat)},
         {"r_threshold", cfg.r_threshold},
         {"candidate_events", analysis.candidate_events},
         {"candidate_venues", analysis.candidate_venues},
         {"ranking", ranking},
         {"flagged", flagged}});
  return 0;
}

int cmd_simulate(const Common& c, const std::string& preset, const std::string& spec_path, std::uint64_t seed) {
  if (c.out.empty()) throw ConfigError("--out is required for simulate");
  if (preset.empty() == spec_path.empty()) throw ConfigError("give exactly one of --preset or --spec");
  ScenarioBundle bundle = spec_path.empty() ? preset_bundle(preset, seed) : generate(load_scenario_spec(spec_path));
  write_bundle(c.out, bundle);
  write_stamp(c, c.out, "simulate");
  print({{"out", c.out},
         {"events", bundle.events.size()},
         {"venues", count_venues(bundle.events)},
         {"sites", bundle.topology.sites().size()},
         {"cells", bundle.topology.cells().size()},
         {"kpi_series", bundle.kpis.size()},
         {"injected", bundle.truth.injected.size()}});
  return 0;
}

void add_common(CLI::App* app, Common& c, bool with_inputs) {
  app->add_option("--config", c.config, "Run configuration (JSON)");
  app->add_option("--out", c.out, "Output directory");
  app->add_flag("--verbose,-v", c.verbose, "Debug logging on stderr");
  app->add_flag("--stamp", c.stamp, "Also write stamp.json with the run time");
  if (with_inputs) {
    app->add_option("--events", c.events, "Canonical event file");
    app->add_option("--topology", c.topology, "Topology CSV");
    app->add_option("--kpis", c.kpis, "KPI CSV");
  }
}

}  // namespace

int main(int argc, char** argv) {
  auto logger = spdlog::stderr_color_mt("socialoam");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);

  CLI::App app{"Social event impact analysis for cellular networks"};
  app.require_subcommand(1);
  Common common;
  std::string cell;
  std::optional<double> threshold;
  std::string stat;
  std::string preset;
  std::string spec;
  std::uint64_t seed = 1;

  auto* ingest = app.add_subcommand("ingest", "Fetch, parse, geocode and fuse the configured sources");
  add_common(ingest, common, false);
  auto* filter = app.add_subcommand("filter", "Apply availability, geographic, semantic and temporal filters");
  add_common(filter, common, true);
  auto* associate = app.add_subcommand("associate", "Close sites and bearing offsets per event");
  add_common(associate, common, true);
  auto* analyze = app.add_subcommand("analyze", "Rank candidate venues for a degraded cell");
  add_common(analyze, common, true);
  analyze->add_option("--cell", cell, "Degraded cell id")->required();
  analyze->add_option("--threshold", threshold, "Flag threshold on |r| (default 0.7)");
  analyze->add_option("--stat", stat, "Aggregate: median|mean|max")->check(CLI::IsMember({"median", "mean", "max"}));
  auto* simulate = app.add_subcommand("simulate", "Write a synthetic fixture bundle");
  add_common(simulate, common, false);
  simulate->add_option("--preset", preset, "table1|funnel|detection");
  simulate->add_option("--spec", spec, "Scenario spec (JSON)");
  simulate->add_option("--seed", seed, "Seed for the detection preset");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  if (common.verbose) spdlog::set_level(spdlog::level::debug);

  try {
    if (*ingest) return cmd_ingest(common);
    if (*filter) return cmd_filter(common);
    if (*associate) return cmd_associate(common);
    if (*analyze) return cmd_analyze(common, cell, threshold, stat);
    if (*simulate) return cmd_simulate(common, preset, spec, seed);
  } catch (const Error& e) {
    spdlog::error("{}", e.what());
    return e.is_io() ? 2 : 1;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 1;
}
