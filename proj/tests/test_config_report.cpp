#include <doctest.h>

#include "socialoam/config.hpp"
#include "socialoam/errors.hpp"
#include "socialoam/report.hpp"
#include "socialoam/scenario.hpp"
#include "support.hpp"

using namespace socialoam;
using namespace std::chrono;
using nlohmann::json;

namespace {

json sample_config() {
  return json::parse(R"({
    "sources": [{"source_id": "cal", "kind": "file", "locator": "feeds/cal.ndjson", "format": "json",
                 "field_map": {"title": "NAME", "when": "START_TIME"}, "priority": 2, "utc_offset": "+01:00"},
                {"source_id": "web", "kind": "http", "locator": "http://127.0.0.1:9/events", "format": "csv",
                 "field_map": {"t": "NAME", "s": "START_TIME"}}],
    "geocoder": {"stub_table": "geo.csv"},
    "scope": {"geo": {"categorical": {"country": "Spain", "region": "Andalusia", "city": "Malaga"},
                      "circle": {"lat": 36.72, "lon": -4.42, "radius_km": 15}},
              "time": {"start": "2017-03-01T00:00:00Z", "end": "2017-04-24T00:00:00Z"}},
    "filter": {"blacklist_terms": ["bar", "pub"], "region_whitelist": ["Andalusia"], "rank_key": null},
    "fusion": {"name_threshold": 0.9, "time_tolerance_minutes": 45},
    "geo_assoc": {"max_dist_km": 2.5, "min_sites": 1, "max_sites": 5},
    "eaw": {"pre_margin": 2, "post_margin": 1, "default_duration_minutes": 150,
            "category_durations_minutes": {"match": 120}, "sigma_multiplier": 1.5},
    "normalization": "hour_of_day",
    "metrics": ["NUM_DROPS"],
    "r_threshold": 0.6,
    "aggregate_stat": "median",
    "paths": {"topology": "net/topology.csv", "kpis": "/abs/kpis.csv", "out_dir": "out"}
  })");
}

}  // namespace

TEST_SUITE("config_report") {

TEST_CASE("run config parsing") {
  const RunConfig cfg = run_config_from_json(sample_config(), "/data/run1");
  REQUIRE(cfg.sources.size() == 2);
  CHECK(cfg.sources[0].locator == "/data/run1/feeds/cal.ndjson");
  CHECK(cfg.sources[0].utc_offset == minutes{60});
  CHECK(cfg.sources[1].locator == "http://127.0.0.1:9/events");
  CHECK(cfg.sources[1].format == RecordFormat::CsvRecords);
  CHECK(cfg.geocoder.stub_table == "/data/run1/geo.csv");
  REQUIRE(cfg.filter.geo.circle);
  CHECK(cfg.filter.geo.circle->radius_km == 15.0);
  CHECK_FALSE(cfg.filter.geo.box.has_value());
  CHECK(cfg.filter.time->end == sys_days{year{2017} / 4 / 24});
  CHECK_FALSE(cfg.filter.rank_key.has_value());
  CHECK(cfg.fusion.time_tolerance == minutes{45});
  CHECK(cfg.fusion.source_priority.at("cal") == 2);
  CHECK(cfg.eaw.default_duration == minutes{150});
  CHECK(cfg.eaw.category_durations.at("match") == hours{2});
  CHECK(cfg.normalization == Normalization::HourOfDay);
  CHECK(cfg.aggregate_stat == AggregateStat::Median);
  CHECK(cfg.paths.topology == "/data/run1/net/topology.csv");
  CHECK(cfg.paths.kpis == "/abs/kpis.csv");
  CHECK(cfg.paths.out_dir == "/data/run1/out");

  const auto p = cfg.identify_params();
  CHECK(p.geo.max_dist_km == 2.5);
  CHECK(p.r_threshold == 0.6);
  CHECK(p.metrics == std::vector<std::string>{"NUM_DROPS"});
}

TEST_CASE("defaults") {
  const RunConfig cfg = run_config_from_json(json::object());
  CHECK(cfg.r_threshold == 0.7);
  CHECK(cfg.aggregate_stat == AggregateStat::Mean);
  CHECK(cfg.geo_assoc.max_dist_km == 2.0);
  CHECK(cfg.geo_assoc.min_sites == 1);
  CHECK(cfg.geo_assoc.max_sites == 7);
  CHECK(cfg.eaw.pre_margin == 1);
  CHECK(cfg.eaw.post_margin == 1);
  CHECK(cfg.eaw.default_duration == hours{3});
  CHECK(cfg.fusion.name_threshold == 0.85);
  CHECK(cfg.fusion.time_tolerance == minutes{30});
  CHECK(cfg.metrics.size() == 3);
}

TEST_CASE("config errors") {
  const auto rejects = [](json j) { CHECK_THROWS_AS((void)run_config_from_json(j), ConfigError); };
  auto j = sample_config();
  j["colour"] = "blue";
  rejects(j);
  j = sample_config();
  j["eaw"]["typo"] = 1;
  rejects(j);
  j = sample_config();
  j["r_threshold"] = 1.5;
  rejects(j);
  j = sample_config();
  j["r_threshold"] = "high";
  rejects(j);
  j = sample_config();
  j["aggregate_stat"] = "mode";
  rejects(j);
  j = sample_config();
  j["sources"][0]["kind"] = "ftp";
  rejects(j);
  j = sample_config();
  j["sources"][1]["source_id"] = "cal";
  rejects(j);
  j = sample_config();
  j["geo_assoc"]["max_sites"] = 0;
  rejects(j);
  j = sample_config();
  j["scope"]["time"]["end"] = "2017-02-01T00:00:00Z";
  rejects(j);
  j = sample_config();
  j["scope"]["time"]["start"] = "soon";
  rejects(j);
  j = sample_config();
  j["scope"]["geo"]["circle"]["radius_km"] = -1;
  rejects(j);
  j = sample_config();
  j["filter"]["blacklist_terms"] = {"Bar"};
  rejects(j);
  j = sample_config();
  j["geocoder"]["endpoint"] = "http://x";
  rejects(j);
  j = sample_config();
  j["metrics"] = json::array();
  rejects(j);

  testing::TempDir dir("cfg");
  CHECK_THROWS_AS((void)load_run_config(dir.write("bad.json", "{ not json")), ConfigError);
  CHECK_THROWS_AS((void)load_run_config(dir.file("absent.json")), IoError);
}

TEST_CASE("config save and reload is stable") {
  testing::TempDir dir("cfgrt");
  const RunConfig cfg = run_config_from_json(sample_config(), dir.path().string());
  save_run_config(dir.file("a.json"), cfg);
  const RunConfig again = load_run_config(dir.file("a.json"));
  CHECK(to_json(again) == to_json(cfg));
  save_run_config(dir.file("b.json"), again);
  CHECK(testing::slurp(dir.file("a.json")) == testing::slurp(dir.file("b.json")));
}

TEST_CASE("report round trip") {
  const auto b = table1_fixture();
  const Cell* cell = b.topology.find_cell("CELL_1A");
  const auto analysis = identify_causes(*cell, b.events, b.topology, b.kpis, b.config.identify_params());
  const auto records = cause_records(analysis, b.topology, b.config.geo_assoc);
  REQUIRE(records.size() == 7);
  const std::string text = records_to_json(records);
  const auto parsed = records_from_json(text);
  CHECK(parsed == records);
  CHECK(records_to_json(parsed) == text);

  const auto j = json::parse(text);
  const auto& first = j.at(0);
  for (const char* key : {"EVENT_ID", "NAME", "START_TIME", "END_TIME", "VENUE", "ADDRESS", "LAT", "LON", "RANK", "FLAGGED",
                          "GEOGRAPHICAL_CLOSE_SITES", "CELL_BEARINGS", "CORRELATED_CELLS"}) {
    CHECK(first.contains(key));
  }
  CHECK(first["VENUE"] == "VENUE_L");
  CHECK(first["RANK"] == 1);
  CHECK(first["CORRELATED_CELLS"].size() == 3);

  // Ranks are dense 1..N and follow the venue order.
  std::size_t last = 1;
  for (const auto& r : records) {
    CHECK(*r.rank >= last);
    CHECK(*r.rank <= last + 1);
    last = *r.rank;
  }
  CHECK(last == analysis.ranking.size());
}

TEST_CASE("report schema errors") {
  CHECK_THROWS_AS((void)records_from_json("{}"), SchemaError);
  CHECK_THROWS_AS((void)records_from_json("not json"), SchemaError);
  CHECK_THROWS_AS((void)records_from_json(R"([{"NAME": "x"}])"), SchemaError);
  CHECK_THROWS_AS((void)records_from_json(
                      R"([{"EVENT_ID":"a","NAME":"x","START_TIME":"later","GEOGRAPHICAL_CLOSE_SITES":[],"CORRELATED_CELLS":[]}])"),
                  SchemaError);
  const auto ok = records_from_json(R"([{"EVENT_ID":"a","NAME":"x","START_TIME":"2017-03-01T00:00:00Z","GEOGRAPHICAL_CLOSE_SITES":[],"CORRELATED_CELLS":[]}])");
  REQUIRE(ok.size() == 1);
  CHECK_FALSE(ok[0].lat.has_value());
  CHECK_FALSE(ok[0].rank.has_value());
}

TEST_CASE("association records") {
  const auto b = table1_fixture();
  auto events = b.events;
  SocialEvent nowhere = events.front();
  nowhere.event_id = "sim/none";
  nowhere.lat.reset();
  nowhere.lon.reset();
  events.push_back(nowhere);
  std::vector<std::string> skipped;
  const auto recs = association_records(events, b.topology, b.config.geo_assoc, &skipped);
  CHECK(recs.size() == b.events.size());
  CHECK(skipped == std::vector<std::string>{"sim/none"});
  for (const auto& r : recs) {
    REQUIRE(r.close_sites.size() == 1);
    CHECK(r.close_sites[0].site_id == "SITE_1");
    CHECK(r.cell_bearings.size() == 3);
    std::size_t in_beam = 0;
    for (const auto& cb : r.cell_bearings) in_beam += cb.in_beam;
    CHECK(in_beam <= 1);
    CHECK(r.correlated_cells.empty());
  }
}

TEST_CASE("summary csv and venue impacts") {
  const auto b = table1_fixture();
  const Cell* cell = b.topology.find_cell("CELL_1A");
  const auto analysis = identify_causes(*cell, b.events, b.topology, b.kpis, b.config.identify_params());
  const std::string csv = cause_summary_csv(analysis);
  CHECK(csv.rfind("rank,venue,n_events,best_metric,best_abs_r,flagged\n", 0) == 0);
  CHECK(csv.find("1,VENUE_L,3,DL_USER_THR,0.84") != std::string::npos);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);

  const auto j = venue_impacts_json(analysis, AggregateStat::Mean, 0.7);
  CHECK(j["cell_id"] == "CELL_1A");
  CHECK(j["venues"].size() == 5);
  CHECK(j["venues"][0]["metrics"]["NUM_DROPS"]["n_events"] == 3);

  const std::string drops = drops_csv({{"s/1", FilterStage::Semantic, "VENUE contains 'bar, pub'"}});
  CHECK(drops == "event_id,stage,reason\ns/1,semantic,\"VENUE contains 'bar, pub'\"\n");
}

}
