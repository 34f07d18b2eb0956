#include <doctest.h>

#include <thread>

#include <httplib.h>

#include "socialoam/errors.hpp"
#include "socialoam/events.hpp"
#include "socialoam/http.hpp"
#include "socialoam/ingest.hpp"
#include "support.hpp"

using namespace socialoam;
using namespace std::chrono;
using nlohmann::json;

namespace {

Timestamp utc(int y, unsigned mo, unsigned d, int h = 0, int mi = 0) {
  return sys_days{year{y} / month{mo} / day{d}} + hours{h} + minutes{mi};
}

SourceConfig simple_source(const std::string& locator, RecordFormat fmt = RecordFormat::JsonRecords) {
  SourceConfig s;
  s.source_id = "cal";
  s.locator = locator;
  s.format = fmt;
  s.field_map = {{"id", "ID"}, {"title", "NAME"}, {"when", "START_TIME"}, {"lat", "LAT"}, {"lon", "LON"}, {"place", "VENUE"}};
  return s;
}

// Local HTTP server on an ephemeral port, stopped on destruction.
class LocalServer {
 public:
  LocalServer() {
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~LocalServer() {
    server_.stop();
    thread_.join();
  }
  httplib::Server& server() { return server_; }
  [[nodiscard]] std::string url(const std::string& path) const { return "http://127.0.0.1:" + std::to_string(port_) + path; }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

}  // namespace

TEST_SUITE("ingest") {

TEST_CASE("file source yields every record") {
  testing::TempDir dir("ingest");
  std::string body;
  for (int i = 0; i < 5; ++i) {
    body += json{{"id", std::to_string(i)}, {"title", "Event " + std::to_string(i)}, {"when", "2017-03-01T20:00Z"}}.dump() + "\n";
  }
  const auto path = dir.write("five.ndjson", body);
  const auto raw = fetch_raw(simple_source(path), GeoScope::whole_earth(), std::nullopt);
  REQUIRE(raw.size() == 5);
  CHECK(raw[3].ordinal == 3);
  CHECK(raw[3].fields["title"] == "Event 3");
}

TEST_CASE("missing file is unreachable") {
  try {
    (void)fetch_raw(simple_source("/nonexistent/feed.ndjson"), GeoScope::whole_earth(), std::nullopt);
    FAIL("expected SourceUnreachable");
  } catch (const SourceUnreachable& e) {
    CHECK(e.source_id() == "cal");
    CHECK(e.is_io());
  }
}

TEST_CASE("payload decoding") {
  CHECK(decode_payload(R"([{"a":1},{"a":2}])", RecordFormat::JsonRecords).size() == 2);
  CHECK(decode_payload("{\"a\":1}\n\n{\"a\":2}\n", RecordFormat::JsonRecords).size() == 2);
  CHECK(decode_payload("", RecordFormat::JsonRecords).empty());
  CHECK_THROWS_AS((void)decode_payload("{\"a\":1}\n{oops\n", RecordFormat::JsonRecords), MalformedPayload);
  CHECK_THROWS_AS((void)decode_payload("[1,2]", RecordFormat::JsonRecords), MalformedPayload);
  CHECK_THROWS_AS((void)decode_payload("[{\"a\":1}", RecordFormat::JsonRecords), MalformedPayload);

  const auto rows = decode_payload("title,when\n\"Fair, spring\",2017-03-01T10:00Z\n", RecordFormat::CsvRecords);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].fields["title"] == "Fair, spring");
  CHECK_THROWS_AS((void)decode_payload("a,b\n1\n", RecordFormat::CsvRecords), MalformedPayload);
}

TEST_CASE("parse_record mapping") {
  SourceConfig cfg;
  cfg.source_id = "src";
  cfg.field_map = {{"title", "NAME"}, {"when", "START_TIME"}};
  const auto e = parse_record({json{{"title", "Concert A"}, {"when", "2017-03-01T20:00Z"}}, 4}, cfg);
  CHECK(e.name == "Concert A");
  CHECK(e.start_time == utc(2017, 3, 1, 20));
  CHECK(e.event_id == "src/r4");
  CHECK_FALSE(e.lat.has_value());
  CHECK_FALSE(e.venue.has_value());

  CHECK_THROWS_AS((void)parse_record({json{{"title", "No start"}}, 0}, cfg), MissingRequiredField);
  CHECK_THROWS_AS((void)parse_record({json{{"when", "2017-03-01T20:00Z"}}, 0}, cfg), MissingRequiredField);
  CHECK_THROWS_AS((void)parse_record({json{{"title", "x"}, {"when", "soon"}}, 0}, cfg), UnparseableTimestamp);
}

TEST_CASE("parse_record converts local time and nested fields") {
  SourceConfig cfg;
  cfg.source_id = "src";
  cfg.field_map = {{"t", "NAME"}, {"s", "START_TIME"}, {"e", "END_TIME"}, {"geo.lat", "LAT"}, {"geo.lon", "LON"},
                   {"p.city", "ADDRESS.CITY"}, {"p.region", "ADDRESS.REGION"}, {"pop", "POPULARITY"}, {"k", "ID"}};
  const json rec = {{"t", "Night"}, {"s", "2017-03-01T20:00+02:00"}, {"e", "2017-03-01T23:00"}, {"geo", {{"lat", "36.7"}, {"lon", -4.4}}},
                    {"p", {{"city", "Malaga"}, {"region", "Andalusia"}}}, {"pop", 120}, {"k", 77}};
  cfg.utc_offset = minutes{60};
  const auto e = parse_record({rec, 0}, cfg);
  CHECK(e.start_time == utc(2017, 3, 1, 18));
  CHECK(e.end_time == utc(2017, 3, 1, 22));
  CHECK(e.lat == 36.7);
  CHECK(e.lon == -4.4);
  CHECK(e.address->city == "Malaga");
  CHECK(e.address->region == "Andalusia");
  CHECK(e.popularity == 120.0);
  CHECK(e.event_id == "src/77");

  json half = rec;
  half["geo"].erase("lon");
  CHECK_THROWS_AS((void)parse_record({half, 0}, cfg), InvariantError);
  json bad_end = rec;
  bad_end["e"] = "2017-03-01T17:00Z";
  CHECK_THROWS_AS((void)parse_record({bad_end, 0}, cfg), InvariantError);
}

TEST_CASE("source config validation") {
  SourceConfig s = simple_source("x");
  CHECK_NOTHROW(s.validate());
  s.priority = -1;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = simple_source("x");
  s.field_map.erase("when");
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = simple_source("x");
  s.field_map["x"] = "COLOUR";
  CHECK_THROWS_AS(s.validate(), ConfigError);
  CHECK_THROWS_AS(validate_sources({simple_source("a"), simple_source("b")}), ConfigError);
}

TEST_CASE("canonical serialization round trip") {
  SocialEvent e;
  e.event_id = "cal/1";
  e.source_id = "cal";
  e.raw_id = "1";
  e.name = "Summer concert";
  e.start_time = utc(2017, 3, 7, 20);
  e.end_time = utc(2017, 3, 7, 23);
  e.lat = 36.7263;
  e.lon = -4.4181;
  e.venue = "VENUE_L";
  e.address = Address{"Calle Larios 1", "Malaga", "Andalusia", "Spain", std::nullopt};
  e.category = "music";
  e.popularity = 4000;
  CHECK(event_from_json(to_json(e)) == e);

  SourceConfig canon;
  canon.source_id = "cal";
  canon.field_map = canonical_field_map();
  CHECK(parse_record({to_json(e), 0}, canon) == e);

  testing::TempDir dir("events");
  write_events(dir.file("e.ndjson"), {e, e});
  CHECK(read_events(dir.file("e.ndjson")) == std::vector<SocialEvent>{e, e});
  CHECK_THROWS_AS((void)read_events(dir.file("missing.ndjson")), IoError);
}

TEST_CASE("stub geocoder consolidation") {
  StubGeocoder stub;
  stub.add("Av. X 1, Malaga", {{36.72, -4.42}, "Avenida X 1, 29001 Malaga"});
  CHECK(stub.resolve("av x 1 malaga").has_value());

  SocialEvent located;
  located.event_id = "a/1";
  located.name = "n";
  located.lat = 1.0;
  located.lon = 2.0;
  located.address = Address{"Av. X 1", "Malaga", std::nullopt, std::nullopt, std::nullopt};
  CHECK(consolidate(located, stub) == located);

  SocialEvent e;
  e.event_id = "a/2";
  e.name = "n";
  e.address = Address{"Av. X 1", "Malaga", std::nullopt, std::nullopt, std::nullopt};
  const auto c = consolidate(e, stub);
  CHECK(c.lat == 36.72);
  CHECK(c.lon == -4.42);
  CHECK(c.address->normalized == "Avenida X 1, 29001 Malaga");
  CHECK(c.address->street == "Av. X 1");

  SocialEvent lost = e;
  lost.address->street = "Nowhere 9";
  CHECK(consolidate(lost, stub) == lost);

  // Venue fallback.
  stub.add("Teatro Cervantes", {{36.7236, -4.4197}, ""});
  SocialEvent by_venue;
  by_venue.event_id = "a/3";
  by_venue.name = "n";
  by_venue.venue = "TEATRO CERVANTES";
  CHECK(consolidate(by_venue, stub).lat == 36.7236);
}

TEST_CASE("stub geocoder from csv") {
  testing::TempDir dir("geo");
  const auto ok = dir.write("g.csv", "query,lat,lon,normalized_address\n\"Av. X 1, Malaga\",36.72,-4.42,Avenida X 1\n");
  CHECK(StubGeocoder::from_csv(ok).size() == 1);
  const auto bad = dir.write("b.csv", "query,lat,lon,normalized_address\nq,north,-4.42,x\n");
  CHECK_THROWS_AS((void)StubGeocoder::from_csv(bad), InvariantError);
  const auto cols = dir.write("c.csv", "query,lat\nq,1\n");
  CHECK_THROWS_AS((void)StubGeocoder::from_csv(cols), SchemaError);
}

TEST_CASE("http source and geocoder against a local server") {
  LocalServer srv;
  std::string seen_query;
  srv.server().Get("/events", [&](const httplib::Request& req, httplib::Response& res) {
    seen_query = req.get_param_value("start") + "|" + req.get_param_value("end") + "|" + req.get_param_value("city");
    res.set_content(R"([{"title":"A","when":"2017-03-01T20:00Z"},{"title":"B","when":"2017-03-02T20:00Z"}])", "application/json");
  });
  srv.server().Get("/broken", [](const httplib::Request&, httplib::Response& res) { res.status = 503; });
  srv.server().Get("/geo", [](const httplib::Request& req, httplib::Response& res) {
    if (req.get_param_value("q") == "Av. X 1, Malaga") {
      res.set_content(R"({"lat":36.72,"lon":-4.42,"normalized_address":"Avenida X 1"})", "application/json");
    } else {
      res.status = 404;
    }
  });

  SourceConfig s = simple_source(srv.url("/events"));
  s.kind = SourceKind::Http;
  GeoScope geo;
  geo.categorical = CategoricalScope{"Spain", "Andalusia", "Malaga"};
  const auto raw = fetch_raw(s, geo, TimeScope{utc(2017, 3, 1), utc(2017, 4, 24)});
  CHECK(raw.size() == 2);
  CHECK(seen_query == "2017-03-01T00:00:00Z|2017-04-24T00:00:00Z|Malaga");

  s.locator = srv.url("/broken");
  CHECK_THROWS_AS((void)fetch_raw(s, geo, std::nullopt), SourceUnreachable);

  const HttpGeocoder geocoder(srv.url("/geo"), seconds(5));
  const auto hit = geocoder.resolve("Av. X 1, Malaga");
  REQUIRE(hit.has_value());
  CHECK(hit->point.lat == 36.72);
  CHECK_FALSE(geocoder.resolve("elsewhere").has_value());
}

TEST_CASE("unreachable http endpoints") {
  // Port 1 is privileged and unused here, so connections are refused.
  const std::string dead = "http://127.0.0.1:1/x";
  SourceConfig s = simple_source(dead);
  s.kind = SourceKind::Http;
  CHECK_THROWS_AS((void)fetch_raw(s, GeoScope::whole_earth(), std::nullopt), SourceUnreachable);
  CHECK_FALSE(HttpGeocoder(dead, seconds(2)).resolve("anything").has_value());
}

TEST_CASE("url splitting") {
  CHECK(split_url("http://h:8080/a/b?x=1").scheme_host_port == "http://h:8080");
  CHECK(split_url("http://h:8080/a/b?x=1").path == "/a/b?x=1");
  CHECK(split_url("http://h").path == "/");
  CHECK_THROWS_AS((void)split_url("ftp://h/x"), ConfigError);
  CHECK_THROWS_AS((void)split_url("/just/a/path"), ConfigError);
}

}
