#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "socialoam/errors.hpp"
#include "socialoam/network.hpp"
#include "socialoam/stats.hpp"
#include "support.hpp"

using namespace socialoam;
using namespace std::chrono;

namespace {

// 2017-03-06 is a Monday.
const Timestamp monday = sys_days{year{2017} / 3 / 6};

KpiSeries series_from(const Eigen::VectorXd& v, Timestamp epoch0 = monday) {
  return KpiSeries{"C", "M", epoch0, hours{1}, v};
}

}  // namespace

TEST_SUITE("network") {

TEST_CASE("topology from csv") {
  std::istringstream in(
      "cell_id,site_id,lat,lon,azimuth,hor_width,technology\n"
      "C1,S1,36.72,-4.42,0,120,LTE\n"
      "C2,S1,36.72,-4.42,120,120,LTE\n"
      "C3,S1,36.72,-4.42,240,120,LTE\n"
      "D1,S0,36.70,-4.40,90,360,UMTS\n");
  const Topology t = parse_topology(in);
  REQUIRE(t.sites().size() == 2);
  CHECK(t.sites()[0].site_id == "S0");
  const Site* s1 = t.find_site("S1");
  REQUIRE(s1);
  CHECK(s1->cell_ids.size() == 3);
  CHECK(t.cells_of(*s1).size() == 3);
  CHECK(t.find_cell("C2")->azimuth == 120.0);
  CHECK(t.find_cell("nope") == nullptr);

  std::istringstream reparsed(topology_to_csv(t));
  const Topology t2 = parse_topology(reparsed);
  CHECK(topology_to_csv(t2) == topology_to_csv(t));
}

TEST_CASE("topology edge cases") {
  std::istringstream empty("cell_id,site_id,lat,lon,azimuth,hor_width,technology\n");
  const Topology t = parse_topology(empty);
  CHECK(t.sites().empty());
  CHECK(t.cells().empty());

  const std::string header = "cell_id,site_id,lat,lon,azimuth,hor_width,technology\n";
  const auto row_error = [&](const std::string& rows) -> std::size_t {
    std::istringstream in(header + rows);
    try {
      (void)parse_topology(in);
    } catch (const InvariantError& e) {
      return e.row();
    }
    return 0;
  };
  CHECK(row_error("C1,S1,36.7,-4.4,360,120,LTE\n") == 1);
  CHECK(row_error("C1,S1,36.7,-4.4,0,120,LTE\nC2,S1,36.7,-4.4,10,0,LTE\n") == 2);
  CHECK(row_error("C1,S1,36.7,-4.4,0,361,LTE\n") == 1);
  CHECK(row_error("C1,S1,96.7,-4.4,0,120,LTE\n") == 1);
  CHECK(row_error("C1,S1,36.7,-4.4,0,120,LTE\nC1,S1,36.7,-4.4,10,120,LTE\n") == 2);
  CHECK(row_error("C1,S1,36.7,-4.4,0,120,LTE\nC2,S1,36.8,-4.4,10,120,LTE\n") == 2);
  CHECK(row_error("C1,S1,36.7,-4.4,north,120,LTE\n") == 1);

  std::istringstream no_column("cell_id,site_id,lat,lon,azimuth\nC1,S1,1,1,0\n");
  CHECK_THROWS_AS((void)parse_topology(no_column), SchemaError);
  CHECK_THROWS_AS((void)load_topology("/nonexistent/topology.csv"), IoError);
}

TEST_CASE("kpi loading") {
  std::string csv = "cell_id,metric,timestamp,value\n";
  for (int h = 0; h < 24; ++h) csv += "C1,NUM_DROPS,2017-03-06T" + std::string(h < 10 ? "0" : "") + std::to_string(h) + ":00:00Z," + std::to_string(h) + "\n";
  std::istringstream in(csv);
  const auto s = parse_kpis(in);
  REQUIRE(s.size() == 1);
  CHECK(s[0].size() == 24);
  CHECK(s[0].period == hours{1});
  CHECK(s[0].epoch0 == monday);
  CHECK(s[0].values[23] == 23.0);

  std::istringstream gap("cell_id,metric,timestamp,value\nC,M,2017-03-06T00:00Z,1\nC,M,2017-03-06T01:00Z,2\nC,M,2017-03-06T03:00Z,4\n");
  const auto g = parse_kpis(gap);
  REQUIRE(g[0].size() == 4);
  CHECK(std::isnan(g[0].values[2]));
  CHECK(g[0].values[3] == 4.0);

  std::istringstream na("cell_id,metric,timestamp,value\nC,M,2017-03-06T00:00Z,1\nC,M,2017-03-06T01:00Z,NA\nC,M,2017-03-06T02:00Z,\n");
  const auto n = parse_kpis(na);
  CHECK(std::isnan(n[0].values[1]));
  CHECK(std::isnan(n[0].values[2]));

  std::istringstream mixed("cell_id,metric,timestamp,value\nC,M,2017-03-06T00:00Z,1\nC,M,2017-03-06T01:00Z,2\nC,M,2017-03-06T02:30Z,3\n");
  CHECK_THROWS_AS((void)parse_kpis(mixed), NonUniformPeriod);

  std::istringstream dup("cell_id,metric,timestamp,value\nC,M,2017-03-06T00:00Z,1\nC,M,2017-03-06T00:00Z,2\n");
  CHECK_THROWS_AS((void)parse_kpis(dup), InvariantError);

  std::istringstream bad_ts("cell_id,metric,timestamp,value\nC,M,monday,1\n");
  CHECK_THROWS_AS((void)parse_kpis(bad_ts), InvariantError);

  std::istringstream single("cell_id,metric,timestamp,value\nC,M,2017-03-06T00:00Z,1\n");
  CHECK(parse_kpis(single)[0].period == hours{1});

  CHECK_THROWS_AS((void)load_kpis("/nonexistent/kpis.csv"), IoError);
}

TEST_CASE("kpi csv round trip") {
  Eigen::VectorXd v(5);
  v << 1.5, kAbsent<double>, -3.25, 1e-7, 12345.678901234;
  std::vector<KpiSeries> in{series_from(v), KpiSeries{"D", "NUM_DROPS", monday + minutes{15}, minutes{15}, v}};
  testing::TempDir dir("kpi");
  save_kpis(dir.file("k.csv"), in);
  const auto out = load_kpis(dir.file("k.csv"));
  REQUIRE(out.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(out[i].cell_id == in[i].cell_id);
    CHECK(out[i].period == in[i].period);
    CHECK(out[i].epoch0 == in[i].epoch0);
    // Trailing/leading absent samples are not written, so compare the span.
    REQUIRE(out[i].size() == in[i].size());
    for (Eigen::Index k = 0; k < v.size(); ++k) {
      if (std::isnan(v[k])) {
        CHECK(std::isnan(out[i].values[k]));
      } else {
        CHECK(out[i].values[k] == v[k]);
      }
    }
  }
  CHECK(kpis_to_csv(out) == kpis_to_csv(in));
}

TEST_CASE("slots") {
  CHECK(slot_count(PeriodHint::HourOfDay) == 24);
  CHECK(slot_count(PeriodHint::HourOfWeek) == 168);
  CHECK(slot_of(monday, PeriodHint::HourOfWeek) == 0);
  CHECK(slot_of(monday + hours{26}, PeriodHint::HourOfWeek) == 26);
  CHECK(slot_of(monday + hours{26}, PeriodHint::HourOfDay) == 2);
  CHECK(slot_of(monday - hours{1}, PeriodHint::HourOfWeek) == 167);
  CHECK(parse_period_hint("hour_of_day") == PeriodHint::HourOfDay);
  CHECK_THROWS_AS((void)parse_period_hint("weekly"), ConfigError);
}

TEST_CASE("pure periodic signals leave zero residuals") {
  for (PeriodHint hint : {PeriodHint::HourOfDay, PeriodHint::HourOfWeek}) {
    const Eigen::Index cycle = slot_count(hint);
    Eigen::VectorXd v(cycle * 3 + 5);
    for (Eigen::Index n = 0; n < v.size(); ++n) {
      const double ph = 2.0 * std::numbers::pi * static_cast<double>(n % cycle) / static_cast<double>(cycle);
      v[n] = 50.0 + 30.0 * std::sin(ph) + 7.0 * std::cos(3 * ph) + 1e3;
    }
    // Start mid-week so the slot mapping is exercised.
    const auto ns = normalize_periodic(series_from(v, monday + hours{29}), hint);
    CHECK(ns.residual.values.cwiseAbs().maxCoeff() <= 1e-9);
    const Eigen::VectorXd back = ns.reconstruct();
    CHECK((back - v).cwiseAbs().maxCoeff() <= 1e-9);
  }

  const auto c = normalize_periodic(series_from(Eigen::VectorXd::Constant(72, 4.2)), PeriodHint::HourOfDay);
  CHECK(c.baseline.size() == 24);
  CHECK((c.baseline.array() == 4.2).all());
  CHECK((c.residual.values.array() == 0.0).all());
}

TEST_CASE("spike survives normalization") {
  Eigen::VectorXd v(24 * 7);
  for (Eigen::Index n = 0; n < v.size(); ++n) v[n] = 100.0 + 40.0 * std::sin(2.0 * std::numbers::pi * static_cast<double>(n % 24) / 24.0);
  const Eigen::Index at = 24 * 3 + 20;
  v[at] += 35.0;
  v[5] = kAbsent<double>;
  const auto ns = normalize_periodic(series_from(v), PeriodHint::HourOfDay);
  CHECK(ns.residual.values[at] == doctest::Approx(35.0).epsilon(1e-12));
  CHECK(std::isnan(ns.residual.values[5]));
  double rest = 0.0;
  for (Eigen::Index n = 0; n < v.size(); ++n) {
    if (n != at && n != 5) rest = std::max(rest, std::fabs(ns.residual.values[n]));
  }
  CHECK(rest <= 1e-9);
}

TEST_CASE("insufficient history") {
  CHECK_THROWS_AS((void)normalize_periodic(series_from(Eigen::VectorXd::Ones(47)), PeriodHint::HourOfDay), InsufficientHistory);
  CHECK_NOTHROW((void)normalize_periodic(series_from(Eigen::VectorXd::Ones(48)), PeriodHint::HourOfDay));
  CHECK_THROWS_AS((void)normalize_periodic(series_from(Eigen::VectorXd::Ones(24 * 9)), PeriodHint::HourOfWeek), InsufficientHistory);
}

}
