#include <map>
#include <set>

#include <gtest/gtest.h>

#include "support.hpp"
#include "transitsim/csv.hpp"

using namespace transitsim;
using tstest::TempDir;
using tstest::write_file;

namespace {

// Minimal feed: stops on a line at x = 0, 500, 1000 (y = 0), one weekday service.
struct FeedBuilder {
  std::string stops = "stop_id,stop_name,stop_x,stop_y\nA,A,0,0\nB,B,500,0\nC,C,1000,0\n";
  std::string routes = "route_id,agency_id,route_short_name,route_type\nR1,AG,R1,3\n";
  std::string trips = "route_id,service_id,trip_id\n";
  std::string stop_times = "trip_id,arrival_time,departure_time,stop_id,stop_sequence\n";
  std::string calendar =
      "service_id,monday,tuesday,wednesday,thursday,friday,saturday,sunday,start_date,end_date\n"
      "WK,1,1,1,1,1,0,0,20250101,20251231\n";

  void trip(const std::string& route, const std::string& id, const std::vector<std::pair<std::string, std::string>>& st,
            const std::string& service = "WK") {
    trips += route + "," + service + "," + id + "\n";
    int seq = 1;
    for (const auto& [stop, time] : st) stop_times += id + "," + time + "," + time + "," + stop + "," + std::to_string(seq++) + "\n";
  }

  void write(const std::filesystem::path& dir) const {
    write_file(dir / "stops.txt", stops);
    write_file(dir / "routes.txt", routes);
    write_file(dir / "trips.txt", trips);
    write_file(dir / "stop_times.txt", stop_times);
    write_file(dir / "calendar.txt", calendar);
  }
};

const ServiceDate kTuesday = ServiceDate::parse("20250304");

}  // namespace

TEST(LinkSpeed, JamSpacingGivesZero) {
  Link l = tstest::make_link(1, 0, 1, 300, 30);
  EXPECT_DOUBLE_EQ(link_speed(l, l.jam_spacing, VehicleClass::car), 0.0);
  EXPECT_DOUBLE_EQ(link_speed(l, 1.0, VehicleClass::car), 0.0);
}

TEST(LinkSpeed, LargeSpacingGivesFreeFlow) {
  Link l = tstest::make_link(1, 0, 1, 300, 30);
  EXPECT_DOUBLE_EQ(link_speed(l, 1e6, VehicleClass::car), 30.0);
}

TEST(LinkSpeed, CongestedBranch) {
  Link l = tstest::make_link(1, 0, 1, 300, 30);
  l.wave_speed = 6.67;
  l.jam_spacing = 7.5;
  EXPECT_NEAR(link_speed(l, 15.0, VehicleClass::car), 6.67, 1e-12);
}

TEST(LinkSpeed, ClassFactorsScaleSpeedAndSpacing) {
  Link l = tstest::make_link(1, 0, 1, 300, 20);
  l.factors[static_cast<int>(VehicleClass::bus)] = {0.5, 2.0};
  EXPECT_DOUBLE_EQ(link_speed(l, 1e6, VehicleClass::bus), 10.0);
  EXPECT_DOUBLE_EQ(link_speed(l, 15.0, VehicleClass::bus), 0.0);
}

TEST(LinkSpeed, MonotoneInSpacing) {
  Link l = tstest::make_link(1, 0, 1, 300, 25);
  double prev = -1.0;
  for (double s = 0.0; s < 200.0; s += 0.25) {
    const double v = link_speed(l, s, VehicleClass::car);
    EXPECT_GE(v, prev);
    EXPECT_LE(v, 25.0);
    prev = v;
  }
}

TEST(ModeMask, ParseAndPrint) {
  EXPECT_EQ(parse_mode_mask("auto|bus|walk"), kAuto | kBus | kWalk);
  EXPECT_EQ(parse_mode_mask("walk;bike"), kWalk | kBike);
  EXPECT_EQ(mode_mask_string(parse_mode_mask("bike auto")), "auto|bike");
  EXPECT_THROW(parse_mode_mask("auto|hovercraft"), ParseError);
}

TEST(Csv, QuotedFieldsAndBom) {
  const auto t = csv::Table::parse("\xEF\xBB\xBF" "a,b\n\"x,1\",\"say \"\"hi\"\"\"\n\"multi\nline\",2\n", "mem");
  ASSERT_EQ(t.size(), 2u);
  EXPECT_EQ(t.at(0, t.column("a")), "x,1");
  EXPECT_EQ(t.at(0, t.column("b")), "say \"hi\"");
  EXPECT_EQ(t.at(1, 0), "multi\nline");
  EXPECT_THROW(t.column("zzz"), ParseError);
}

TEST(Csv, EscapeRoundTrip) {
  for (std::string s : {"plain", "with,comma", "with \"quote\"", "line\nbreak", ""}) {
    const auto rec = csv::parse_records(csv::escape(s) + ",x\n");
    ASSERT_EQ(rec.size(), 1u);
    EXPECT_EQ(rec[0][0], s);
  }
}

TEST(Csv, DoubleFormattingRoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, 12345.678, -2.5e-9, 0.0}) EXPECT_EQ(std::stod(csv::fmt_double(v)), v);
}

TEST(Roadway, ReadsNodesAndLinks) {
  TempDir dir;
  write_file(dir / "nodes.csv", "id,x,y,zone\n10,0,0,1\n20,100,0,2\n");
  write_file(dir / "links.csv",
             "id,from,to,length_m,lanes,ffs_mps,jam_spacing_m,wave_mps,modes,congestable\n"
             "1,10,20,100,2,15,7.5,6,auto|walk,1\n");
  const auto r = read_roadway(dir / "nodes.csv", dir / "links.csv");
  ASSERT_EQ(r.links.size(), 1u);
  EXPECT_EQ(r.links[0].from, 0);
  EXPECT_EQ(r.links[0].to, 1);
  EXPECT_EQ(r.links[0].lanes, 2);
  EXPECT_EQ(r.links[0].modes, kAuto | kWalk);
}

TEST(Roadway, DanglingNodeIsAnError) {
  TempDir dir;
  write_file(dir / "nodes.csv", "id,x,y,zone\n10,0,0,1\n");
  write_file(dir / "links.csv",
             "id,from,to,length_m,lanes,ffs_mps,jam_spacing_m,wave_mps,modes,congestable\n"
             "1,10,99,100,1,15,7.5,6,auto,1\n");
  EXPECT_ANY_THROW(read_roadway(dir / "nodes.csv", dir / "links.csv"));
}

TEST(Gtfs, OneRouteTwoTripsThreeStops) {
  TempDir dir;
  FeedBuilder f;
  f.trip("R1", "T1", {{"A", "08:00:00"}, {"B", "08:05:00"}, {"C", "08:10:00"}});
  f.trip("R1", "T2", {{"A", "08:30:00"}, {"B", "08:35:00"}, {"C", "08:40:00"}});
  f.write(dir.path());
  const auto feed = parse_gtfs(dir.path(), kTuesday);
  ASSERT_EQ(feed.patterns.size(), 1u);
  EXPECT_EQ(feed.patterns[0].trips.size(), 2u);
  EXPECT_EQ(feed.patterns[0].stops.size(), 3u);
  EXPECT_EQ(feed.stops.size(), 3u);
  EXPECT_TRUE(feed.warnings.empty());
  EXPECT_DOUBLE_EQ(feed.patterns[0].trips[0].departures[0], 8 * 3600.0);
}

TEST(Gtfs, DecreasingStopTimesRejectTrip) {
  TempDir dir;
  FeedBuilder f;
  f.trip("R1", "A1", {{"A", "08:00:00"}, {"B", "08:05:00"}, {"C", "08:10:00"}});
  f.trip("R1", "B1", {{"A", "09:00:00"}, {"B", "08:55:00"}, {"C", "09:10:00"}});
  f.write(dir.path());
  const auto feed = parse_gtfs(dir.path(), kTuesday);
  ASSERT_EQ(feed.patterns.size(), 1u);
  ASSERT_EQ(feed.patterns[0].trips.size(), 1u);
  EXPECT_EQ(feed.patterns[0].trips[0].trip_id, "A1");
  EXPECT_EQ(feed.warnings.size(), 1u);
}

TEST(Gtfs, InactiveServiceDropped) {
  TempDir dir;
  FeedBuilder f;
  f.calendar += "SAT,0,0,0,0,0,1,0,20250101,20251231\n";
  f.trip("R1", "T1", {{"A", "08:00:00"}, {"B", "08:05:00"}});
  f.trip("R1", "T2", {{"A", "09:00:00"}, {"B", "09:05:00"}}, "SAT");
  f.write(dir.path());
  const auto feed = parse_gtfs(dir.path(), kTuesday);
  ASSERT_EQ(feed.patterns.size(), 1u);
  EXPECT_EQ(feed.patterns[0].trips.size(), 1u);
}

TEST(Gtfs, TimesPastMidnight) {
  TempDir dir;
  FeedBuilder f;
  f.trip("R1", "T1", {{"A", "23:55:00"}, {"B", "24:05:00"}});
  f.write(dir.path());
  const auto feed = parse_gtfs(dir.path(), kTuesday);
  ASSERT_EQ(feed.patterns.size(), 1u);
  EXPECT_DOUBLE_EQ(feed.patterns[0].trips[0].arrivals[1], 24 * 3600.0 + 300.0);
}

TEST(Gtfs, MissingFileNamed) {
  TempDir dir;
  FeedBuilder f;
  f.trip("R1", "T1", {{"A", "08:00:00"}, {"B", "08:05:00"}});
  f.write(dir.path());
  std::filesystem::remove(dir / "stops.txt");
  try {
    parse_gtfs(dir.path(), kTuesday);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("stops.txt"), std::string::npos);
  }
}

TEST(Gtfs, DanglingStopReferenceRejectsTrip) {
  TempDir dir;
  FeedBuilder f;
  f.trip("R1", "T1", {{"A", "08:00:00"}, {"Q", "08:05:00"}});
  f.trip("R1", "T2", {{"A", "08:00:00"}, {"B", "08:05:00"}});
  f.write(dir.path());
  const auto feed = parse_gtfs(dir.path(), kTuesday);
  ASSERT_EQ(feed.patterns.size(), 1u);
  EXPECT_EQ(feed.patterns[0].trips.size(), 1u);
  EXPECT_EQ(feed.warnings.size(), 1u);
}

// Patterns never merge across routes; compared with a brute-force grouping.
TEST(Gtfs, PatternGroupingMatchesBruteForce) {
  TempDir dir;
  FeedBuilder f;
  f.routes += "R2,AG,R2,3\n";
  Rng rng(7);
  std::vector<std::tuple<std::string, std::string, std::vector<std::string>>> all;
  const std::vector<std::vector<std::string>> seqs{{"A", "B", "C"}, {"A", "C"}, {"C", "B", "A"}};
  for (int i = 0; i < 40; ++i) {
    const std::string route = rng.below(2) ? "R1" : "R2";
    const auto& seq = seqs[rng.below(seqs.size())];
    const std::string id = "T" + std::to_string(i);
    std::vector<std::pair<std::string, std::string>> st;
    const int start = 6 * 3600 + static_cast<int>(rng.below(3600 * 12));
    for (std::size_t k = 0; k < seq.size(); ++k) st.push_back({seq[k], format_hms(start + 300.0 * k)});
    f.trip(route, id, st);
    all.emplace_back(route, id, seq);
  }
  f.write(dir.path());
  const auto feed = parse_gtfs(dir.path(), kTuesday);

  std::map<std::pair<std::string, std::vector<std::string>>, std::set<std::string>> oracle;
  for (const auto& [route, id, seq] : all) oracle[{route, seq}].insert(id);
  std::map<std::pair<std::string, std::vector<std::string>>, std::set<std::string>> got;
  for (const auto& p : feed.patterns) {
    std::vector<std::string> seq;
    for (int s : p.stops) seq.push_back(feed.stops[s].gtfs_id);
    auto& ids = got[{p.route_id, seq}];
    for (const auto& t : p.trips) ids.insert(t.trip_id);
    for (std::size_t i = 1; i < p.trips.size(); ++i)
      EXPECT_LE(p.trips[i - 1].first_departure(), p.trips[i].first_departure());
  }
  EXPECT_EQ(got, oracle);
  EXPECT_EQ(feed.patterns.size(), oracle.size());
}

TEST(Graph, SingleStopGetsOneWalkAccessEdge) {
  RoadwayData r;
  r.nodes = {{1, 0, 0, 1}, {2, 100, 0, 1}};
  r.links = {tstest::make_link(1, 0, 1, 100, 10)};
  GtfsFeed feed;
  feed.stops.push_back({"S", "S", 0, 5, -1, false, true});
  const auto g = tstest::make_graph(r, feed);
  ASSERT_EQ(g.access_edges().size(), 1u);
  EXPECT_EQ(g.access_edges()[0].node, 0);
  EXPECT_EQ(g.access_edges()[0].kind, AccessKind::walk);
}

TEST(Graph, FarStopFlaggedInaccessible) {
  RoadwayData r;
  r.nodes = {{1, 0, 0, 1}, {2, 100, 0, 1}};
  r.links = {tstest::make_link(1, 0, 1, 100, 10)};
  GtfsFeed feed;
  feed.stops.push_back({"FAR", "FAR", 10000, 10000, -1, false, true});
  const auto g = tstest::make_graph(r, feed);
  EXPECT_EQ(g.inaccessible_stop_count(), 1);
  EXPECT_TRUE(g.access_edges().empty());
}

// Access and transfer edges against a quadratic all-pairs distance filter.
TEST(Graph, AccessAndTransferEdgesMatchDistanceFilter) {
  auto r = tstest::grid_roadway(5, 5, 400, 12);
  GtfsFeed feed;
  feed.stops.push_back({"S1", "", 30, 20, -1, true, true});
  feed.stops.push_back({"S2", "", 800, 420, -1, false, true});
  feed.stops.push_back({"S3", "", 1250, 1590, -1, false, true});
  TransitPattern p;
  p.route_id = "L";
  p.stops = {0, 1, 2};
  p.trips.push_back({"t", {0, 100, 200}, {0, 100, 200}});
  feed.patterns.push_back(p);
  NetworkParams np;
  np.max_access_walk = 900;
  const auto nodes = r.nodes;
  const auto g = tstest::make_graph(r, feed, np);

  std::size_t access = 0, transfers = 0;
  for (const auto& s : feed.stops) {
    double best = kInf;
    for (const auto& n : nodes) best = std::min(best, std::hypot(n.x - s.x, n.y - s.y));
    if (best <= np.max_access_walk) access += s.park_and_ride ? 2 : 1;
  }
  for (const auto& a : feed.stops)
    for (const auto& b : feed.stops)
      if (&a != &b && std::hypot(a.x - b.x, a.y - b.y) <= np.max_access_walk) ++transfers;
  EXPECT_EQ(g.access_edges().size(), access);
  EXPECT_EQ(g.transfer_edges().size(), transfers);
}

TEST(Graph, JsonRoundTrip) {
  auto r = tstest::grid_roadway(3, 3, 200, 10);
  GtfsFeed feed;
  feed.stops.push_back({"S1", "one", 0, 10, -1, true, true});
  feed.stops.push_back({"S2", "two", 400, 10, -1, false, true});
  TransitPattern p;
  p.route_id = "L";
  p.agency = "AG";
  p.stops = {0, 1};
  p.trips.push_back({"t1", {100, 200.5}, {100, 200.5}});
  feed.patterns.push_back(p);
  const auto g = tstest::make_graph(r, feed);
  const auto back = MultimodalGraph::from_json(g.to_json());
  EXPECT_TRUE(g.same_content(back));
  EXPECT_EQ(back.to_json(), g.to_json());
}

TEST(Graph, HeuristicNeverOverestimates) {
  auto r = tstest::grid_roadway(4, 4, 250, 14);
  r.links[3].length = 180;  // shorter than the straight line
  const auto g = tstest::make_graph(r);
  const double v = g.max_free_flow(VehicleClass::car);
  for (std::size_t l = 0; l < g.links().size(); ++l) {
    const auto& link = g.links()[l];
    EXPECT_LE(g.heuristic_seconds(link.from, link.to, v), link.length / v + 1e-9);
  }
}
