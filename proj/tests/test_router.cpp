#include <gtest/gtest.h>

#include <thread>

#include "router_oracle.hpp"
#include "support.hpp"
#include "transitsim/router.hpp"

using namespace transitsim;
using namespace tstest;

namespace {

// Two nodes 5 km apart, stop A by the first and stop B by the second, each
// 60 m from its node. One bus trip A 1000 s -> B 1600 s.
MultimodalGraph schedule_graph(bool park_and_ride = false) {
  RoadwayData r;
  r.nodes = {{1, 0, 0, 1}, {2, 5000, 0, 2}};
  r.links = {make_link(1, 0, 1, 5000, 10), make_link(2, 1, 0, 5000, 10)};
  GtfsFeed f;
  f.stops.push_back({"A", "A", 0, 60, -1, park_and_ride, true});
  f.stops.push_back({"B", "B", 5000, 60, -1, false, true});
  TransitPattern p;
  p.route_id = "R";
  p.stops = {0, 1};
  p.trips.push_back({"T1", {1000, 1600}, {1000, 1600}});
  f.patterns.push_back(p);
  NetworkParams np;
  np.walk_speed = 1.0;
  np.max_access_walk = 100.0;
  return make_graph(std::move(r), std::move(f), np);
}

}  // namespace

TEST(Profile, FloorsAtFreeFlowAndHas96Bins) {
  RoadwayData r;
  r.nodes = {{1, 0, 0, 1}, {2, 1000, 0, 1}};
  r.links = {make_link(1, 0, 1, 1000, 10)};
  const auto g = make_graph(r);
  TravelTimeProfile p(g);
  EXPECT_EQ(p.values().size(), static_cast<std::size_t>(kBinsPerDay));
  p.set(0, 3, 20.0);
  EXPECT_DOUBLE_EQ(p.time(0, 3), 100.0);
  p.set(0, 3, 250.0);
  EXPECT_DOUBLE_EQ(p.time(0, 3), 250.0);
  p.scale_all(0.1);
  for (int b = 0; b < kBinsPerDay; ++b) EXPECT_GE(p.time(0, b), 100.0);
}

TEST(Profile, ExitTimeIsSupremumOverEarlierEntries) {
  // exit(t) = sup over t' <= t of t' + c(bin(t')), bins closed on the left.
  Rng rng(11);
  const auto inst = random_drive_instance(5, 6);
  const auto& prof = inst.profile;
  for (int l = 0; l < static_cast<int>(inst.g.links().size()); ++l) {
    double last = -kInf;
    for (int t = 0; t < 6 * 3600; t += 1 + static_cast<int>(rng.below(37))) {
      double sup = -kInf;
      for (int b = 0; b < time_bin(t); ++b) sup = std::max(sup, (b + 1.0) * kBinSeconds + prof.time(l, b));
      sup = std::max(sup, t + prof.time(l, time_bin(t)));
      const double e = prof.exit_time(l, t);
      ASSERT_DOUBLE_EQ(e, sup) << "link " << l << " t " << t;
      ASSERT_GE(e, last);
      last = e;
    }
  }
}

TEST(ShortestPath, SingleLinkFreeFlow) {
  RoadwayData r;
  r.nodes = {{1, 0, 0, 1}, {2, 1000, 0, 1}};
  r.links = {make_link(1, 0, 1, 1000, 10)};
  const auto g = make_graph(r);
  const auto plan = shortest_path(g, TravelTimeProfile(g), 0, 1, 8 * 3600, UnimodalMode::drive);
  ASSERT_TRUE(plan.found);
  ASSERT_EQ(plan.legs.size(), 1u);
  EXPECT_EQ(plan.legs[0].kind, LegKind::drive);
  EXPECT_DOUBLE_EQ(plan.predicted_total, 100.0);
}

TEST(ShortestPath, CongestedDirectLinkLosesToDetour) {
  RoadwayData r;
  r.nodes = {{1, 0, 0, 1}, {2, 1000, 0, 1}, {3, 500, 400, 1}};
  r.links = {make_link(1, 0, 1, 1000, 10), make_link(2, 0, 2, 750, 10), make_link(3, 2, 1, 750, 10)};
  const auto g = make_graph(r);
  TravelTimeProfile p(g);
  const Seconds dep = 8 * 3600;
  p.set(0, time_bin(dep), 200.0);
  const auto plan = shortest_path(g, p, 0, 1, dep, UnimodalMode::drive);
  ASSERT_TRUE(plan.found);
  EXPECT_EQ(plan.links(), (std::vector<int>{1, 2}));
  EXPECT_DOUBLE_EQ(plan.predicted_total, 150.0);
  // outside the congested bin the direct link wins
  const auto early = shortest_path(g, p, 0, 1, 6 * 3600, UnimodalMode::drive);
  EXPECT_EQ(early.links(), (std::vector<int>{0}));
}

TEST(ShortestPath, UnreachableIsNoPath) {
  RoadwayData r;
  r.nodes = {{1, 0, 0, 1}, {2, 1000, 0, 1}};
  r.links = {make_link(1, 1, 0, 1000, 10)};
  const auto g = make_graph(r);
  EXPECT_FALSE(shortest_path(g, TravelTimeProfile(g), 0, 1, 0, UnimodalMode::drive).found);
}

TEST(ShortestPath, RandomGraphsMatchTimeExpandedSearch) {
  int no_path = 0;
  for (std::uint64_t s = 1; s <= 100; ++s) {
    const auto inst = random_drive_instance(stream_seed(2024, 3, s));
    const double oracle = time_expanded_drive(inst.g, inst.profile, inst.origin, inst.destination, inst.departure);
    for (bool h : {true, false}) {
      const auto plan = shortest_path(inst.g, inst.profile, inst.origin, inst.destination, inst.departure,
                                      UnimodalMode::drive, {}, SearchOptions{h});
      ASSERT_EQ(plan.found, std::isfinite(oracle)) << "instance " << s;
      if (!plan.found) {
        no_path += h;
        continue;
      }
      ASSERT_EQ(plan.departure + plan.predicted_total, oracle) << "instance " << s << " heuristic " << h;
      ASSERT_EQ(plan_problems(inst.g, plan, {}), "") << "instance " << s;
    }
  }
  EXPECT_LT(no_path, 50);
}

TEST(ShortestPath, WalkAndBikeIgnoreProfile) {
  auto r = grid_roadway(4, 4, 100, 10);
  const auto g = make_graph(r);
  TravelTimeProfile p(g);
  p.scale_all(5.0);
  const auto walk = shortest_path(g, p, 0, 15, 8 * 3600, UnimodalMode::walk);
  const auto bike = shortest_path(g, p, 0, 15, 8 * 3600, UnimodalMode::bike);
  EXPECT_NEAR(walk.predicted_total, 600 / g.params().walk_speed, 1e-9);
  EXPECT_NEAR(bike.predicted_total, 600 / g.params().bike_speed, 1e-9);
  EXPECT_EQ(walk.legs.front().kind, LegKind::walk);
  EXPECT_EQ(bike.legs.front().kind, LegKind::bike);
}

TEST(Intermodal, ScheduleArithmetic) {
  const auto g = schedule_graph();
  const auto plan = intermodal_path(g, TravelTimeProfile(g), 0, 1, 900, AccessMode::walk);
  ASSERT_TRUE(plan.found);
  EXPECT_DOUBLE_EQ(plan.predicted_total, 760.0);
  EXPECT_EQ(plan.boardings(), 1);
  Seconds wait = 0;
  for (const auto& l : plan.legs)
    if (l.kind == LegKind::wait) wait += l.duration;
  EXPECT_DOUBLE_EQ(wait, 40.0);
  EXPECT_EQ(plan_problems(g, plan, {}), "");
}

TEST(Intermodal, MissedLastTripIsNoPath) {
  const auto g = schedule_graph();
  EXPECT_FALSE(intermodal_path(g, TravelTimeProfile(g), 0, 1, 1001, AccessMode::walk).found);
  // 940 s is the last departure that reaches the stop by 1000 s
  EXPECT_TRUE(intermodal_path(g, TravelTimeProfile(g), 0, 1, 940, AccessMode::walk).found);
  EXPECT_FALSE(intermodal_path(g, TravelTimeProfile(g), 0, 1, 941, AccessMode::walk).found);
}

TEST(Intermodal, DriveAccessOnlyAtParkAndRide) {
  const auto plain = schedule_graph(false);
  EXPECT_FALSE(intermodal_path(plain, TravelTimeProfile(plain), 0, 1, 700, AccessMode::drive).found);
  const auto pr = schedule_graph(true);
  const auto plan = intermodal_path(pr, TravelTimeProfile(pr), 0, 1, 700, AccessMode::drive);
  ASSERT_TRUE(plan.found);
  EXPECT_EQ(plan.legs.front().kind, LegKind::park);
  EXPECT_DOUBLE_EQ(plan.legs.front().duration, pr.params().park_time);
  EXPECT_DOUBLE_EQ(plan.departure + plan.predicted_total, 1660.0);
}

TEST(Intermodal, EmptyTransitLayerIsNoPath) {
  const auto g = schedule_graph().without_patterns({false});
  EXPECT_FALSE(intermodal_path(g, TravelTimeProfile(g), 0, 1, 900, AccessMode::walk).found);
}

TEST(Intermodal, RandomInstancesMatchTimeExpandedSearch) {
  int found = 0, drive = 0, transfers = 0, non_fifo = 0;
  for (std::uint64_t s = 1; s <= 200; ++s) {
    const auto inst = random_intermodal_instance(stream_seed(7, 3, s));
    for (std::size_t p = 0; p < inst.g.patterns().size(); ++p) non_fifo += !inst.g.pattern_fifo(static_cast<int>(p));
    const RouterParams rp;
    const double oracle = time_expanded_intermodal(inst.g, inst.profile, inst.origin, inst.destination,
                                                   inst.departure, inst.access, rp.max_boardings);
    const auto plan = intermodal_path(inst.g, inst.profile, inst.origin, inst.destination, inst.departure,
                                      inst.access, rp);
    ASSERT_EQ(plan.found, std::isfinite(oracle)) << "instance " << s;
    if (!plan.found) continue;
    ++found;
    drive += inst.access == AccessMode::drive;
    transfers += plan.boardings() > 1;
    ASSERT_EQ(plan.departure + plan.predicted_total, oracle) << "instance " << s;
    ASSERT_EQ(plan_problems(inst.g, plan, rp), "") << "instance " << s;
  }
  // the generator has to exercise both access modes and transfers
  EXPECT_GT(found, 60);
  EXPECT_GT(drive, 10);
  EXPECT_GT(transfers, 3);
  EXPECT_GT(non_fifo, 20);
}

TEST(Router, SlowerProfileNeverLowersCost) {
  for (std::uint64_t s = 1; s <= 40; ++s) {
    auto d = random_drive_instance(stream_seed(31, 3, s));
    auto im = random_intermodal_instance(stream_seed(32, 3, s));
    const auto a = shortest_path(d.g, d.profile, d.origin, d.destination, d.departure, UnimodalMode::drive);
    const auto b = intermodal_path(im.g, im.profile, im.origin, im.destination, im.departure, AccessMode::drive);
    d.profile.scale_all(1.37);
    im.profile.scale_all(1.37);
    const auto a2 = shortest_path(d.g, d.profile, d.origin, d.destination, d.departure, UnimodalMode::drive);
    const auto b2 = intermodal_path(im.g, im.profile, im.origin, im.destination, im.departure, AccessMode::drive);
    ASSERT_EQ(a.found, a2.found);
    if (a.found) {
      EXPECT_GE(a2.predicted_total, a.predicted_total);
    }
    if (b2.found) {
      ASSERT_TRUE(b.found);
      EXPECT_GE(b2.predicted_total, b.predicted_total);
    }
  }
}

TEST(Router, ConcurrentQueriesAgreeWithSequential) {
  const auto inst = random_intermodal_instance(99);
  const int n = static_cast<int>(inst.g.nodes().size());
  std::vector<double> expect(static_cast<std::size_t>(n) * n), got(expect.size());
  auto run = [&](std::vector<double>& out, int from, int step) {
    for (int i = from; i < n * n; i += step) {
      const auto p = intermodal_path(inst.g, inst.profile, i / n, i % n, inst.departure, AccessMode::walk);
      out[i] = p.found ? p.predicted_total : -1.0;
    }
  };
  run(expect, 0, 1);
  std::vector<std::thread> pool;
  for (int w = 0; w < 4; ++w) pool.emplace_back(run, std::ref(got), w, 4);
  for (auto& t : pool) t.join();
  EXPECT_EQ(got, expect);
}

TEST(Los, TransitUnavailableOnRemovedGraph) {
  const auto inst = random_intermodal_instance(3);
  const auto removed = inst.g.without_patterns(std::vector<bool>(inst.g.patterns().size(), false));
  const auto los = mode_levels_of_service(removed, TravelTimeProfile(removed), 1, 2, inst.departure);
  EXPECT_FALSE(los[static_cast<int>(TravelMode::walk_to_transit)].available);
  EXPECT_FALSE(los[static_cast<int>(TravelMode::drive_to_transit)].available);
  EXPECT_TRUE(los[static_cast<int>(TravelMode::drive)].available);
  const auto intra = mode_levels_of_service(removed, TravelTimeProfile(removed), 1, 1, inst.departure);
  EXPECT_FALSE(intra[static_cast<int>(TravelMode::walk_to_transit)].available);
}

TEST(Los, IntrazonalIsFreeAndAvailable) {
  const auto inst = random_intermodal_instance(4);
  const auto los = mode_levels_of_service(inst.g, inst.profile, 2, 2, inst.departure);
  for (const auto& m : los) {
    EXPECT_TRUE(m.available);
    EXPECT_EQ(m.total_time(), 0.0);
  }
}

TEST(Los, MatchesShortestPathPerMode) {
  for (std::uint64_t s = 1; s <= 20; ++s) {
    const auto inst = random_intermodal_instance(stream_seed(41, 3, s));
    const auto& g = inst.g;
    const int o = g.zone_centroid(1), d = g.zone_centroid(2);
    const auto los = mode_levels_of_service(g, inst.profile, 1, 2, inst.departure);
    const auto drive = shortest_path(g, inst.profile, o, d, inst.departure, UnimodalMode::drive);
    const auto walk = shortest_path(g, inst.profile, o, d, inst.departure, UnimodalMode::walk);
    const auto bike = shortest_path(g, inst.profile, o, d, inst.departure, UnimodalMode::bike);
    const auto wt = intermodal_path(g, inst.profile, o, d, inst.departure, AccessMode::walk);
    const auto& ld = los[static_cast<int>(TravelMode::drive)];
    ASSERT_EQ(ld.available, drive.found);
    if (drive.found) {
      EXPECT_DOUBLE_EQ(ld.in_vehicle, drive.predicted_total);
      EXPECT_NEAR(ld.cost, drive.distance / 1000.0 * LosParams{}.auto_cost_per_km, 1e-12);
    }
    if (walk.found) {
      EXPECT_DOUBLE_EQ(los[static_cast<int>(TravelMode::walk)].walk, walk.predicted_total);
    }
    if (bike.found) {
      EXPECT_DOUBLE_EQ(los[static_cast<int>(TravelMode::bike)].in_vehicle, bike.predicted_total);
    }
    const auto& lw = los[static_cast<int>(TravelMode::walk_to_transit)];
    ASSERT_EQ(lw.available, wt.found);
    if (wt.found) {
      EXPECT_DOUBLE_EQ(lw.total_time(), wt.predicted_total);
    }
  }
}

TEST(Skims, AgreeWithPointQueries) {
  const auto inst = random_intermodal_instance(8);
  const auto& g = inst.g;
  const auto sk = drive_skims(g, inst.profile, inst.departure);
  for (int a : g.zones())
    for (int b : g.zones()) {
      if (a == b) {
        EXPECT_EQ(sk.time(a, b), 0.0);
        continue;
      }
      const auto p = shortest_path(g, inst.profile, g.zone_centroid(a), g.zone_centroid(b), inst.departure,
                                   UnimodalMode::drive);
      EXPECT_EQ(sk.time(a, b), p.found ? p.predicted_total : kInf);
    }
}

TEST(Intermodal, TransfersBetweenLinesAtSharedStop) {
  // line 1 east along the bottom row, line 2 north up the right column
  auto r = grid_roadway(5, 5, 1000, 10);
  GtfsFeed f;
  for (int node : {0, 1, 2, 3, 4, 9, 14, 19, 24})
    f.stops.push_back({"S" + std::to_string(node), "", r.nodes[node].x, r.nodes[node].y + 30, -1, false, true});
  TransitPattern a, b;
  a.route_id = "E";
  a.stops = {0, 1, 2, 3, 4};
  a.trips.push_back({"e1", {1000, 1060, 1120, 1180, 1240}, {1000, 1060, 1120, 1180, 1240}});
  b.route_id = "N";
  b.stops = {4, 5, 6, 7, 8};
  b.trips.push_back({"n1", {1300, 1360, 1420, 1480, 1540}, {1300, 1360, 1420, 1480, 1540}});
  f.patterns = {a, b};
  NetworkParams np;
  np.walk_speed = 1.0;
  np.max_access_walk = 120.0;
  const auto g = make_graph(r, f, np);
  const auto plan = intermodal_path(g, TravelTimeProfile(g), 0, 24, 900, AccessMode::walk);
  ASSERT_TRUE(plan.found);
  EXPECT_EQ(plan.boardings(), 2);
  EXPECT_DOUBLE_EQ(plan.departure + plan.predicted_total, 1570.0);
  EXPECT_EQ(time_expanded_intermodal(g, TravelTimeProfile(g), 0, 24, 900, AccessMode::walk, 3), 1570.0);
  EXPECT_EQ(plan_problems(g, plan, {}), "");
}
