#include <gtest/gtest.h>

#include <optional>

#include "physics_checks.hpp"
#include "router_oracle.hpp"
#include "support.hpp"
#include "transitsim/simcore.hpp"

using namespace transitsim;
using namespace tstest;

namespace {

MultimodalGraph single_link(double length, double ffs) {
  RoadwayData r;
  r.nodes = {{1, 0, 0, 1}, {2, length, 0, 1}};
  r.links = {make_link(1, 0, 1, length, ffs)};
  return make_graph(r);
}

Activity activity(long long id, Seconds start, Seconds dur, Seconds min_dur, Seconds latest_end,
                  bool mandatory = false) {
  Activity a;
  a.id = id;
  a.type = mandatory ? ActivityType::work : ActivityType::leisure;
  a.planned_start = start;
  a.planned_duration = dur;
  a.min_duration = min_dur;
  a.latest_end = latest_end;
  a.mandatory = mandatory;
  return a;
}

}  // namespace

TEST(Traffic, CflViolationIsConfigError) {
  const auto g = single_link(300, 30);
  SimParams p;
  EXPECT_NO_THROW(validate_sim_params(g, p));
  p.dt = 1.3;  // 7.5 m / 6 m/s = 1.25 s
  EXPECT_THROW(validate_sim_params(g, p), ConfigError);
}

TEST(Traffic, SingleVehicleExitsAfterTenSteps) {
  const auto g = single_link(300, 30);
  TrafficSim sim(g, SimParams{});
  sim.add_vehicle(VehicleClass::car, {0}, 0.0, 0);
  std::vector<TrafficEvent> ev;
  int steps = 0;
  while (!sim.idle() && steps < 100) {
    sim.step(steps, ev);
    ++steps;
  }
  EXPECT_EQ(steps, 10);
  ASSERT_EQ(ev.back().kind, TrafficEventKind::arrived);
  EXPECT_DOUBLE_EQ(ev.back().time, 10.0);
  EXPECT_DOUBLE_EQ(sim.vehicle(0).arrival, 10.0);
}

TEST(Traffic, FollowerAtJamSpacingWaitsForLeader) {
  const auto g = single_link(1000, 30);
  TrafficSim sim(g, SimParams{});
  sim.place_vehicle(VehicleClass::car, {0}, 500.0, 0.0);
  sim.place_vehicle(VehicleClass::car, {0}, 492.5, 0.0);
  std::vector<TrafficEvent> ev;
  sim.step(0, ev);
  EXPECT_DOUBLE_EQ(sim.vehicle(0).speed, 30.0);
  EXPECT_DOUBLE_EQ(sim.vehicle(1).speed, 0.0);
  sim.step(1, ev);
  EXPECT_GT(sim.vehicle(1).speed, 0.0);
}

TEST(Traffic, GridlockedRingNeverMoves) {
  // two opposite 75 m links, each packed at jam spacing with cars circling
  RoadwayData r;
  r.nodes = {{1, 0, 0, 1}, {2, 75, 0, 1}};
  r.links = {make_link(1, 0, 1, 75, 15), make_link(2, 1, 0, 75, 15)};
  const auto g = make_graph(r);
  TrafficSim sim(g, SimParams{});
  for (int l = 0; l < 2; ++l)
    for (int i = 0; i < 11; ++i) {
      std::vector<int> route;
      for (int k = 0; k < 8; ++k) route.push_back((l + k) % 2);
      sim.place_vehicle(VehicleClass::car, route, 75.0 - 7.5 * i, 0.0);
    }
  std::vector<TrafficEvent> ev;
  for (int k = 0; k < 200; ++k) {
    sim.step(k, ev);
    sim.check_invariants();
    for (std::size_t v = 0; v < sim.vehicle_count(); ++v) ASSERT_EQ(sim.vehicle(static_cast<int>(v)).speed, 0.0);
  }
  EXPECT_TRUE(ev.empty());
  EXPECT_FALSE(sim.moved_last_step());
}

TEST(Traffic, BlockedLeaderHoldsAtLinkEnd) {
  // links 2 and 3 form a gridlocked ring, so link 1 has nowhere to discharge
  RoadwayData r;
  r.nodes = {{1, 0, 0, 1}, {2, 300, 0, 1}, {3, 375, 0, 1}};
  r.links = {make_link(1, 0, 1, 300, 30), make_link(2, 1, 2, 75, 15), make_link(3, 2, 1, 75, 15)};
  const auto g = make_graph(r);
  TrafficSim sim(g, SimParams{});
  for (int l = 1; l <= 2; ++l)
    for (int i = 0; i < 11; ++i) {
      std::vector<int> route;
      for (int k = 0; k < 8; ++k) route.push_back(1 + (l - 1 + k) % 2);
      sim.place_vehicle(VehicleClass::car, route, 75.0 - 7.5 * i, 0.0);
    }
  const int car = sim.add_vehicle(VehicleClass::car, {0, 1}, 0.0, 0);
  std::vector<TrafficEvent> ev;
  for (int k = 0; k < 100; ++k) {
    sim.step(k, ev);
    sim.check_invariants();
  }
  EXPECT_EQ(sim.vehicle(car).link, 0);
  EXPECT_DOUBLE_EQ(sim.vehicle(car).position, 300.0);
  EXPECT_DOUBLE_EQ(sim.vehicle(car).speed, 0.0);
}

TEST(Traffic, RiemannDischargeMatchesWaveSpeed) {
  const auto r = riemann_discharge();
  EXPECT_NEAR(r.wave_speed, r.analytic, 0.05 * r.analytic) << "measured " << r.wave_speed;
  for (std::size_t i = 1; i < r.release_step.size(); ++i) EXPECT_GT(r.release_step[i], r.release_step[i - 1]);
}

TEST(Traffic, ConservationAndNoOvertakingOver10kVehicles) {
  const auto r = conservation_day(10000);
  EXPECT_EQ(r.violation, "");
  EXPECT_EQ(r.arrived, r.vehicles);
}

TEST(Traffic, MultiLaneLinkStoresMore) {
  // the same queue on a 2-lane link packs at half the per-vehicle spacing
  RoadwayData r;
  r.nodes = {{1, 0, 0, 1}, {2, 100, 0, 1}};
  r.links = {make_link(1, 0, 1, 100, 10, 2)};
  const auto g = make_graph(r);
  TrafficSim sim(g, SimParams{});
  sim.place_vehicle(VehicleClass::car, {0}, 50.0, 0.0);
  sim.place_vehicle(VehicleClass::car, {0}, 46.25, 0.0);
  std::vector<TrafficEvent> ev;
  sim.step(0, ev);
  EXPECT_DOUBLE_EQ(sim.vehicle(1).speed, 0.0);
}

TEST(Transit, CapacityLimitsBoarding) {
  TransitVehicleState v;
  v.seat_capacity = 4;
  v.crush_capacity = 10;
  for (int i = 0; i < 7; ++i) v.onboard.push_back({100 + i, 5, i < 4});
  v.seated = 4;
  v.standing = 3;
  std::deque<WaitingPassenger> q;
  for (int i = 0; i < 5; ++i) q.push_back({i, 3, 0.0});
  const auto s = serve_stop(v, 1, q, DwellParams{});
  EXPECT_EQ(s.boarded, (std::vector<int>{0, 1, 2}));
  ASSERT_EQ(q.size(), 2u);
  EXPECT_EQ(q.front().passenger, 3);
  EXPECT_EQ(v.onboard.size(), 10u);
  EXPECT_EQ(v.standing, 6);
  EXPECT_DOUBLE_EQ(s.dwell, 20.0);
}

TEST(Transit, EmptyStopDwellsMinimum) {
  TransitVehicleState v;
  std::deque<WaitingPassenger> q;
  DwellParams p;
  p.min_dwell = 17.0;
  const auto s = serve_stop(v, 0, q, p);
  EXPECT_TRUE(s.boarded.empty());
  EXPECT_TRUE(s.alighted.empty());
  EXPECT_DOUBLE_EQ(s.dwell, 17.0);
}

TEST(Transit, StandeesTakeFreedSeats) {
  TransitVehicleState v;
  v.seat_capacity = 2;
  v.crush_capacity = 4;
  v.onboard = {{1, 1, true}, {2, 1, true}, {3, 2, false}, {4, 2, false}};
  v.seated = 2;
  v.standing = 2;
  std::deque<WaitingPassenger> q{{5, 3, 0.0}};
  const auto s = serve_stop(v, 1, q, DwellParams{});
  EXPECT_EQ(s.alighted, (std::vector<int>{1, 2}));
  EXPECT_EQ(v.seated, 2);
  EXPECT_EQ(v.standing, 1);
  EXPECT_DOUBLE_EQ(s.dwell, std::max(20.0, 3.0 + 2.0 * 2));
}

TEST(Transit, RandomStreamsMatchQueueOracle) {
  for (int trial = 0; trial < 500; ++trial) {
    Rng r(stream_seed(55, 2, static_cast<std::uint64_t>(trial)));
    const int stops = 3 + static_cast<int>(r.below(6));
    const int buses = 1 + static_cast<int>(r.below(5));
    const int seat = static_cast<int>(r.below(6)), crush = seat + 1 + static_cast<int>(r.below(8));
    const double headway = 300.0;
    struct Pax {
      int id, from, to;
      double t;
    };
    std::vector<Pax> pax;
    const int n = static_cast<int>(r.below(60));
    for (int i = 0; i < n; ++i) {
      const int from = static_cast<int>(r.below(stops - 1));
      const int to = from + 1 + static_cast<int>(r.below(stops - 1 - from));
      pax.push_back({i, from, to, std::floor(r.uniform(0.0, buses * headway + stops * 60.0))});
    }
    std::stable_sort(pax.begin(), pax.end(), [](const Pax& a, const Pax& b) { return a.t < b.t; });

    // system under test
    std::vector<std::deque<WaitingPassenger>> queue(stops);
    std::vector<std::size_t> next_arrival(stops, 0);
    std::vector<std::vector<int>> got_board, got_alight;
    // oracle state
    std::vector<char> boarded(pax.size(), 0);
    std::vector<std::vector<int>> want_board, want_alight;
    for (int b = 0; b < buses; ++b) {
      TransitVehicleState v;
      v.seat_capacity = seat;
      v.crush_capacity = crush;
      std::vector<std::pair<int, int>> load;  // oracle: (passenger, destination) in boarding order
      for (int s = 0; s < stops; ++s) {
        const double now = b * headway + s * 60.0;
        for (std::size_t i = 0; i < pax.size(); ++i)
          if (pax[i].from == s && pax[i].t <= now && i >= next_arrival[s]) {
            queue[s].push_back({pax[i].id, pax[i].to, pax[i].t});
            next_arrival[s] = i + 1;
          }
        const auto res = serve_stop(v, s, queue[s], DwellParams{});
        got_board.push_back(res.boarded);
        got_alight.push_back(res.alighted);
        ASSERT_LE(static_cast<int>(v.onboard.size()), crush);
        ASSERT_EQ(v.seated, std::min<int>(seat, static_cast<int>(v.onboard.size())));
        ASSERT_EQ(v.seated + v.standing, static_cast<int>(v.onboard.size()));

        std::vector<int> off, on;
        std::vector<std::pair<int, int>> keep;
        for (const auto& [id, to] : load) (to == s ? off.push_back(id) : keep.push_back({id, to}));
        load = keep;
        for (std::size_t i = 0; i < pax.size() && static_cast<int>(load.size()) < crush; ++i) {
          if (boarded[i] || pax[i].from != s || pax[i].t > now) continue;
          boarded[i] = 1;
          load.push_back({pax[i].id, pax[i].to});
          on.push_back(pax[i].id);
        }
        want_board.push_back(on);
        want_alight.push_back(off);
      }
    }
    ASSERT_EQ(got_board, want_board) << "trial " << trial;
    ASSERT_EQ(got_alight, want_alight) << "trial " << trial;
  }
}

TEST(Activities, LateFlexibleIsShortened) {
  const auto a = activity(1, 10 * 3600, 3600, 1800, 10 * 3600 + 3600);
  const auto o = arrive_at_activity(a, 10 * 3600 + 600, SimParams{});
  EXPECT_EQ(o.status, OutcomeStatus::shortened);
  EXPECT_DOUBLE_EQ(o.realized_duration, 3000.0);
}

TEST(Activities, TooLateIsCancelled) {
  const auto a = activity(1, 10 * 3600, 3600, 1800, 10 * 3600 + 3600);
  const auto o = arrive_at_activity(a, 10 * 3600 + 2400, SimParams{});
  EXPECT_EQ(o.status, OutcomeStatus::cancelled);
  EXPECT_EQ(o.reason, CancelReason::too_late);
  EXPECT_TRUE(activity_infeasible(a, 10 * 3600 + 2400));
}

TEST(Activities, MandatoryStartsLateAndCompresses) {
  const auto a = activity(1, 9 * 3600, 8 * 3600, 4 * 3600, 17 * 3600 + 1800, true);
  const auto o = arrive_at_activity(a, 14 * 3600, SimParams{});
  EXPECT_EQ(o.status, OutcomeStatus::shortened);
  EXPECT_DOUBLE_EQ(o.realized_start, 14 * 3600);
  EXPECT_DOUBLE_EQ(o.realized_duration, 4 * 3600);
  EXPECT_FALSE(activity_infeasible(a, 20 * 3600));
}

TEST(Activities, PostponedKeepsDuration) {
  const auto a = activity(1, 10 * 3600, 3600, 1800, 13 * 3600);
  const auto o = arrive_at_activity(a, 10 * 3600 + 900, SimParams{});
  EXPECT_EQ(o.status, OutcomeStatus::postponed);
  EXPECT_DOUBLE_EQ(o.realized_duration, 3600.0);
  const auto early = arrive_at_activity(a, 9 * 3600, SimParams{});
  EXPECT_EQ(early.status, OutcomeStatus::completed);
  EXPECT_DOUBLE_EQ(early.realized_start, 10 * 3600);
}

TEST(Activities, CancellingMiddleActivityFreesTheNext) {
  // #2 is across town and cannot fit; from #1, #3 is next door and on time.
  std::vector<Activity> acts{activity(1, 9 * 3600, 3600, 1800, 11 * 3600),
                             activity(2, 10 * 3600 + 600, 3600, 3000, 11 * 3600 + 1200),
                             activity(3, 11 * 3600, 3600, 1800, 12 * 3600 + 1800)};
  const TravelFn travel = [](int from, int to, Seconds t) -> std::optional<Seconds> {
    if (to == 1) return t + 3600;  // far away
    if (from == 0 && to == 2) return t + 300;
    return t + 600;
  };
  const auto out = execute_chain(acts, travel, [](int) { return 600.0; }, SimParams{});
  ASSERT_EQ(out.size(), 3u);
  EXPECT_EQ(out[0].status, OutcomeStatus::completed);
  EXPECT_EQ(out[1].status, OutcomeStatus::cancelled);
  EXPECT_EQ(out[1].reason, CancelReason::too_late);
  EXPECT_EQ(out[2].status, OutcomeStatus::completed);
}

namespace {

// Every keep/cancel pattern over the chain is tried; a pattern is consistent
// when each kept activity is reachable and fits, and each dropped one is
// unreachable or cannot fit, given where the person actually is.
std::vector<ActivityOutcome> chain_oracle(const std::vector<Activity>& acts, const TravelFn& travel,
                                          const std::function<Seconds(int)>& lead, const SimParams& p) {
  const int n = static_cast<int>(acts.size());
  std::vector<std::vector<ActivityOutcome>> consistent;
  for (int mask = 0; mask < (1 << n); ++mask) {
    std::vector<ActivityOutcome> out;
    int loc = -1;
    Seconds free_at = 0;
    bool ok = true;
    for (int i = 0; i < n && ok; ++i) {
      const auto& a = acts[i];
      const auto arr = travel(loc, i, std::max(free_at, a.planned_start - lead(i)));
      const bool keep = mask >> i & 1;
      ActivityOutcome o;
      o.activity = a.id;
      o.type = a.type;
      if (!keep) {
        if (arr && (a.mandatory || std::max(*arr, a.planned_start) + a.min_duration <= a.latest_end)) ok = false;
        o.status = OutcomeStatus::cancelled;
        o.reason = !arr ? CancelReason::untravelable
                   : (i > 0 && !(mask >> (i - 1) & 1)) ? CancelReason::cascade
                                                       : CancelReason::too_late;
        out.push_back(o);
        continue;
      }
      if (!arr) {
        ok = false;
        break;
      }
      const Seconds start = std::max(*arr, a.planned_start);
      Seconds dur;
      if (a.mandatory) {
        dur = std::clamp(a.latest_end - start, a.min_duration, a.planned_duration);
        if (a.min_duration > a.planned_duration) dur = a.min_duration;
      } else {
        if (start + a.min_duration > a.latest_end) {
          ok = false;
          break;
        }
        dur = std::min(a.planned_duration, a.latest_end - start);
      }
      o.realized_start = start;
      o.realized_duration = dur;
      o.status = dur < a.planned_duration                       ? OutcomeStatus::shortened
                 : start > a.planned_start + p.postpone_tolerance ? OutcomeStatus::postponed
                                                                  : OutcomeStatus::completed;
      out.push_back(o);
      loc = i;
      free_at = start + dur;
    }
    if (ok) consistent.push_back(out);
  }
  if (consistent.size() != 1) throw std::logic_error("chain oracle: " + std::to_string(consistent.size()) + " consistent patterns");
  return consistent.front();
}

}  // namespace

TEST(Activities, RandomThreeChainsMatchExhaustiveOracle) {
  int cancelled = 0, cascades = 0, shortened = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    Rng r(stream_seed(8, 4, static_cast<std::uint64_t>(trial)));
    std::vector<Activity> acts;
    Seconds clock = 7 * 3600 + std::floor(r.uniform(0, 3600));
    for (int i = 0; i < 3; ++i) {
      const Seconds dur = 600 * (1 + static_cast<int>(r.below(18)));
      const Seconds min_dur = std::floor(dur * r.uniform(0.3, 1.0));
      const Seconds slack = 300 * static_cast<double>(r.below(8));
      acts.push_back(activity(i + 1, clock, dur, min_dur, clock + dur + slack, r.uniform() < 0.25));
      clock += dur + 300 * static_cast<double>(r.below(8));
    }
    std::array<std::array<std::optional<Seconds>, 3>, 4> tt;
    for (auto& row : tt)
      for (auto& c : row) c = r.uniform() < 0.1 ? std::nullopt : std::optional<Seconds>(60.0 * (1 + r.below(90)));
    std::array<Seconds, 3> leads{};
    for (auto& l : leads) l = 60.0 * static_cast<double>(r.below(60));
    const TravelFn travel = [&](int from, int to, Seconds t) -> std::optional<Seconds> {
      const auto c = tt[from + 1][to];
      return c ? std::optional<Seconds>(t + *c) : std::nullopt;
    };
    const auto lead = [&](int i) { return leads[i]; };
    const SimParams p;
    const auto got = execute_chain(acts, travel, lead, p);
    const auto want = chain_oracle(acts, travel, lead, p);
    ASSERT_EQ(got.size(), want.size());
    for (int i = 0; i < 3; ++i) {
      ASSERT_EQ(got[i].status, want[i].status) << "trial " << trial << " activity " << i;
      ASSERT_EQ(got[i].reason, want[i].reason) << "trial " << trial << " activity " << i;
      if (got[i].status != OutcomeStatus::cancelled) {
        ASSERT_DOUBLE_EQ(got[i].realized_start, want[i].realized_start);
        ASSERT_DOUBLE_EQ(got[i].realized_duration, want[i].realized_duration);
      }
      cancelled += got[i].status == OutcomeStatus::cancelled;
      cascades += got[i].reason == CancelReason::cascade;
      shortened += got[i].status == OutcomeStatus::shortened;
    }
  }
  EXPECT_GT(cancelled, 100);
  EXPECT_GT(cascades, 10);
  EXPECT_GT(shortened, 100);
}

TEST(Day, EmptyDemand) {
  const auto g = make_graph(grid_roadway(3, 3, 200, 10));
  const auto res = run_day(g, TravelTimeProfile(g), {}, SimParams{});
  EXPECT_TRUE(res.outcomes.empty());
  EXPECT_TRUE(res.trips.empty());
  EXPECT_EQ(res.vehicle_hours, 0.0);
  EXPECT_EQ(res.person_hours, 0.0);
}

TEST(Day, FreeFlowCarTripTakesPredictedTime) {
  const auto g = make_graph(grid_roadway(5, 5, 300, 15));
  AgentDay ag;
  ag.person = 0;
  ag.home_node = 0;
  ag.car = true;
  auto a = activity(7, 9 * 3600, 3600, 1800, 12 * 3600);
  ag.activities = {a};
  ag.nodes = {24};
  ag.modes = {TravelMode::drive, TravelMode::drive};
  ag.expected_time = {160.0, 160.0};
  const auto res = run_day(g, TravelTimeProfile(g), {ag}, SimParams{});
  ASSERT_EQ(res.trips.size(), 2u);
  for (const auto& t : res.trips) {
    ASSERT_TRUE(t.completed());
    EXPECT_DOUBLE_EQ(t.arrival - t.departure, t.predicted);
    EXPECT_DOUBLE_EQ(t.predicted, 8 * 300 / 15.0);
  }
  ASSERT_EQ(res.outcomes.size(), 1u);
  EXPECT_EQ(res.outcomes[0].status, OutcomeStatus::completed);
  EXPECT_NEAR(res.vehicle_hours, 2 * 160.0 / 3600.0, 1e-9);
}

namespace {

std::vector<AgentDay> random_agents(const MultimodalGraph& g, int n, std::uint64_t seed) {
  Rng r(seed);
  std::vector<AgentDay> out;
  const int nodes = static_cast<int>(g.nodes().size());
  long long id = 0;
  for (int i = 0; i < n; ++i) {
    AgentDay ag;
    ag.person = i;
    ag.household = i;
    ag.home_node = static_cast<int>(r.below(nodes));
    ag.car = r.uniform() < 0.6;
    Seconds clock = 7 * 3600 + std::floor(r.uniform(0, 7200));
    const int k = 1 + static_cast<int>(r.below(3));
    for (int j = 0; j < k; ++j) {
      const Seconds dur = 900 * (1 + static_cast<double>(r.below(8)));
      auto a = activity(id++, clock, dur, dur / 2, clock + dur + 900 * static_cast<double>(r.below(3)),
                        j == 0 && r.uniform() < 0.4);
      a.person = i;
      ag.activities.push_back(a);
      ag.nodes.push_back(static_cast<int>(r.below(nodes)));
      clock += dur + 1200;
    }
    for (int j = 0; j <= k; ++j) {
      const int m = static_cast<int>(r.below(kTravelModes + 1));
      ag.modes.push_back(m == kTravelModes ? std::nullopt : std::optional<TravelMode>(static_cast<TravelMode>(m)));
      ag.expected_time.push_back(600.0);
    }
    out.push_back(ag);
  }
  return out;
}

}  // namespace

TEST(Day, EveryActivityGetsOneConsistentOutcome) {
  const auto inst = random_intermodal_instance(21);
  const auto agents = random_agents(inst.g, 300, 5);
  SimParams p;
  p.check_invariants = true;
  const auto res = run_day(inst.g, inst.profile, agents, p);
  std::size_t planned = 0;
  for (const auto& ag : agents) planned += ag.activities.size();
  ASSERT_EQ(res.outcomes.size(), planned);
  std::size_t k = 0;
  for (const auto& ag : agents)
    for (const auto& a : ag.activities) {
      const auto& o = res.outcomes[k++];
      ASSERT_EQ(o.activity, a.id);
      switch (o.status) {
        case OutcomeStatus::completed:
        case OutcomeStatus::postponed: EXPECT_DOUBLE_EQ(o.realized_duration, a.planned_duration); break;
        case OutcomeStatus::shortened:
          EXPECT_GE(o.realized_duration, a.min_duration);
          EXPECT_LT(o.realized_duration, a.planned_duration);
          break;
        case OutcomeStatus::cancelled: EXPECT_NE(o.reason, CancelReason::none); break;
      }
      if (a.mandatory && o.status == OutcomeStatus::cancelled) {
        EXPECT_EQ(o.reason, CancelReason::untravelable);
      }
    }
  int crush = 0;
  for (const auto& pat : inst.g.patterns()) crush = std::max(crush, pat.crush_capacity);
  EXPECT_LE(res.max_onboard, crush);
  long long boards = 0, alights = 0;
  for (const auto& b : res.boardings) {
    boards += b.boardings;
    alights += b.alightings;
  }
  EXPECT_EQ(boards, alights);
}

TEST(Day, WorkerCountDoesNotChangeResults) {
  const auto inst = random_intermodal_instance(22);
  const auto agents = random_agents(inst.g, 300, 6);
  SimParams p1, p3;
  p3.workers = 3;
  const auto a = run_day(inst.g, inst.profile, agents, p1);
  const auto b = run_day(inst.g, inst.profile, agents, p3);
  ASSERT_EQ(a.outcomes.size(), b.outcomes.size());
  for (std::size_t i = 0; i < a.outcomes.size(); ++i) {
    EXPECT_EQ(a.outcomes[i].status, b.outcomes[i].status);
    EXPECT_EQ(a.outcomes[i].realized_start, b.outcomes[i].realized_start);
  }
  ASSERT_EQ(a.trips.size(), b.trips.size());
  for (std::size_t i = 0; i < a.trips.size(); ++i) EXPECT_EQ(a.trips[i].arrival, b.trips[i].arrival);
  EXPECT_EQ(a.vehicle_hours, b.vehicle_hours);
}
