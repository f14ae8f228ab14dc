#include <algorithm>
#include <cmath>
#include <ostream>
#include <queue>
#include <sstream>

#include "transitsim/csv.hpp"
#include "transitsim/simcore.hpp"

namespace transitsim {

namespace {

// Recent observed car times where fresh, the historical profile elsewhere.
class PrevailingTimes final : public LinkTimeSource {
 public:
  PrevailingTimes(const TravelTimeProfile& hist, const TrafficSim& traffic)
      : hist_(hist), traffic_(traffic) {}
  void set_now(Seconds now) { now_ = now; }
  Seconds exit_time(int link, Seconds t) const override {
    if (traffic_.recent_exit(link) > now_ - kBinSeconds)
      return t + std::max(hist_.free_flow_time(link), traffic_.recent_time(link));
    return hist_.exit_time(link, t);
  }

 private:
  const TravelTimeProfile& hist_;
  const TrafficSim& traffic_;
  Seconds now_ = 0;
};

enum class EvKind : std::uint8_t { depart, segment_done, transit_arrive, transit_depart, wait_timeout };

struct Event {
  Seconds time;
  std::uint64_t seq;
  EvKind kind;
  int a;
  int b;
  int c;
  bool operator>(const Event& o) const {
    if (time != o.time) return time > o.time;
    return seq > o.seq;
  }
};

struct Segment {
  enum Kind : std::uint8_t { timed, drive, ride } kind = timed;
  Seconds duration = 0;
  std::vector<int> links;
  int pattern = -1;
  int from_pos = -1;
  int to_pos = -1;
};

struct AgentRuntime {
  int next = 0;  // activity index being travelled to; == size means home
  int node = 0;
  bool prev_cancelled = false;
  bool done = false;
  int trip = -1;  // index into trips
  std::vector<Segment> segments;
  std::size_t seg = 0;
  int vehicle = -1;
  Seconds drive_start = 0;
  std::vector<double> cum_pred;  // predicted elapsed at entry of each route link
  bool waiting = false;
  int wait_token = 0;
  std::vector<ActivityOutcome> outcomes;
};

struct TransitRun {
  int pattern = 0;
  int trip = 0;
  int pos = 0;
  TransitVehicleState state;
};

class DaySim {
 public:
  DaySim(const MultimodalGraph& g, const TravelTimeProfile& profile,
         const std::vector<AgentDay>& agents, const SimParams& p, std::ostream* traj)
      : g_(g), hist_(profile), agents_(agents), p_(p), traj_(traj), traffic_(g, p),
        prevailing_(profile, traffic_) {}

  DayResult run();

 private:
  void push(Seconds t, EvKind k, int a, int b = 0, int c = 0) {
    events_.push({t, seq_++, k, a, b, c});
  }
  void dispatch(const Event& e);
  void process_events(Seconds limit) {
    while (!events_.empty() && events_.top().time < limit) {
      const Event e = events_.top();
      events_.pop();
      ++processed_;
      dispatch(e);
    }
  }

  bool mode_allowed(const AgentDay& ag, TravelMode m, int from, int to) const;
  TripPlan plan_trip(int agent, int target, TravelMode m, int from, int to, Seconds t) const;
  void schedule_next(int agent, Seconds now);
  void on_depart(int agent, Seconds t);
  void start_trip(int agent, const TripPlan& plan, TravelMode planned, bool switched, Seconds t);
  void start_segment(int agent, Seconds t);
  void finish_trip(int agent, Seconds t);
  void reach_activity(int agent, Seconds t);
  void cancel_current(int agent, CancelReason r, Seconds t);
  void on_traffic(const TrafficEvent& e);
  void reroute_check(int agent, const TrafficEvent& e);
  void on_transit_arrive(int run, int pos, Seconds t);
  void on_transit_depart(int run, int pos, Seconds t);
  void on_wait_timeout(int agent, int token, Seconds t);
  void write_trajectories(Seconds t);

  const MultimodalGraph& g_;
  const TravelTimeProfile& hist_;
  const std::vector<AgentDay>& agents_;
  const SimParams& p_;
  std::ostream* traj_;
  TrafficSim traffic_;
  PrevailingTimes prevailing_;
  std::priority_queue<Event, std::vector<Event>, std::greater<>> events_;
  std::uint64_t seq_ = 0;
  std::uint64_t processed_ = 0;
  Seconds now_ = 0;

  std::vector<AgentRuntime> rt_;
  std::vector<TransitRun> runs_;
  std::vector<std::vector<std::vector<int>>> bus_paths_;  // pattern, position -> links
  std::vector<std::vector<std::deque<WaitingPassenger>>> queues_;
  std::vector<std::vector<std::vector<int>>> dwelling_;
  std::vector<std::vector<StopBoardings>> stop_stats_;
  DayResult out_;
};

bool DaySim::mode_allowed(const AgentDay& ag, TravelMode m, int from, int to) const {
  const double d = g_.straight_distance(from, to);
  switch (m) {
    case TravelMode::drive: return ag.car;
    case TravelMode::drive_to_transit: return ag.car && g_.has_transit();
    case TravelMode::walk_to_transit: return g_.has_transit();
    case TravelMode::walk: return d <= p_.mode.walk_max_distance;
    case TravelMode::bike: return d <= p_.mode.bike_max_distance;
  }
  return false;
}

TripPlan DaySim::plan_trip(int agent, int target, TravelMode m, int from, int to, Seconds t) const {
  const auto& rp = p_.los.router;
  switch (m) {
    case TravelMode::drive: {
      const auto& ag = agents_[agent];
      if (target < static_cast<int>(ag.prior_routes.size()) && !ag.prior_routes[target].empty()) {
        const auto& route = ag.prior_routes[target];
        const auto& links = g_.links();
        bool ok = links[route.front()].from == from && links[route.back()].to == to;
        for (std::size_t i = 0; ok && i < route.size(); ++i) {
          ok = links[route[i]].allows(kAuto) && (i == 0 || links[route[i - 1]].to == links[route[i]].from);
        }
        if (ok) {
          TripPlan plan;
          plan.found = true;
          plan.mode = TravelMode::drive;
          plan.departure = t;
          Seconds clock = t;
          for (int l : route) {
            const Seconds next = hist_.exit_time(l, clock);
            Leg leg;
            leg.kind = LegKind::drive;
            leg.ref = l;
            leg.start = clock;
            leg.duration = next - clock;
            plan.legs.push_back(leg);
            plan.predicted_total += leg.duration;
            plan.distance += links[l].length;
            clock = next;
          }
          plan.generalized_cost = generalized_cost(plan.legs, rp);
          return plan;
        }
      }
      return shortest_path(g_, hist_, from, to, t, UnimodalMode::drive, rp);
    }
    case TravelMode::walk: return shortest_path(g_, hist_, from, to, t, UnimodalMode::walk, rp);
    case TravelMode::bike: return shortest_path(g_, hist_, from, to, t, UnimodalMode::bike, rp);
    case TravelMode::walk_to_transit:
      return intermodal_path(g_, hist_, from, to, t, AccessMode::walk, rp);
    case TravelMode::drive_to_transit:
      return intermodal_path(g_, hist_, from, to, t, AccessMode::drive, rp);
  }
  return {};
}

void DaySim::schedule_next(int agent, Seconds now) {
  const auto& ag = agents_[agent];
  auto& r = rt_[agent];
  const int n = static_cast<int>(ag.activities.size());
  if (r.next < n) {
    const auto& a = ag.activities[r.next];
    const Seconds lead = r.next < static_cast<int>(ag.expected_time.size()) ? ag.expected_time[r.next] : 0.0;
    push(std::max(now, a.planned_start - lead), EvKind::depart, agent);
  } else if (r.next == n && r.node != ag.home_node) {
    push(now, EvKind::depart, agent);
  } else {
    r.done = true;
  }
}

void DaySim::cancel_current(int agent, CancelReason reason, Seconds t) {
  const auto& ag = agents_[agent];
  auto& r = rt_[agent];
  const auto& a = ag.activities[r.next];
  ActivityOutcome o;
  o.activity = a.id;
  o.person = a.person;
  o.type = a.type;
  o.zone = a.zone;
  o.status = OutcomeStatus::cancelled;
  o.reason = reason;
  r.outcomes.push_back(o);
  r.prev_cancelled = true;
  ++r.next;
  schedule_next(agent, t);
}

void DaySim::on_depart(int agent, Seconds t) {
  const auto& ag = agents_[agent];
  auto& r = rt_[agent];
  const int n = static_cast<int>(ag.activities.size());
  const int target = r.next;
  const bool home = target >= n;
  const int dest = home ? ag.home_node : ag.nodes[target];
  if (r.node == dest) {
    if (home) {
      r.done = true;
    } else {
      reach_activity(agent, t);
    }
    return;
  }
  const auto planned = target < static_cast<int>(ag.modes.size()) ? ag.modes[target] : std::nullopt;
  TripPlan plan;
  TravelMode mode = planned.value_or(TravelMode::walk);
  if (planned) plan = plan_trip(agent, target, *planned, r.node, dest, t);
  const Seconds due = home ? kInf : ag.activities[target].planned_start + p_.late_tolerance;
  bool switched = false;
  if (planned && (!plan.found || t + plan.predicted_total > due)) {
    // Pre-departure check: take the earliest-arriving feasible mode.
    for (int mi = 0; mi < kTravelModes; ++mi) {
      const auto m = static_cast<TravelMode>(mi);
      if (m == *planned || !mode_allowed(ag, m, r.node, dest)) continue;
      TripPlan alt = plan_trip(agent, target, m, r.node, dest, t);
      if (alt.found && (!plan.found || alt.predicted_total < plan.predicted_total - 1e-9)) {
        plan = std::move(alt);
        mode = m;
        switched = true;
      }
    }
  }
  if (!planned || !plan.found) {
    if (home) {
      r.done = true;  // stays put; the trip home is not an outcome
      return;
    }
    cancel_current(agent, CancelReason::untravelable, t);
    return;
  }
  if (!home && activity_infeasible(ag.activities[target], t + plan.predicted_total)) {
    cancel_current(agent, r.prev_cancelled ? CancelReason::cascade : CancelReason::too_late, t);
    return;
  }
  plan.mode = mode;
  start_trip(agent, plan, planned.value_or(mode), switched, t);
}

void DaySim::start_trip(int agent, const TripPlan& plan, TravelMode planned, bool switched, Seconds t) {
  const auto& ag = agents_[agent];
  auto& r = rt_[agent];
  const int n = static_cast<int>(ag.activities.size());
  TripRecord rec;
  rec.person = ag.person;
  rec.trip = r.next;
  rec.activity = r.next < n ? ag.activities[r.next].id : -1;
  rec.planned_mode = planned;
  rec.mode = plan.mode;
  rec.origin_node = r.node;
  rec.dest_node = r.next < n ? ag.nodes[r.next] : ag.home_node;
  rec.departure = t;
  rec.predicted = plan.predicted_total;
  rec.distance = plan.distance;
  rec.mode_switched = switched;
  r.trip = static_cast<int>(out_.trips.size());
  out_.trips.push_back(std::move(rec));

  r.segments.clear();
  r.seg = 0;
  for (std::size_t i = 0; i < plan.legs.size(); ++i) {
    const Leg& leg = plan.legs[i];
    switch (leg.kind) {
      case LegKind::drive:
        if (r.segments.empty() || r.segments.back().kind != Segment::drive)
          r.segments.push_back({Segment::drive, 0, {}, -1, -1, -1});
        r.segments.back().links.push_back(leg.ref);
        break;
      case LegKind::walk:
      case LegKind::bike:
      case LegKind::park:
        if (r.segments.empty() || r.segments.back().kind != Segment::timed)
          r.segments.push_back({Segment::timed, 0, {}, -1, -1, -1});
        r.segments.back().duration += leg.duration;
        break;
      case LegKind::board:
        r.segments.push_back({Segment::ride, 0, {}, leg.ref, leg.from_pos, leg.to_pos});
        break;
      default: break;
    }
  }
  start_segment(agent, t);
}

void DaySim::start_segment(int agent, Seconds t) {
  auto& r = rt_[agent];
  if (r.seg >= r.segments.size()) {
    finish_trip(agent, t);
    return;
  }
  Segment& s = r.segments[r.seg];
  switch (s.kind) {
    case Segment::timed:
      push(t + s.duration, EvKind::segment_done, agent);
      break;
    case Segment::drive: {
      const auto& ag = agents_[agent];
      int occupants = 1;
      if (r.next < static_cast<int>(ag.activities.size()) && ag.activities[r.next].joint) occupants = 2;
      r.vehicle = traffic_.add_vehicle(VehicleClass::car, s.links, t, agent, occupants);
      r.drive_start = t;
      r.cum_pred.assign(s.links.size(), 0.0);
      Seconds clock = t;
      for (std::size_t i = 0; i < s.links.size(); ++i) {
        r.cum_pred[i] = clock - t;
        clock = hist_.exit_time(s.links[i], clock);
      }
      break;
    }
    case Segment::ride: {
      // Board a vehicle already dwelling here if it has room.
      for (int run : dwelling_[s.pattern][s.from_pos]) {
        auto& st = runs_[run].state;
        if (static_cast<int>(st.onboard.size()) < st.crush_capacity) {
          const bool seat = st.seated < st.seat_capacity;
          st.onboard.push_back({agent, s.to_pos, seat});
          if (seat)
            ++st.seated;
          else
            ++st.standing;
          ++stop_stats_[s.pattern][s.from_pos].boardings;
          ++out_.trips[r.trip].boardings;
          out_.max_onboard = std::max<long long>(out_.max_onboard, static_cast<long long>(st.onboard.size()));
          return;
        }
      }
      queues_[s.pattern][s.from_pos].push_back({agent, s.to_pos, t});
      r.waiting = true;
      ++r.wait_token;
      push(t + p_.max_wait, EvKind::wait_timeout, agent, r.wait_token);
      break;
    }
  }
}

void DaySim::finish_trip(int agent, Seconds t) {
  const auto& ag = agents_[agent];
  auto& r = rt_[agent];
  auto& rec = out_.trips[r.trip];
  rec.arrival = t;
  out_.person_hours += (t - rec.departure) / 3600.0;
  r.node = rec.dest_node;
  r.trip = -1;
  if (r.next < static_cast<int>(ag.activities.size()))
    reach_activity(agent, t);
  else
    r.done = true;
}

void DaySim::reach_activity(int agent, Seconds t) {
  const auto& ag = agents_[agent];
  auto& r = rt_[agent];
  const ActivityOutcome o = arrive_at_activity(ag.activities[r.next], t, p_);
  r.outcomes.push_back(o);
  ++r.next;
  if (o.status == OutcomeStatus::cancelled) {
    r.prev_cancelled = true;
    schedule_next(agent, t);
  } else {
    r.prev_cancelled = false;
    schedule_next(agent, o.realized_start + o.realized_duration);
  }
}

void DaySim::reroute_check(int agent, const TrafficEvent& e) {
  auto& r = rt_[agent];
  const auto& v = traffic_.vehicle(e.vehicle);
  const int idx = v.route_index;
  if (idx + 1 >= static_cast<int>(v.route.size())) return;
  const Seconds elapsed = e.time - r.drive_start;
  const Seconds pred = r.cum_pred[idx];
  if (!(elapsed > 0.0 && elapsed >= p_.reroute_factor * pred)) return;
  prevailing_.set_now(e.time);
  const int from = g_.links()[v.route[idx]].to;
  const int to = g_.links()[v.route.back()].to;
  const Seconds at_node = prevailing_.exit_time(v.route[idx], e.time);
  Seconds current = at_node;
  for (std::size_t i = idx + 1; i < v.route.size(); ++i) current = prevailing_.exit_time(v.route[i], current);
  const TripPlan best = shortest_path(g_, prevailing_, from, to, at_node, UnimodalMode::drive, p_.los.router);
  if (best.found && at_node + best.predicted_total < current - 1.0) {
    traffic_.replace_route_tail(e.vehicle, best.links());
    ++out_.trips[r.trip].reroutes;
  }
  // Re-anchor predictions on the prevailing estimate for the rest of the route.
  const auto& route = traffic_.vehicle(e.vehicle).route;
  r.cum_pred.resize(route.size());
  Seconds clock = e.time;
  for (std::size_t i = idx; i < route.size(); ++i) {
    r.cum_pred[i] = clock - r.drive_start;
    clock = prevailing_.exit_time(route[i], clock);
  }
}

void DaySim::on_traffic(const TrafficEvent& e) {
  const auto& v = traffic_.vehicle(e.vehicle);
  if (v.owner >= 0) {
    const int agent = v.owner;
    if (e.kind == TrafficEventKind::entered_link) {
      if (v.route_index > 0) reroute_check(agent, e);
      return;
    }
    auto& r = rt_[agent];
    auto& rec = out_.trips[r.trip];
    rec.links.insert(rec.links.end(), v.route.begin(), v.route.end());
    out_.vehicle_hours += (e.time - v.departure) / 3600.0;
    r.vehicle = -1;
    ++r.seg;
    start_segment(agent, e.time);
  } else if (e.kind == TrafficEventKind::arrived) {
    const int run = -2 - v.owner;
    out_.bus_hours += (e.time - v.departure) / 3600.0;
    push(e.time, EvKind::transit_arrive, run, runs_[run].pos + 1);
  }
}

void DaySim::on_transit_arrive(int run, int pos, Seconds t) {
  auto& tr = runs_[run];
  tr.pos = pos;
  const auto& pat = g_.patterns()[tr.pattern];
  const auto& trip = pat.trips[tr.trip];
  auto& queue = queues_[tr.pattern][pos];
  const DwellParams dp{p_.min_dwell, p_.board_seconds, p_.alight_seconds};
  const StopService s = serve_stop(tr.state, pos, queue, dp);
  auto& stats = stop_stats_[tr.pattern][pos];
  stats.alightings += static_cast<long long>(s.alighted.size());
  stats.boardings += static_cast<long long>(s.boarded.size());
  if (static_cast<int>(tr.state.onboard.size()) >= tr.state.crush_capacity)
    stats.denied += static_cast<long long>(queue.size());
  out_.max_onboard = std::max<long long>(out_.max_onboard, static_cast<long long>(tr.state.onboard.size()));
  for (int a : s.boarded) {
    auto& r = rt_[a];
    r.waiting = false;
    ++out_.trips[r.trip].boardings;
  }
  for (int a : s.alighted) {
    ++rt_[a].seg;
    start_segment(a, t);
  }
  if (pos + 1 >= static_cast<int>(pat.stops.size())) return;
  dwelling_[tr.pattern][pos].push_back(run);
  push(std::max(t + s.dwell, trip.departures[pos]), EvKind::transit_depart, run, pos);
}

void DaySim::on_transit_depart(int run, int pos, Seconds t) {
  auto& tr = runs_[run];
  auto& dw = dwelling_[tr.pattern][pos];
  dw.erase(std::remove(dw.begin(), dw.end(), run), dw.end());
  const auto& path = bus_paths_[tr.pattern][pos];
  if (!path.empty()) {
    traffic_.add_vehicle(VehicleClass::bus, path, t, -2 - run,
                         std::max<int>(1, static_cast<int>(tr.state.onboard.size())));
    return;
  }
  const auto& trip = g_.patterns()[tr.pattern].trips[tr.trip];
  const Seconds run_time = std::max(0.0, trip.arrivals[pos + 1] - trip.departures[pos]);
  push(t + run_time, EvKind::transit_arrive, run, pos + 1);
}

void DaySim::on_wait_timeout(int agent, int token, Seconds t) {
  auto& r = rt_[agent];
  if (!r.waiting || token != r.wait_token) return;
  const Segment& s = r.segments[r.seg];
  auto& q = queues_[s.pattern][s.from_pos];
  q.erase(std::remove_if(q.begin(), q.end(), [&](const WaitingPassenger& w) { return w.passenger == agent; }),
          q.end());
  r.waiting = false;
  auto& rec = out_.trips[r.trip];
  rec.gave_up = true;
  rec.mode = TravelMode::walk;
  ++out_.gave_up;
  // Walk the rest of the way from the stop.
  const auto& stop = g_.stops()[g_.patterns()[s.pattern].stops[s.from_pos]];
  Seconds walk = 0.0;
  for (int ai : g_.stop_access(g_.patterns()[s.pattern].stops[s.from_pos])) {
    if (g_.access_edges()[ai].kind == AccessKind::walk) {
      walk = g_.access_edges()[ai].distance / g_.params().walk_speed;
      break;
    }
  }
  const int node = stop.node;
  const TripPlan w = shortest_path(g_, hist_, node, rec.dest_node, t + walk, UnimodalMode::walk, p_.los.router);
  walk += w.found ? w.predicted_total : g_.straight_distance(node, rec.dest_node) / g_.params().walk_speed;
  r.segments.resize(r.seg);
  r.segments.push_back({Segment::timed, walk, {}, -1, -1, -1});
  start_segment(agent, t);
}

void DaySim::dispatch(const Event& e) {
  switch (e.kind) {
    case EvKind::depart: on_depart(e.a, e.time); break;
    case EvKind::segment_done:
      ++rt_[e.a].seg;
      start_segment(e.a, e.time);
      break;
    case EvKind::transit_arrive: on_transit_arrive(e.a, e.b, e.time); break;
    case EvKind::transit_depart: on_transit_depart(e.a, e.b, e.time); break;
    case EvKind::wait_timeout: on_wait_timeout(e.a, e.b, e.time); break;
  }
}

void DaySim::write_trajectories(Seconds t) {
  for (std::size_t vid = 0; vid < traffic_.vehicle_count(); ++vid) {
    const auto& v = traffic_.vehicle(static_cast<int>(vid));
    if (v.link < 0) continue;
    *traj_ << "{\"t\":" << csv::fmt_double(t) << ",\"vehicle\":" << v.id << ",\"class\":\""
           << (v.cls == VehicleClass::bus ? "bus" : "car") << "\",\"link\":" << g_.links()[v.link].id
           << ",\"pos\":" << csv::fmt_double(v.position) << ",\"speed\":" << csv::fmt_double(v.speed)
           << "}\n";
  }
}

DayResult DaySim::run() {
  const auto& patterns = g_.patterns();
  bus_paths_.resize(patterns.size());
  queues_.resize(patterns.size());
  dwelling_.resize(patterns.size());
  stop_stats_.resize(patterns.size());
  const TravelTimeProfile ff(g_);
  for (std::size_t pi = 0; pi < patterns.size(); ++pi) {
    const auto& pat = patterns[pi];
    const std::size_t ns = pat.stops.size();
    queues_[pi].resize(ns);
    dwelling_[pi].resize(ns);
    stop_stats_[pi].resize(ns);
    bus_paths_[pi].resize(ns);
    for (std::size_t k = 0; k < ns; ++k) {
      stop_stats_[pi][k].pattern = static_cast<int>(pi);
      stop_stats_[pi][k].position = static_cast<int>(k);
    }
    if (pat.mode == TransitMode::bus) {
      for (std::size_t k = 0; k + 1 < ns; ++k) {
        const int a = g_.stops()[pat.stops[k]].node;
        const int b = g_.stops()[pat.stops[k + 1]].node;
        if (a < 0 || b < 0 || a == b) continue;
        const TripPlan bp = shortest_path(g_, ff, a, b, 0.0, UnimodalMode::bus);
        if (bp.found) bus_paths_[pi][k] = bp.links();
      }
    }
    for (std::size_t ti = 0; ti < pat.trips.size(); ++ti) {
      TransitRun run;
      run.pattern = static_cast<int>(pi);
      run.trip = static_cast<int>(ti);
      run.state.pattern = run.pattern;
      run.state.trip = run.trip;
      run.state.seat_capacity = pat.seat_capacity;
      run.state.crush_capacity = pat.crush_capacity;
      runs_.push_back(std::move(run));
      push(pat.trips[ti].arrivals.front(), EvKind::transit_arrive, static_cast<int>(runs_.size()) - 1, 0);
    }
  }

  rt_.resize(agents_.size());
  for (std::size_t i = 0; i < agents_.size(); ++i) {
    rt_[i].node = agents_[i].home_node;
    schedule_next(static_cast<int>(i), 0.0);
  }

  out_.vehicles_in_network.assign(kBinsPerDay, 0.0);
  const double dt = p_.dt;
  Seconds t = 0.0;
  Seconds stalled = 0.0;
  int sampled_bin = -1;
  std::vector<TrafficEvent> tev;
  while (true) {
    if (traffic_.idle()) {
      if (events_.empty()) break;
      const Seconds next = events_.top().time;
      if (next >= p_.horizon) break;
      t = std::max(t, std::floor(next / dt) * dt);
    }
    if (t >= p_.horizon) break;
    now_ = t;
    const int bin = time_bin(t);
    if (t < kDaySeconds && bin != sampled_bin) {
      sampled_bin = bin;
      std::size_t cars = 0;
      for (std::size_t vid = 0; vid < traffic_.vehicle_count(); ++vid) {
        const auto& v = traffic_.vehicle(static_cast<int>(vid));
        if (v.link >= 0 && v.cls == VehicleClass::car) ++cars;
      }
      out_.vehicles_in_network[bin] = static_cast<double>(cars);
    }
    const std::uint64_t before = processed_;
    process_events(t + dt);
    tev.clear();
    traffic_.step(t, tev);
    for (const auto& e : tev) on_traffic(e);
    process_events(t + dt);
    if (p_.check_invariants) traffic_.check_invariants();
    if (traj_ && p_.record_trajectories &&
        std::fmod(t, p_.trajectory_interval) < dt * 0.5)
      write_trajectories(t);
    if (!traffic_.idle() && !traffic_.moved_last_step() && processed_ == before) {
      stalled += dt;
      if (stalled >= p_.deadlock_seconds) {
        std::ostringstream dump;
        dump << "traffic deadlock at t=" << format_hms(t) << " with " << traffic_.in_network()
             << " vehicles on links; stuck links:";
        int shown = 0;
        for (std::size_t l = 0; l < g_.links().size() && shown < 10; ++l) {
          if (!traffic_.vehicles_on(static_cast<int>(l)).empty()) {
            dump << ' ' << g_.links()[l].id << '(' << traffic_.vehicles_on(static_cast<int>(l)).size() << ')';
            ++shown;
          }
        }
        throw SimulationError(dump.str());
      }
    } else {
      stalled = 0.0;
    }
    t += dt;
    ++out_.steps;
  }

  traffic_.close_records(t);
  for (std::size_t vid = 0; vid < traffic_.vehicle_count(); ++vid) {
    const auto& v = traffic_.vehicle(static_cast<int>(vid));
    if (v.arrival < 0.0 && v.cls == VehicleClass::car) out_.vehicle_hours += (t - v.departure) / 3600.0;
  }
  out_.records = traffic_.records();
  out_.bin_vehicle_seconds = traffic_.bin_vehicle_seconds();
  out_.bin_vehicle_meters = traffic_.bin_vehicle_meters();

  // Anything not reached by the horizon: the pending activity is too late,
  // the rest follow from it.
  for (std::size_t i = 0; i < agents_.size(); ++i) {
    auto& r = rt_[i];
    const auto& acts = agents_[i].activities;
    bool first = true;
    while (r.outcomes.size() < acts.size()) {
      const auto& a = acts[r.outcomes.size()];
      ActivityOutcome o;
      o.activity = a.id;
      o.person = a.person;
      o.type = a.type;
      o.zone = a.zone;
      o.status = OutcomeStatus::cancelled;
      o.reason = first ? CancelReason::too_late : CancelReason::cascade;
      first = false;
      r.outcomes.push_back(o);
    }
    out_.outcomes.insert(out_.outcomes.end(), r.outcomes.begin(), r.outcomes.end());
  }
  std::stable_sort(out_.trips.begin(), out_.trips.end(), [](const TripRecord& a, const TripRecord& b) {
    return a.person != b.person ? a.person < b.person : a.trip < b.trip;
  });
  for (auto& per : stop_stats_)
    for (auto& s : per) out_.boardings.push_back(s);
  return std::move(out_);
}

}  // namespace

DayResult run_day(const MultimodalGraph& g, const TravelTimeProfile& profile,
                  const std::vector<AgentDay>& agents, const SimParams& p, std::ostream* trajectories) {
  validate_sim_params(g, p);
  DaySim sim(g, profile, agents, p, trajectories);
  return sim.run();
}

}  // namespace transitsim
