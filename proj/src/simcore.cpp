#include "transitsim/simcore.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace transitsim {

void validate_sim_params(const MultimodalGraph& g, const SimParams& p) {
  if (!(p.dt > 0.0)) throw ConfigError("simulation dt must be positive");
  if (!(p.reroute_factor >= 1.0)) throw ConfigError("reroute_factor must be >= 1");
  if (p.min_dwell < 0.0 || p.board_seconds < 0.0 || p.alight_seconds < 0.0)
    throw ConfigError("dwell parameters must be non-negative");
  if (!(p.max_wait > 0.0)) throw ConfigError("max_wait must be positive");
  if (p.workers < 1) throw ConfigError("workers must be >= 1");
  for (const auto& l : g.links()) {
    if (!l.congestable) continue;
    for (int c = 0; c < kVehicleClasses; ++c) {
      const double limit = l.class_jam_spacing(static_cast<VehicleClass>(c)) / l.wave_speed;
      if (p.dt > limit + 1e-12)
        throw ConfigError("dt " + std::to_string(p.dt) + " s exceeds jam_spacing/wave_speed = " +
                          std::to_string(limit) + " s on link " + std::to_string(l.id));
    }
  }
}

void LinkTimeRecords::resize(std::size_t links) {
  sum.assign(links * kBinsPerDay, 0.0);
  count.assign(links * kBinsPerDay, 0);
  censored.assign(links * kBinsPerDay, 0.0);
  meters.assign(links, 0.0);
  seconds.assign(links, 0.0);
}

TravelTimeProfile experienced_profile(const MultimodalGraph& g, const LinkTimeRecords& r) {
  TravelTimeProfile prof(g);
  const std::size_t n = g.links().size();
  for (std::size_t l = 0; l < n; ++l) {
    for (int b = 0; b < kBinsPerDay; ++b) {
      const std::size_t i = l * kBinsPerDay + b;
      if (r.count[i] > 0)
        prof.set(static_cast<int>(l), b, r.sum[i] / r.count[i]);
      else if (r.censored[i] > 0.0)
        prof.set(static_cast<int>(l), b, r.censored[i]);
    }
  }
  return prof;
}

// --- TrafficSim --------------------------------------------------------

TrafficSim::TrafficSim(const MultimodalGraph& g, const SimParams& p) : g_(&g), p_(p) {
  const std::size_t n = g.links().size();
  on_link_.resize(n);
  origin_.resize(n);
  counters_.resize(n);
  room_.assign(n, kInf);
  recent_.assign(n, 0.0);
  recent_exit_.assign(n, -kInf);
  records_.resize(n);
  bin_vs_.assign(kBinsPerDay, 0.0);
  bin_vm_.assign(kBinsPerDay, 0.0);
}

int TrafficSim::add_vehicle(VehicleClass c, std::vector<int> route, Seconds departure, int owner,
                            int occupants) {
  if (route.empty()) throw SimulationError("vehicle route is empty");
  VehicleState v;
  v.id = static_cast<int>(vehicles_.size());
  v.cls = c;
  v.route = std::move(route);
  v.departure = departure;
  v.owner = owner;
  v.occupants = occupants;
  auto& q = origin_[v.route.front()];
  auto pos = std::upper_bound(q.begin(), q.end(), departure,
                              [&](Seconds d, int id) { return d < vehicles_[id].departure; });
  q.insert(pos, v.id);
  vehicles_.push_back(std::move(v));
  ++waiting_;
  return vehicles_.back().id;
}

int TrafficSim::place_vehicle(VehicleClass c, std::vector<int> route, double position, Seconds now,
                              int owner) {
  if (route.empty()) throw SimulationError("vehicle route is empty");
  const int l = route.front();
  const Link& link = g_->links()[l];
  auto& q = on_link_[l];
  if (position < 0.0 || position > link.length)
    throw SimulationError("placement outside link " + std::to_string(link.id));
  if (!q.empty() && !(position < vehicles_[q.back()].position))
    throw SimulationError("placement must be behind the last vehicle on link " +
                          std::to_string(link.id));
  VehicleState v;
  v.id = static_cast<int>(vehicles_.size());
  v.cls = c;
  v.route = std::move(route);
  v.link = l;
  v.position = position;
  v.departure = now;
  v.link_entry = now;
  v.owner = owner;
  v.leader = q.empty() ? -1 : q.back();
  q.push_back(v.id);
  vehicles_.push_back(std::move(v));
  ++counters_[l].entered;
  ++in_network_;
  return vehicles_.back().id;
}

void TrafficSim::replace_route_tail(int vehicle, std::vector<int> tail) {
  auto& v = vehicles_[vehicle];
  v.route.resize(static_cast<std::size_t>(v.route_index) + 1);
  v.route.insert(v.route.end(), tail.begin(), tail.end());
}

Seconds TrafficSim::earliest_waiting_departure() const {
  Seconds best = kInf;
  for (const auto& q : origin_)
    if (!q.empty()) best = std::min(best, vehicles_[q.front()].departure);
  return best;
}

void TrafficSim::move_link(int l) {
  const Link& link = g_->links()[l];
  const auto& q = on_link_[l];
  const double dt = p_.dt;
  double prev_old = 0.0, prev_next = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    const auto& v = vehicles_[q[i]];
    const double x = v.position;
    double xn;
    if (i == 0) {
      xn = x + link.class_free_flow(v.cls) * dt;
    } else {
      const double speed = link_speed(link, (prev_old - x) * link.lanes, v.cls);
      xn = std::max(x, std::min(x + speed * dt, prev_next - min_gap(link, v.cls)));
    }
    prop_[q[i]] = {xn, x};
    prev_old = x;
    prev_next = xn;
  }
}

bool TrafficSim::try_enter(int vid, int link, Seconds when, Seconds /*t*/, double proposed) {
  const Link& m = g_->links()[link];
  auto& v = vehicles_[vid];
  const double e = std::min({proposed, room_[link] - min_gap(m, v.cls), m.length});
  if (e < 0.0) return false;
  auto& q = on_link_[link];
  v.leader = q.empty() ? -1 : q.back();
  q.push_back(vid);
  room_[link] = e;
  v.link = link;
  v.position = e;
  v.link_entry = when;
  ++counters_[link].entered;
  return true;
}

void TrafficSim::leave_link(int vid, int l, Seconds entry, Seconds time, bool last,
                            std::vector<TrafficEvent>& events) {
  auto& v = vehicles_[vid];
  const Link& link = g_->links()[l];
  ++counters_[l].exited;
  if (v.cls == VehicleClass::car) {
    const double tt = time - entry;
    const std::size_t i = static_cast<std::size_t>(l) * kBinsPerDay + time_bin(entry);
    records_.sum[i] += tt;
    ++records_.count[i];
    records_.meters[l] += link.length;
    records_.seconds[l] += tt;
    recent_[l] = recent_exit_[l] > time - kBinSeconds ? 0.5 * (recent_[l] + tt) : tt;
    recent_exit_[l] = time;
  }
  if (last) {
    v.link = -1;
    v.arrival = time;
    v.position = link.length;
    --in_network_;
    events.push_back({TrafficEventKind::arrived, vid, l, time});
  }
}

void TrafficSim::accumulate(int vid, double meters, double seconds, Seconds t) {
  if (vehicles_[vid].cls != VehicleClass::car) return;
  const int b = time_bin(t);
  bin_vm_[b] += meters;
  bin_vs_[b] += seconds;
  car_vs_ += seconds;
}

void TrafficSim::step(Seconds t, std::vector<TrafficEvent>& events) {
  const double dt = p_.dt;
  const Seconds t1 = t + dt;
  const auto& links = g_->links();
  const int n_links = static_cast<int>(links.size());
  moved_ = false;
  prop_.resize(vehicles_.size());

  active_.clear();
  for (int l = 0; l < n_links; ++l) {
    const auto& q = on_link_[l];
    room_[l] = q.empty() ? kInf : vehicles_[q.back()].position;
    if (!q.empty()) active_.push_back(l);
  }
  std::vector<std::size_t> n_orig(active_.size());
  for (std::size_t k = 0; k < active_.size(); ++k) n_orig[k] = on_link_[active_[k]].size();

  const int n_active = static_cast<int>(active_.size());
#pragma omp parallel for schedule(static) num_threads(p_.workers) if (p_.workers > 1)
  for (int k = 0; k < n_active; ++k) move_link(active_[k]);

  // Transfers, in link order; rooms come from the start-of-step snapshot.
  for (std::size_t k = 0; k < active_.size(); ++k) {
    const int l = active_[k];
    const Link& link = links[l];
    auto& q = on_link_[l];
    bool stays_ahead = false;
    double prev_final = kInf;
    std::size_t removed = 0;
    for (std::size_t i = 0; i < n_orig[k]; ++i) {
      const int vid = q[i - removed];
      auto& v = vehicles_[vid];
      const Proposal pr = prop_[vid];
      if (!stays_ahead && pr.next >= link.length) {
        const double frac =
            pr.next > pr.old ? std::clamp((link.length - pr.old) / (pr.next - pr.old), 0.0, 1.0) : 0.0;
        const Seconds exit_time = t + frac * dt;
        const bool last = v.route_index + 1 >= static_cast<int>(v.route.size());
        bool left = last;
        const int from = v.link;
        const Seconds entered = v.link_entry;
        if (last) {
          leave_link(vid, from, entered, exit_time, true, events);
          accumulate(vid, link.length - pr.old, exit_time - t, t);
        } else {
          const int m = v.route[v.route_index + 1];
          const double proposed = (t1 - exit_time) * links[m].class_free_flow(v.cls);
          if (try_enter(vid, m, exit_time, t, proposed)) {
            leave_link(vid, from, entered, exit_time, false, events);
            ++v.route_index;
            accumulate(vid, (link.length - pr.old) + v.position, dt, t);
            events.push_back({TrafficEventKind::entered_link, vid, m, exit_time});
            left = true;
          }
        }
        if (left) {
          q.pop_front();
          ++removed;
          moved_ = true;
          continue;
        }
      }
      double final_pos = std::min(pr.next, link.length);
      if (prev_final < kInf)
        final_pos = std::max(pr.old, std::min(final_pos, prev_final - min_gap(link, v.cls)));
      v.position = final_pos;
      v.speed = (final_pos - pr.old) / dt;
      if (final_pos > pr.old) moved_ = true;
      accumulate(vid, final_pos - pr.old, dt, t);
      prev_final = final_pos;
      stays_ahead = true;
    }
    if (!q.empty()) vehicles_[q.front()].leader = -1;
  }

  // Origin queues feed after through traffic.
  for (int l = 0; l < n_links; ++l) {
    auto& oq = origin_[l];
    while (!oq.empty()) {
      const int vid = oq.front();
      auto& v = vehicles_[vid];
      if (!(v.departure < t1)) break;
      const Seconds when = std::max(v.departure, t);
      const double proposed = (t1 - when) * links[l].class_free_flow(v.cls);
      if (!try_enter(vid, l, when, t, proposed)) break;
      v.speed = links[l].class_free_flow(v.cls);
      oq.pop_front();
      --waiting_;
      ++in_network_;
      moved_ = true;
      accumulate(vid, v.position, t1 - when, t);
      events.push_back({TrafficEventKind::entered_link, vid, l, when});
    }
  }
}

void TrafficSim::check_invariants() const {
  std::size_t present = 0;
  for (std::size_t l = 0; l < on_link_.size(); ++l) {
    const auto& q = on_link_[l];
    const auto& c = counters_[l];
    if (c.entered != c.exited + static_cast<long long>(q.size()))
      throw SimulationError("conservation violated on link " + std::to_string(g_->links()[l].id));
    present += q.size();
    const double len = g_->links()[l].length;
    for (std::size_t i = 0; i < q.size(); ++i) {
      const double x = vehicles_[q[i]].position;
      if (x < 0.0 || x > len)
        throw SimulationError("vehicle outside link " + std::to_string(g_->links()[l].id));
      if (i > 0 && !(x < vehicles_[q[i - 1]].position))
        throw SimulationError("vehicle order violated on link " + std::to_string(g_->links()[l].id));
    }
  }
  if (present != in_network_) throw SimulationError("network vehicle count mismatch");
}

void TrafficSim::close_records(Seconds t) {
  for (std::size_t l = 0; l < on_link_.size(); ++l) {
    for (int vid : on_link_[l]) {
      const auto& v = vehicles_[vid];
      if (v.cls != VehicleClass::car) continue;
      auto& c = records_.censored[l * kBinsPerDay + time_bin(v.link_entry)];
      c = std::max(c, t - v.link_entry);
    }
  }
}

// --- transit service ---------------------------------------------------

StopService serve_stop(TransitVehicleState& v, int stop_pos, std::deque<WaitingPassenger>& queue,
                       const DwellParams& p) {
  StopService out;
  std::vector<Onboard> staying;
  staying.reserve(v.onboard.size());
  for (const auto& o : v.onboard) {
    if (o.alight_pos == stop_pos) {
      out.alighted.push_back(o.passenger);
      if (o.seated)
        --v.seated;
      else
        --v.standing;
    } else {
      staying.push_back(o);
    }
  }
  for (auto& o : staying) {
    if (!o.seated && v.seated < v.seat_capacity) {
      o.seated = true;
      ++v.seated;
      --v.standing;
    }
  }
  v.onboard = std::move(staying);
  while (!queue.empty() && static_cast<int>(v.onboard.size()) < v.crush_capacity) {
    const auto w = queue.front();
    queue.pop_front();
    const bool seat = v.seated < v.seat_capacity;
    v.onboard.push_back({w.passenger, w.alight_pos, seat});
    if (seat)
      ++v.seated;
    else
      ++v.standing;
    out.boarded.push_back(w.passenger);
  }
  v.next_stop = stop_pos + 1;
  out.dwell = std::max(p.min_dwell, p.board_seconds * static_cast<double>(out.boarded.size()) +
                                        p.alight_seconds * static_cast<double>(out.alighted.size()));
  return out;
}

// --- activities --------------------------------------------------------

const char* key(OutcomeStatus s) {
  static constexpr const char* names[] = {"completed", "shortened", "postponed", "cancelled"};
  return names[static_cast<int>(s)];
}

const char* key(CancelReason r) {
  static constexpr const char* names[] = {"none", "untravelable", "too_late", "cascade"};
  return names[static_cast<int>(r)];
}

namespace {

ActivityOutcome blank_outcome(const Activity& a) {
  ActivityOutcome o;
  o.activity = a.id;
  o.person = a.person;
  o.type = a.type;
  o.zone = a.zone;
  return o;
}

}  // namespace

bool activity_infeasible(const Activity& a, Seconds arrival) {
  if (a.mandatory) return false;
  return std::max(arrival, a.planned_start) + a.min_duration > a.latest_end;
}

ActivityOutcome arrive_at_activity(const Activity& a, Seconds arrival, const SimParams& p) {
  ActivityOutcome o = blank_outcome(a);
  const Seconds start = std::max(arrival, a.planned_start);
  const bool late_start = start > a.planned_start + p.postpone_tolerance;
  if (!a.mandatory) {
    if (start + a.planned_duration <= a.latest_end) {
      o.status = late_start ? OutcomeStatus::postponed : OutcomeStatus::completed;
      o.realized_start = start;
      o.realized_duration = a.planned_duration;
    } else if (a.latest_end - start >= a.min_duration) {
      o.status = OutcomeStatus::shortened;
      o.realized_start = start;
      o.realized_duration = a.latest_end - start;
    } else {
      o.status = OutcomeStatus::cancelled;
      o.reason = CancelReason::too_late;
    }
    return o;
  }
  const Seconds dur = std::max(a.min_duration, std::min(a.planned_duration, a.latest_end - start));
  o.realized_start = start;
  o.realized_duration = dur;
  if (dur < a.planned_duration)
    o.status = OutcomeStatus::shortened;
  else
    o.status = late_start ? OutcomeStatus::postponed : OutcomeStatus::completed;
  return o;
}

std::vector<ActivityOutcome> execute_chain(const std::vector<Activity>& acts, const TravelFn& travel,
                                           const std::function<Seconds(int)>& lead,
                                           const SimParams& p) {
  std::vector<ActivityOutcome> out;
  int loc = -1;
  Seconds free_at = 0;
  bool prev_cancelled = false;
  for (int i = 0; i < static_cast<int>(acts.size()); ++i) {
    const Activity& a = acts[i];
    const Seconds depart = std::max(free_at, a.planned_start - lead(i));
    const auto arrival = travel(loc, i, depart);
    if (!arrival) {
      ActivityOutcome o = blank_outcome(a);
      o.status = OutcomeStatus::cancelled;
      o.reason = CancelReason::untravelable;
      out.push_back(o);
      prev_cancelled = true;
      continue;
    }
    if (activity_infeasible(a, *arrival)) {
      ActivityOutcome o = blank_outcome(a);
      o.status = OutcomeStatus::cancelled;
      o.reason = prev_cancelled ? CancelReason::cascade : CancelReason::too_late;
      out.push_back(o);
      prev_cancelled = true;
      continue;
    }
    ActivityOutcome o = arrive_at_activity(a, *arrival, p);
    out.push_back(o);
    loc = i;
    free_at = o.realized_start + o.realized_duration;
    prev_cancelled = false;
  }
  return out;
}

}  // namespace transitsim
