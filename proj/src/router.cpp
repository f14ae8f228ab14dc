#include "transitsim/router.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace transitsim {

TravelTimeProfile::TravelTimeProfile(const MultimodalGraph& g) {
  const auto& links = g.links();
  free_flow_.resize(links.size());
  times_.resize(links.size() * kBinsPerDay);
  prefix_.resize(times_.size());
  for (std::size_t l = 0; l < links.size(); ++l) {
    free_flow_[l] = links[l].free_flow_time(VehicleClass::car);
    std::fill_n(times_.begin() + static_cast<std::ptrdiff_t>(l * kBinsPerDay), kBinsPerDay,
                free_flow_[l]);
    rebuild_prefix(static_cast<int>(l));
  }
}

void TravelTimeProfile::set(int link, int bin, double seconds) {
  times_[idx(link, bin)] = std::max(seconds, free_flow_[link]);
  rebuild_prefix(link);
}

void TravelTimeProfile::scale_all(double factor) {
  for (std::size_t l = 0; l < free_flow_.size(); ++l) {
    for (int b = 0; b < kBinsPerDay; ++b) {
      auto& v = times_[idx(static_cast<int>(l), b)];
      v = std::max(v * factor, free_flow_[l]);
    }
    rebuild_prefix(static_cast<int>(l));
  }
}

void TravelTimeProfile::rebuild_prefix(int link) {
  double running = -kInf;
  for (int b = 0; b < kBinsPerDay; ++b) {
    prefix_[idx(link, b)] = running;
    running = std::max(running, (b + 1) * static_cast<double>(kBinSeconds) + times_[idx(link, b)]);
  }
}

Seconds TravelTimeProfile::exit_time(int link, Seconds t) const {
  const std::size_t i = idx(link, time_bin(t));
  return std::max(t + times_[i], prefix_[i]);
}

const char* key(LegKind k) {
  static constexpr const char* names[] = {"drive", "walk", "bike", "board",
                                          "ride",  "alight", "wait", "park"};
  return names[static_cast<int>(k)];
}

int TripPlan::boardings() const {
  return static_cast<int>(std::count_if(legs.begin(), legs.end(),
                                        [](const Leg& l) { return l.kind == LegKind::board; }));
}

std::vector<int> TripPlan::links() const {
  std::vector<int> out;
  for (const auto& l : legs)
    if (l.kind == LegKind::drive) out.push_back(l.ref);
  return out;
}

double generalized_cost(const std::vector<Leg>& legs, const RouterParams& rp) {
  double c = 0.0;
  for (const auto& l : legs) {
    switch (l.kind) {
      case LegKind::wait: c += rp.wait_weight * l.duration; break;
      case LegKind::walk: c += rp.walk_weight * l.duration; break;
      default: c += rp.ivt_weight * l.duration;
    }
  }
  return c;
}

namespace {

using QueueItem = std::pair<double, int>;
using MinQueue = std::priority_queue<QueueItem, std::vector<QueueItem>, std::greater<>>;

void finish_plan(TripPlan& plan, const MultimodalGraph& g, const RouterParams& rp) {
  plan.found = true;
  plan.predicted_total = 0.0;
  plan.distance = 0.0;
  for (const auto& l : plan.legs) {
    plan.predicted_total += l.duration;
    if (l.kind == LegKind::drive || l.kind == LegKind::walk || l.kind == LegKind::bike) {
      if (l.ref >= 0) plan.distance += g.links()[l.ref].length;
    }
  }
  plan.generalized_cost = generalized_cost(plan.legs, rp);
}

struct ArcSource {
  const MultimodalGraph& g;
  const LinkTimeSource& times;
  UnimodalMode mode;

  template <typename F>
  void for_each(int node, Seconds t, F&& f) const {
    switch (mode) {
      case UnimodalMode::drive:
      case UnimodalMode::truck: {
        const ModeBit bit = mode == UnimodalMode::drive ? kAuto : kTruck;
        for (int l : g.out_links(node)) {
          const auto& link = g.links()[l];
          if (!link.allows(bit)) continue;
          Seconds exit = times.exit_time(l, t);
          if (mode == UnimodalMode::truck)
            exit = std::max(exit, t + link.free_flow_time(VehicleClass::truck));
          f(l, link.to, exit);
        }
        break;
      }
      case UnimodalMode::bus:
        for (int l : g.out_links(node)) {
          const auto& link = g.links()[l];
          if (link.allows(kBus)) f(l, link.to, t + link.free_flow_time(VehicleClass::bus));
        }
        break;
      case UnimodalMode::walk:
        for (const auto& a : g.walk_arcs(node))
          f(a.link, a.to, t + g.links()[a.link].length / g.params().walk_speed);
        break;
      case UnimodalMode::bike:
        for (const auto& a : g.bike_arcs(node))
          f(a.link, a.to, t + g.links()[a.link].length / g.params().bike_speed);
        break;
    }
  }

  double max_speed() const {
    switch (mode) {
      case UnimodalMode::walk: return g.params().walk_speed;
      case UnimodalMode::bike: return g.params().bike_speed;
      default:
        return std::max({g.max_free_flow(VehicleClass::car), g.max_free_flow(VehicleClass::bus),
                         g.max_free_flow(VehicleClass::truck)});
    }
  }

  LegKind leg_kind() const {
    switch (mode) {
      case UnimodalMode::walk: return LegKind::walk;
      case UnimodalMode::bike: return LegKind::bike;
      default: return LegKind::drive;
    }
  }
};

// Earliest arrival from `origin` to every node (no heuristic).
std::vector<double> one_to_all(const MultimodalGraph& g, const LinkTimeSource& times, int origin,
                               Seconds departure, UnimodalMode mode) {
  const ArcSource arcs{g, times, mode};
  std::vector<double> arr(g.nodes().size(), kInf);
  std::vector<char> closed(g.nodes().size(), 0);
  MinQueue q;
  arr[origin] = departure;
  q.emplace(departure, origin);
  while (!q.empty()) {
    auto [t, u] = q.top();
    q.pop();
    if (closed[u]) continue;
    closed[u] = 1;
    arcs.for_each(u, t, [&](int, int v, Seconds tv) {
      if (tv < arr[v]) {
        arr[v] = tv;
        q.emplace(tv, v);
      }
    });
  }
  return arr;
}

}  // namespace

TripPlan shortest_path(const MultimodalGraph& g, const LinkTimeSource& times, int origin,
                       int destination, Seconds departure, UnimodalMode mode,
                       const RouterParams& rp, SearchOptions opts) {
  TripPlan plan;
  plan.departure = departure;
  plan.mode = mode == UnimodalMode::walk   ? TravelMode::walk
              : mode == UnimodalMode::bike ? TravelMode::bike
                                           : TravelMode::drive;
  const int n = static_cast<int>(g.nodes().size());
  if (origin < 0 || origin >= n || destination < 0 || destination >= n) return plan;
  if (origin == destination) {
    finish_plan(plan, g, rp);
    return plan;
  }
  const ArcSource arcs{g, times, mode};
  const double vmax = arcs.max_speed();
  auto h = [&](int v) { return opts.use_heuristic ? g.heuristic_seconds(v, destination, vmax) : 0.0; };

  std::vector<double> arr(n, kInf);
  std::vector<int> pred_link(n, -1), pred_node(n, -1);
  std::vector<char> closed(n, 0);
  MinQueue q;
  arr[origin] = departure;
  q.emplace(departure + h(origin), origin);
  while (!q.empty()) {
    const int u = q.top().second;
    q.pop();
    if (closed[u]) continue;
    closed[u] = 1;
    if (u == destination) break;
    arcs.for_each(u, arr[u], [&](int l, int v, Seconds tv) {
      if (!closed[v] && tv < arr[v]) {
        arr[v] = tv;
        pred_link[v] = l;
        pred_node[v] = u;
        q.emplace(tv + h(v), v);
      }
    });
  }
  if (!std::isfinite(arr[destination])) return plan;
  for (int v = destination; v != origin; v = pred_node[v]) {
    Leg leg;
    leg.kind = arcs.leg_kind();
    leg.ref = pred_link[v];
    leg.start = arr[pred_node[v]];
    leg.duration = arr[v] - arr[pred_node[v]];
    plan.legs.push_back(leg);
  }
  std::reverse(plan.legs.begin(), plan.legs.end());
  finish_plan(plan, g, rp);
  return plan;
}

namespace {

enum class ArcKind : std::uint8_t { none, walk_link, drive_link, access_walk, park, ride, transfer, egress };

struct Pred {
  int prev = -1;
  ArcKind kind = ArcKind::none;
  int ref = -1;  // link, access edge, transfer edge, or pattern
  int trip = -1;
  int from_pos = -1;
  int to_pos = -1;
  Seconds board_time = 0;
};

}  // namespace

TripPlan intermodal_path(const MultimodalGraph& g, const LinkTimeSource& times, int origin,
                         int destination, Seconds departure, AccessMode access,
                         const RouterParams& rp) {
  TripPlan plan;
  plan.departure = departure;
  plan.mode = access == AccessMode::walk ? TravelMode::walk_to_transit : TravelMode::drive_to_transit;
  const int n = static_cast<int>(g.nodes().size());
  const int n_stops = static_cast<int>(g.stops().size());
  if (!g.has_transit() || origin < 0 || origin >= n || destination < 0 || destination >= n)
    return plan;
  const int K = std::max(1, rp.max_boardings);
  const int stop_base = n;
  const int egress_base = n + n_stops * (K + 1);
  const int total = egress_base + n;
  auto stop_label = [&](int s, int k) { return stop_base + s * (K + 1) + k; };

  const double walk_speed = g.params().walk_speed;
  double vmax = walk_speed;
  if (access == AccessMode::drive) vmax = std::max(vmax, g.max_free_flow(VehicleClass::car));
  for (const auto& p : g.patterns()) {
    for (const auto& trip : p.trips) {
      for (std::size_t i = 1; i < p.stops.size(); ++i) {
        const auto& a = g.stops()[p.stops[i - 1]];
        const auto& b = g.stops()[p.stops[i]];
        const double dt = trip.arrivals[i] - trip.departures[i - 1];
        if (dt > 0.0) vmax = std::max(vmax, std::hypot(a.x - b.x, a.y - b.y) / dt);
      }
    }
  }
  const auto& dnode = g.nodes()[destination];
  const double kappa = g.heuristic_scale();
  auto h = [&](int label) {
    double x, y;
    if (label >= stop_base && label < egress_base) {
      const auto& s = g.stops()[(label - stop_base) / (K + 1)];
      x = s.x;
      y = s.y;
    } else {
      const auto& nd = g.nodes()[label < stop_base ? label : label - egress_base];
      x = nd.x;
      y = nd.y;
    }
    return kappa * std::hypot(x - dnode.x, y - dnode.y) / vmax;
  };

  std::vector<double> arr(total, kInf);
  std::vector<Pred> pred(total);
  std::vector<char> closed(total, 0);
  MinQueue q;
  auto relax = [&](int from, int to, Seconds t, Pred p) {
    if (closed[to] || !(t < arr[to])) return;
    arr[to] = t;
    p.prev = from;
    pred[to] = p;
    q.emplace(t + h(to), to);
  };

  arr[origin] = departure;
  q.emplace(departure + h(origin), origin);
  const int target = egress_base + destination;
  while (!q.empty()) {
    const int u = q.top().second;
    q.pop();
    if (closed[u]) continue;
    closed[u] = 1;
    if (u == target) break;
    const Seconds t = arr[u];
    if (u < stop_base) {
      // Access phase on the road/walk layer.
      if (access == AccessMode::walk) {
        for (const auto& a : g.walk_arcs(u))
          relax(u, a.to, t + g.links()[a.link].length / walk_speed, {-1, ArcKind::walk_link, a.link});
      } else {
        for (int l : g.out_links(u)) {
          const auto& link = g.links()[l];
          if (link.allows(kAuto)) relax(u, link.to, times.exit_time(l, t), {-1, ArcKind::drive_link, l});
        }
      }
      for (int ai : g.node_access(u)) {
        const auto& e = g.access_edges()[ai];
        const bool usable = access == AccessMode::walk ? e.kind == AccessKind::walk
                                                       : e.kind == AccessKind::drive;
        if (!usable) continue;
        const Seconds walk = e.distance / walk_speed;
        if (access == AccessMode::walk)
          relax(u, stop_label(e.stop, 0), t + walk, {-1, ArcKind::access_walk, ai});
        else
          relax(u, stop_label(e.stop, 0), t + g.params().park_time + walk, {-1, ArcKind::park, ai});
      }
    } else if (u < egress_base) {
      const int s = (u - stop_base) / (K + 1);
      const int k = (u - stop_base) % (K + 1);
      if (k < K) {
        for (const auto& visit : g.stop_visits(s)) {
          const auto& pat = g.patterns()[visit.pattern];
          const int i = visit.position;
          if (i + 1 >= static_cast<int>(pat.stops.size())) continue;
          auto ride = [&](int tr) {
            const auto& trip = pat.trips[tr];
            for (std::size_t j = i + 1; j < pat.stops.size(); ++j) {
              relax(u, stop_label(pat.stops[j], k + 1), trip.arrivals[j],
                    {-1, ArcKind::ride, visit.pattern, tr, i, static_cast<int>(j), trip.departures[i]});
            }
          };
          if (g.pattern_fifo(visit.pattern)) {
            auto it = std::lower_bound(pat.trips.begin(), pat.trips.end(), t,
                                       [i](const TransitTrip& tr, Seconds v) { return tr.departures[i] < v; });
            if (it != pat.trips.end()) ride(static_cast<int>(it - pat.trips.begin()));
          } else {
            for (std::size_t tr = 0; tr < pat.trips.size(); ++tr)
              if (pat.trips[tr].departures[i] >= t) ride(static_cast<int>(tr));
          }
        }
      }
      if (k >= 1) {
        for (int ti : g.stop_transfers(s)) {
          const auto& e = g.transfer_edges()[ti];
          relax(u, stop_label(e.to_stop, k), t + e.distance / walk_speed, {-1, ArcKind::transfer, ti});
        }
        for (int ai : g.stop_access(s)) {
          const auto& e = g.access_edges()[ai];
          if (e.kind != AccessKind::walk) continue;
          relax(u, egress_base + e.node, t + e.distance / walk_speed, {-1, ArcKind::egress, ai});
        }
      }
    } else {
      const int v = u - egress_base;
      for (const auto& a : g.walk_arcs(v))
        relax(u, egress_base + a.to, t + g.links()[a.link].length / walk_speed,
              {-1, ArcKind::walk_link, a.link});
    }
  }
  if (!std::isfinite(arr[target])) return plan;

  std::vector<int> chain;
  for (int v = target; v != origin; v = pred[v].prev) chain.push_back(v);
  std::reverse(chain.begin(), chain.end());
  for (int v : chain) {
    const Pred& p = pred[v];
    const Seconds t0 = arr[p.prev];
    const Seconds t1 = arr[v];
    Leg leg;
    leg.start = t0;
    leg.duration = t1 - t0;
    switch (p.kind) {
      case ArcKind::walk_link:
        leg.kind = LegKind::walk;
        leg.ref = p.ref;
        plan.legs.push_back(leg);
        break;
      case ArcKind::drive_link:
        leg.kind = LegKind::drive;
        leg.ref = p.ref;
        plan.legs.push_back(leg);
        break;
      case ArcKind::access_walk:
      case ArcKind::egress:
        leg.kind = LegKind::walk;
        leg.stop = g.access_edges()[p.ref].stop;
        plan.legs.push_back(leg);
        break;
      case ArcKind::transfer:
        leg.kind = LegKind::walk;
        leg.stop = g.transfer_edges()[p.ref].to_stop;
        plan.legs.push_back(leg);
        break;
      case ArcKind::park: {
        const int stop = g.access_edges()[p.ref].stop;
        Leg park{LegKind::park, stop, -1, -1, -1, stop, t0, g.params().park_time};
        Leg walk{LegKind::walk, -1, -1, -1, -1, stop, t0 + park.duration, (t1 - t0) - park.duration};
        plan.legs.push_back(park);
        plan.legs.push_back(walk);
        break;
      }
      case ArcKind::ride: {
        const int stop_from = g.patterns()[p.ref].stops[p.from_pos];
        const int stop_to = g.patterns()[p.ref].stops[p.to_pos];
        if (p.board_time > t0)
          plan.legs.push_back({LegKind::wait, stop_from, -1, -1, -1, stop_from, t0, p.board_time - t0});
        plan.legs.push_back({LegKind::board, p.ref, p.trip, p.from_pos, p.to_pos, stop_from, p.board_time, 0.0});
        plan.legs.push_back({LegKind::ride, p.ref, p.trip, p.from_pos, p.to_pos, stop_from, p.board_time,
                             t1 - p.board_time});
        plan.legs.push_back({LegKind::alight, p.ref, p.trip, p.from_pos, p.to_pos, stop_to, t1, 0.0});
        break;
      }
      case ArcKind::none: break;
    }
  }
  finish_plan(plan, g, rp);
  return plan;
}

LosTable mode_levels_of_service(const MultimodalGraph& g, const LinkTimeSource& times,
                                int origin_zone, int destination_zone, Seconds departure,
                                const LosParams& p) {
  LosTable los{};
  const int o = g.zone_centroid(origin_zone);
  const int d = g.zone_centroid(destination_zone);
  if (o < 0 || d < 0) return los;
  const double straight = g.straight_distance(o, d);
  for (auto& m : los) m.distance = straight;
  if (origin_zone == destination_zone) {
    for (int m = 0; m < kTravelModes; ++m)
      los[m].available = !is_transit(static_cast<TravelMode>(m)) || g.has_transit();
    return los;
  }
  auto fill = [&](TravelMode m, const TripPlan& plan) {
    auto& l = los[static_cast<int>(m)];
    if (!plan.found) return;
    l.available = true;
    double drive_m = 0.0;
    for (const auto& leg : plan.legs) {
      switch (leg.kind) {
        case LegKind::wait: l.wait += leg.duration; break;
        case LegKind::walk:
        case LegKind::park: l.walk += leg.duration; break;
        default: l.in_vehicle += leg.duration;
      }
      if (leg.kind == LegKind::drive) drive_m += g.links()[leg.ref].length;
    }
    l.distance = plan.distance > 0.0 ? plan.distance : straight;
    l.cost = drive_m / 1000.0 * p.auto_cost_per_km + (is_transit(m) ? p.transit_fare : 0.0);
  };
  fill(TravelMode::drive, shortest_path(g, times, o, d, departure, UnimodalMode::drive, p.router));
  fill(TravelMode::walk, shortest_path(g, times, o, d, departure, UnimodalMode::walk, p.router));
  fill(TravelMode::bike, shortest_path(g, times, o, d, departure, UnimodalMode::bike, p.router));
  if (g.has_transit()) {
    fill(TravelMode::walk_to_transit,
         intermodal_path(g, times, o, d, departure, AccessMode::walk, p.router));
    fill(TravelMode::drive_to_transit,
         intermodal_path(g, times, o, d, departure, AccessMode::drive, p.router));
  }
  return los;
}

Skims drive_skims(const MultimodalGraph& g, const LinkTimeSource& times, Seconds departure) {
  const auto& zones = g.zones();
  const std::size_t nz = zones.size();
  std::vector<double> tt(nz * nz, kInf);
  for (std::size_t a = 0; a < nz; ++a) {
    const int o = g.zone_centroid(zones[a]);
    const auto arr = one_to_all(g, times, o, departure, UnimodalMode::drive);
    for (std::size_t b = 0; b < nz; ++b) {
      const int d = g.zone_centroid(zones[b]);
      tt[a * nz + b] = a == b ? 0.0 : arr[d] - departure;
    }
  }
  return Skims(zones, std::move(tt));
}

}  // namespace transitsim
