#include "transitsim/network.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "transitsim/csv.hpp"

namespace transitsim {

using nlohmann::json;

double link_speed(const Link& link, double spacing, VehicleClass c) {
  const double vf = link.class_free_flow(c);
  const double sj = link.class_jam_spacing(c);
  const double congested = link.wave_speed * (spacing - sj) / sj;
  const double v = std::min(vf, congested);
  return std::clamp(v, 0.0, vf);
}

namespace {

constexpr std::array<std::pair<const char*, ModeBit>, 5> kModeNames{{
    {"auto", kAuto}, {"bus", kBus}, {"truck", kTruck}, {"walk", kWalk}, {"bike", kBike}}};

double dist(double ax, double ay, double bx, double by) { return std::hypot(ax - bx, ay - by); }

}  // namespace

ModeMask parse_mode_mask(const std::string& text) {
  ModeMask m = 0;
  std::string tok;
  auto flush = [&] {
    if (tok.empty()) return;
    bool found = false;
    for (auto& [name, bit] : kModeNames) {
      if (tok == name) {
        m |= bit;
        found = true;
      }
    }
    if (!found) throw ParseError("unknown link mode '" + tok + "'");
    tok.clear();
  };
  for (char c : text) {
    if (c == '|' || c == ';' || c == ' ') flush();
    else tok += c;
  }
  flush();
  return m;
}

std::string mode_mask_string(ModeMask m) {
  std::string out;
  for (auto& [name, bit] : kModeNames) {
    if (m & bit) {
      if (!out.empty()) out += '|';
      out += name;
    }
  }
  return out;
}

std::string to_string(TransitMode m) {
  switch (m) {
    case TransitMode::bus: return "bus";
    case TransitMode::metro_rail: return "metro_rail";
    case TransitMode::commuter_rail: return "commuter_rail";
  }
  return "bus";
}

TransitMode transit_mode_from_string(const std::string& s) {
  if (s == "bus") return TransitMode::bus;
  if (s == "metro_rail") return TransitMode::metro_rail;
  if (s == "commuter_rail") return TransitMode::commuter_rail;
  throw ParseError("unknown transit mode '" + s + "'");
}

bool TransitPattern::is_fifo() const {
  for (std::size_t t = 1; t < trips.size(); ++t) {
    for (std::size_t i = 0; i < stops.size(); ++i) {
      if (trips[t].arrivals[i] < trips[t - 1].arrivals[i] ||
          trips[t].departures[i] < trips[t - 1].departures[i])
        return false;
    }
  }
  return true;
}

RoadwayData read_roadway(const std::filesystem::path& nodes_csv,
                         const std::filesystem::path& links_csv, const NetworkParams& params) {
  RoadwayData rd;
  const auto nt = csv::Table::read_file(nodes_csv);
  const auto cid = nt.column("id"), cx = nt.column("x"), cy = nt.column("y"),
             cz = nt.column("zone");
  std::unordered_map<int, int> index;
  for (std::size_t r = 0; r < nt.size(); ++r) {
    Node n;
    n.id = static_cast<int>(csv::to_int(nt.at(r, cid), nt, "id"));
    n.x = csv::to_double(nt.at(r, cx), nt, "x");
    n.y = csv::to_double(nt.at(r, cy), nt, "y");
    n.zone = static_cast<int>(csv::to_int(nt.at(r, cz), nt, "zone"));
    if (!index.emplace(n.id, static_cast<int>(rd.nodes.size())).second)
      throw ParseError(nt.source() + ": duplicate node id " + std::to_string(n.id));
    rd.nodes.push_back(n);
  }

  const auto lt = csv::Table::read_file(links_csv);
  const auto lid = lt.column("id"), lfrom = lt.column("from"), lto = lt.column("to"),
             llen = lt.column("length_m"), llanes = lt.column("lanes"),
             lffs = lt.column("ffs_mps"), ljam = lt.column("jam_spacing_m"),
             lwave = lt.column("wave_mps"), lmodes = lt.column("modes"),
             lcong = lt.column("congestable");
  // Optional per-link class overrides.
  const auto bus_ffs = lt.find_column("bus_ffs_factor"), bus_jam = lt.find_column("bus_jam_factor"),
             truck_ffs = lt.find_column("truck_ffs_factor"),
             truck_jam = lt.find_column("truck_jam_factor");
  for (std::size_t r = 0; r < lt.size(); ++r) {
    Link l;
    l.id = static_cast<int>(csv::to_int(lt.at(r, lid), lt, "id"));
    const int from_id = static_cast<int>(csv::to_int(lt.at(r, lfrom), lt, "from"));
    const int to_id = static_cast<int>(csv::to_int(lt.at(r, lto), lt, "to"));
    auto f = index.find(from_id), t = index.find(to_id);
    if (f == index.end() || t == index.end())
      throw ParseError(lt.source() + ": link " + std::to_string(l.id) + " references unknown node");
    l.from = f->second;
    l.to = t->second;
    l.length = csv::to_double(lt.at(r, llen), lt, "length_m");
    l.lanes = static_cast<int>(csv::to_int(lt.at(r, llanes), lt, "lanes"));
    l.free_flow_speed = csv::to_double(lt.at(r, lffs), lt, "ffs_mps");
    l.jam_spacing = csv::to_double(lt.at(r, ljam), lt, "jam_spacing_m");
    l.wave_speed = csv::to_double(lt.at(r, lwave), lt, "wave_mps");
    l.modes = parse_mode_mask(lt.at(r, lmodes));
    const auto& cg = lt.at(r, lcong);
    l.congestable = !(cg == "0" || cg == "false" || cg == "False");
    l.factors = params.class_defaults;
    auto opt = [&](std::optional<std::size_t> col, double& dst) {
      if (col && !lt.at(r, *col).empty()) dst = csv::to_double(lt.at(r, *col), lt, "class factor");
    };
    opt(bus_ffs, l.factors[1].ffs);
    opt(bus_jam, l.factors[1].jam);
    opt(truck_ffs, l.factors[2].ffs);
    opt(truck_jam, l.factors[2].jam);
    rd.links.push_back(l);
  }
  return rd;
}

namespace {

void validate_roadway(const RoadwayData& rd) {
  std::unordered_map<int, int> ids;
  for (const auto& n : rd.nodes) {
    if (!std::isfinite(n.x) || !std::isfinite(n.y))
      throw ParseError("node " + std::to_string(n.id) + " has non-finite coordinates");
    if (!ids.emplace(n.id, 0).second) throw ParseError("duplicate node id " + std::to_string(n.id));
  }
  std::unordered_map<int, int> link_ids;
  const int n = static_cast<int>(rd.nodes.size());
  for (const auto& l : rd.links) {
    const std::string tag = "link " + std::to_string(l.id);
    if (!link_ids.emplace(l.id, 0).second) throw ParseError("duplicate " + tag);
    if (l.from < 0 || l.from >= n || l.to < 0 || l.to >= n)
      throw ParseError(tag + " references unknown node");
    if (!(l.length > 0.0)) throw ParseError(tag + " rejected: length must be > 0");
    if (l.lanes < 1) throw ParseError(tag + " rejected: lanes must be >= 1");
    if (!(l.free_flow_speed > 0.0)) throw ParseError(tag + " rejected: free-flow speed must be > 0");
    if (!(l.jam_spacing > 0.0)) throw ParseError(tag + " rejected: jam spacing must be > 0");
    if (!(l.wave_speed > 0.0)) throw ParseError(tag + " rejected: wave speed must be > 0");
  }
}

}  // namespace

MultimodalGraph MultimodalGraph::build(RoadwayData roadway, GtfsFeed feed,
                                       const NetworkParams& params) {
  if (!(params.walk_speed > 0.0)) throw ConfigError("walk_speed must be > 0");
  validate_roadway(roadway);
  MultimodalGraph g;
  g.params_ = params;
  g.nodes_ = std::move(roadway.nodes);
  g.links_ = std::move(roadway.links);
  g.stops_ = std::move(feed.stops);
  g.patterns_ = std::move(feed.patterns);
  g.warnings_ = std::move(feed.warnings);

  std::vector<char> walk_node(g.nodes_.size(), 0);
  bool any_walk = false;
  for (const auto& l : g.links_) {
    if (l.allows(kWalk)) {
      walk_node[l.from] = walk_node[l.to] = 1;
      any_walk = true;
    }
  }
  for (std::size_t s = 0; s < g.stops_.size(); ++s) {
    auto& stop = g.stops_[s];
    int best = -1;
    double best_d = kInf;
    for (std::size_t n = 0; n < g.nodes_.size(); ++n) {
      if (any_walk && !walk_node[n]) continue;
      const double d = dist(stop.x, stop.y, g.nodes_[n].x, g.nodes_[n].y);
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(n);
      }
    }
    if (best < 0) throw ParseError("no roadway nodes to anchor stop " + stop.gtfs_id);
    stop.node = best;
    stop.accessible = best_d <= params.max_access_walk;
    if (!stop.accessible) {
      g.warnings_.push_back("stop " + stop.gtfs_id + " is inaccessible (nearest node " +
                            std::to_string(static_cast<long>(best_d)) + " m away)");
      continue;
    }
    g.access_.push_back({static_cast<int>(s), best, best_d, AccessKind::walk});
    if (stop.park_and_ride)
      g.access_.push_back({static_cast<int>(s), best, best_d, AccessKind::drive});
  }
  for (std::size_t a = 0; a < g.stops_.size(); ++a) {
    for (std::size_t b = 0; b < g.stops_.size(); ++b) {
      if (a == b) continue;
      const double d = dist(g.stops_[a].x, g.stops_[a].y, g.stops_[b].x, g.stops_[b].y);
      if (d <= params.max_access_walk)
        g.transfers_.push_back({static_cast<int>(a), static_cast<int>(b), d});
    }
  }
  g.index();
  return g;
}

void MultimodalGraph::index() {
  const std::size_t n = nodes_.size();
  node_by_id_.clear();
  for (std::size_t i = 0; i < n; ++i) node_by_id_[nodes_[i].id] = static_cast<int>(i);
  out_.assign(n, {});
  walk_.assign(n, {});
  bike_.assign(n, {});
  heuristic_scale_ = 1.0;
  max_ffs_.fill(0.0);
  for (std::size_t i = 0; i < links_.size(); ++i) {
    const auto& l = links_[i];
    const int li = static_cast<int>(i);
    out_[l.from].push_back(li);
    if (l.allows(kWalk)) {
      walk_[l.from].push_back({li, l.to});
      walk_[l.to].push_back({li, l.from});
    }
    if (l.allows(kBike)) {
      bike_[l.from].push_back({li, l.to});
      bike_[l.to].push_back({li, l.from});
    }
    const double e = straight_distance(l.from, l.to);
    if (e > 0.0) heuristic_scale_ = std::min(heuristic_scale_, l.length / e);
    for (int c = 0; c < kVehicleClasses; ++c)
      max_ffs_[c] = std::max(max_ffs_[c], l.class_free_flow(static_cast<VehicleClass>(c)));
  }
  stop_access_.assign(stops_.size(), {});
  node_access_.assign(n, {});
  for (std::size_t i = 0; i < access_.size(); ++i) {
    stop_access_[access_[i].stop].push_back(static_cast<int>(i));
    node_access_[access_[i].node].push_back(static_cast<int>(i));
  }
  stop_transfers_.assign(stops_.size(), {});
  for (std::size_t i = 0; i < transfers_.size(); ++i)
    stop_transfers_[transfers_[i].from_stop].push_back(static_cast<int>(i));
  stop_visits_.assign(stops_.size(), {});
  pattern_fifo_.assign(patterns_.size(), 0);
  for (std::size_t p = 0; p < patterns_.size(); ++p) {
    pattern_fifo_[p] = patterns_[p].is_fifo() ? 1 : 0;
    for (std::size_t i = 0; i < patterns_[p].stops.size(); ++i)
      stop_visits_[patterns_[p].stops[i]].push_back({static_cast<int>(p), static_cast<int>(i)});
  }

  std::map<int, std::pair<double, double>> sums;
  std::map<int, int> counts;
  for (const auto& nd : nodes_) {
    auto& s = sums[nd.zone];
    s.first += nd.x;
    s.second += nd.y;
    ++counts[nd.zone];
  }
  zone_ids_.clear();
  centroid_.clear();
  for (auto& [zone, s] : sums) {
    zone_ids_.push_back(zone);
    const double cx = s.first / counts[zone], cy = s.second / counts[zone];
    int best = -1;
    double best_d = kInf;
    for (std::size_t i = 0; i < n; ++i) {
      if (nodes_[i].zone != zone) continue;
      const double d = dist(cx, cy, nodes_[i].x, nodes_[i].y);
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(i);
      }
    }
    centroid_[zone] = best;
  }
}

int MultimodalGraph::node_index(int node_id) const {
  auto it = node_by_id_.find(node_id);
  return it == node_by_id_.end() ? -1 : it->second;
}

int MultimodalGraph::inaccessible_stop_count() const {
  return static_cast<int>(std::count_if(stops_.begin(), stops_.end(),
                                        [](const TransitStop& s) { return !s.accessible; }));
}

int MultimodalGraph::zone_centroid(int zone) const {
  auto it = centroid_.find(zone);
  return it == centroid_.end() ? -1 : it->second;
}

double MultimodalGraph::straight_distance(int a, int b) const {
  return dist(nodes_[a].x, nodes_[a].y, nodes_[b].x, nodes_[b].y);
}

double MultimodalGraph::heuristic_seconds(int a, int b, double max_speed) const {
  if (!(max_speed > 0.0)) return 0.0;
  return straight_distance(a, b) * heuristic_scale_ / max_speed;
}

double MultimodalGraph::max_free_flow(VehicleClass c) const {
  return max_ffs_[static_cast<int>(c)];
}

MultimodalGraph MultimodalGraph::without_patterns(const std::vector<bool>& keep_pattern) const {
  MultimodalGraph g = *this;
  g.patterns_.clear();
  std::vector<char> served(stops_.size(), 0);
  for (std::size_t p = 0; p < patterns_.size(); ++p) {
    if (p < keep_pattern.size() && keep_pattern[p]) {
      g.patterns_.push_back(patterns_[p]);
      for (int s : patterns_[p].stops) served[s] = 1;
    }
  }
  g.access_.clear();
  for (const auto& a : access_)
    if (served[a.stop]) g.access_.push_back(a);
  g.transfers_.clear();
  for (const auto& t : transfers_)
    if (served[t.from_stop] && served[t.to_stop]) g.transfers_.push_back(t);
  g.index();
  return g;
}

bool MultimodalGraph::same_content(const MultimodalGraph& o) const {
  return nodes_ == o.nodes_ && links_ == o.links_ && stops_ == o.stops_ &&
         patterns_ == o.patterns_ && access_ == o.access_ && transfers_ == o.transfers_ &&
         params_ == o.params_;
}

std::string MultimodalGraph::to_json() const {
  json j;
  j["format"] = "transitsim-graph";
  j["version"] = 1;
  json cf = json::array();
  for (const auto& f : params_.class_defaults) cf.push_back({f.ffs, f.jam});
  j["params"] = {{"walk_speed", params_.walk_speed},
                 {"bike_speed", params_.bike_speed},
                 {"max_access_walk", params_.max_access_walk},
                 {"park_time", params_.park_time},
                 {"class_factors", cf}};
  json nodes = json::array();
  for (const auto& n : nodes_) nodes.push_back({n.id, n.x, n.y, n.zone});
  j["nodes"] = std::move(nodes);
  json links = json::array();
  for (const auto& l : links_) {
    json f = json::array();
    for (const auto& c : l.factors) f.push_back({c.ffs, c.jam});
    links.push_back({{"id", l.id},
                     {"from", nodes_[l.from].id},
                     {"to", nodes_[l.to].id},
                     {"length", l.length},
                     {"lanes", l.lanes},
                     {"ffs", l.free_flow_speed},
                     {"jam_spacing", l.jam_spacing},
                     {"wave_speed", l.wave_speed},
                     {"modes", mode_mask_string(l.modes)},
                     {"congestable", l.congestable},
                     {"class_factors", f}});
  }
  j["links"] = std::move(links);
  json stops = json::array();
  for (const auto& s : stops_) {
    stops.push_back({{"id", s.gtfs_id},
                     {"name", s.name},
                     {"x", s.x},
                     {"y", s.y},
                     {"node", nodes_[s.node].id},
                     {"park_and_ride", s.park_and_ride},
                     {"accessible", s.accessible}});
  }
  j["stops"] = std::move(stops);
  json pats = json::array();
  for (const auto& p : patterns_) {
    json trips = json::array();
    for (const auto& t : p.trips)
      trips.push_back({{"trip_id", t.trip_id}, {"arr", t.arrivals}, {"dep", t.departures}});
    pats.push_back({{"route_id", p.route_id},
                    {"agency", p.agency},
                    {"mode", to_string(p.mode)},
                    {"stops", p.stops},
                    {"seat_capacity", p.seat_capacity},
                    {"crush_capacity", p.crush_capacity},
                    {"trips", std::move(trips)}});
  }
  j["patterns"] = std::move(pats);
  json acc = json::array();
  for (const auto& a : access_)
    acc.push_back({a.stop, nodes_[a.node].id, a.distance,
                   a.kind == AccessKind::walk ? "walk" : "drive"});
  j["access_edges"] = std::move(acc);
  json tr = json::array();
  for (const auto& t : transfers_) tr.push_back({t.from_stop, t.to_stop, t.distance});
  j["transfer_edges"] = std::move(tr);
  j["warnings"] = warnings_;
  return j.dump(1);
}

MultimodalGraph MultimodalGraph::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("graph json: ") + e.what());
  }
  if (j.value("format", "") != "transitsim-graph") throw ParseError("graph json: wrong format tag");
  MultimodalGraph g;
  try {
    const auto& p = j.at("params");
    g.params_.walk_speed = p.at("walk_speed");
    g.params_.bike_speed = p.at("bike_speed");
    g.params_.max_access_walk = p.at("max_access_walk");
    g.params_.park_time = p.at("park_time");
    for (int c = 0; c < kVehicleClasses; ++c) {
      g.params_.class_defaults[c].ffs = p.at("class_factors").at(c).at(0);
      g.params_.class_defaults[c].jam = p.at("class_factors").at(c).at(1);
    }
    std::unordered_map<int, int> idx;
    for (const auto& n : j.at("nodes")) {
      Node nd{n.at(0).get<int>(), n.at(1).get<double>(), n.at(2).get<double>(), n.at(3).get<int>()};
      idx[nd.id] = static_cast<int>(g.nodes_.size());
      g.nodes_.push_back(nd);
    }
    auto node_ref = [&](const json& v) {
      auto it = idx.find(v.get<int>());
      if (it == idx.end()) throw ParseError("graph json: dangling node reference");
      return it->second;
    };
    for (const auto& lj : j.at("links")) {
      Link l;
      l.id = lj.at("id");
      l.from = node_ref(lj.at("from"));
      l.to = node_ref(lj.at("to"));
      l.length = lj.at("length");
      l.lanes = lj.at("lanes");
      l.free_flow_speed = lj.at("ffs");
      l.jam_spacing = lj.at("jam_spacing");
      l.wave_speed = lj.at("wave_speed");
      l.modes = parse_mode_mask(lj.at("modes").get<std::string>());
      l.congestable = lj.at("congestable");
      for (int c = 0; c < kVehicleClasses; ++c) {
        l.factors[c].ffs = lj.at("class_factors").at(c).at(0);
        l.factors[c].jam = lj.at("class_factors").at(c).at(1);
      }
      g.links_.push_back(l);
    }
    for (const auto& sj : j.at("stops")) {
      TransitStop s;
      s.gtfs_id = sj.at("id");
      s.name = sj.at("name");
      s.x = sj.at("x");
      s.y = sj.at("y");
      s.node = node_ref(sj.at("node"));
      s.park_and_ride = sj.at("park_and_ride");
      s.accessible = sj.at("accessible");
      g.stops_.push_back(std::move(s));
    }
    for (const auto& pj : j.at("patterns")) {
      TransitPattern p;
      p.route_id = pj.at("route_id");
      p.agency = pj.at("agency");
      p.mode = transit_mode_from_string(pj.at("mode"));
      p.stops = pj.at("stops").get<std::vector<int>>();
      p.seat_capacity = pj.at("seat_capacity");
      p.crush_capacity = pj.at("crush_capacity");
      for (const auto& tj : pj.at("trips")) {
        TransitTrip t;
        t.trip_id = tj.at("trip_id");
        t.arrivals = tj.at("arr").get<std::vector<double>>();
        t.departures = tj.at("dep").get<std::vector<double>>();
        p.trips.push_back(std::move(t));
      }
      for (int s : p.stops)
        if (s < 0 || s >= static_cast<int>(g.stops_.size()))
          throw ParseError("graph json: pattern references unknown stop");
      g.patterns_.push_back(std::move(p));
    }
    for (const auto& a : j.at("access_edges")) {
      AccessEdge e;
      e.stop = a.at(0);
      e.node = node_ref(a.at(1));
      e.distance = a.at(2);
      e.kind = a.at(3).get<std::string>() == "drive" ? AccessKind::drive : AccessKind::walk;
      if (e.stop < 0 || e.stop >= static_cast<int>(g.stops_.size()))
        throw ParseError("graph json: access edge references unknown stop");
      g.access_.push_back(e);
    }
    for (const auto& t : j.at("transfer_edges")) {
      TransferEdge e{t.at(0).get<int>(), t.at(1).get<int>(), t.at(2).get<double>()};
      const int ns = static_cast<int>(g.stops_.size());
      if (e.from_stop < 0 || e.from_stop >= ns || e.to_stop < 0 || e.to_stop >= ns)
        throw ParseError("graph json: transfer edge references unknown stop");
      g.transfers_.push_back(e);
    }
    if (j.contains("warnings")) g.warnings_ = j.at("warnings").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("graph json: ") + e.what());
  }
  g.index();
  return g;
}

}  // namespace transitsim
