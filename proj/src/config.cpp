#include "transitsim/config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "transitsim/csv.hpp"

namespace transitsim {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

// Reads keys off one JSON object and remembers which were consumed, so that
// anything left over can be reported as unknown.
class Obj {
 public:
  Obj(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j.is_object()) throw ConfigError("config '" + path_ + "' must be an object");
  }

  template <typename T>
  bool read(const char* k, T& out) {
    seen_.insert(k);
    auto it = j_.find(k);
    if (it == j_.end() || it->is_null()) return false;
    try {
      out = it->get<T>();
    } catch (const json::exception& e) {
      throw ConfigError("config '" + name(k) + "': " + e.what());
    }
    return true;
  }

  const json* find(const char* k) {
    seen_.insert(k);
    auto it = j_.find(k);
    return it == j_.end() || it->is_null() ? nullptr : &*it;
  }

  std::string name(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }

  void done() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) throw ConfigError("unknown config key '" + name(it.key()) + "'");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

std::map<int, double> int_keyed(const json& j, const std::string& what) {
  if (!j.is_object()) throw ConfigError("config '" + what + "' must be an object");
  std::map<int, double> out;
  for (auto it = j.begin(); it != j.end(); ++it) {
    try {
      out[std::stoi(it.key())] = it->get<double>();
    } catch (const std::exception&) {
      throw ConfigError("config '" + what + "." + it.key() + "' must map an integer to a number");
    }
  }
  return out;
}

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path q(p);
  return (q.is_absolute() ? q : base / q).lexically_normal();
}

fs::path existing(const fs::path& base, const std::string& p, const std::string& what) {
  const fs::path q = resolve(base, p);
  if (!fs::exists(q)) throw ConfigError(what + " not found: " + q.string());
  return q;
}

void parse_network(Obj o, NetworkParams& n) {
  o.read("walk_speed", n.walk_speed);
  o.read("bike_speed", n.bike_speed);
  o.read("max_access_walk", n.max_access_walk);
  o.read("park_time", n.park_time);
  o.done();
  if (!(n.walk_speed > 0 && n.bike_speed > 0 && n.max_access_walk >= 0 && n.park_time >= 0))
    throw ConfigError("network speeds must be positive and distances non-negative");
}

void parse_population(Obj o, PopulationConfig& p) {
  o.read("households", p.households);
  if (const json* j = o.find("household_size")) p.household_size = int_keyed(*j, "population.household_size");
  if (const json* j = o.find("vehicle_ownership"))
    p.vehicle_ownership = int_keyed(*j, "population.vehicle_ownership");
  o.read("income_median", p.income_median);
  o.read("income_sigma", p.income_sigma);
  o.read("vehicle_income_noise", p.vehicle_income_noise);
  o.read("female_share", p.female_share);
  o.read("age_brackets", p.age_brackets);
  o.read("worker_rate", p.worker_rate);
  o.read("student_rate", p.student_rate);
  o.done();
  if (p.households < 1) throw ConfigError("population.households must be >= 1");
}

void parse_activities(Obj o, ActivityParams& a) {
  auto per_type = [&](const char* k, auto setter) {
    if (const json* j = o.find(k)) {
      if (!j->is_object()) throw ConfigError(std::string("config 'activities.") + k + "' must be an object");
      for (auto it = j->begin(); it != j->end(); ++it) {
        const auto t = activity_type_from_key(it.key());
        if (!it->is_number()) throw ConfigError(std::string("config 'activities.") + k + "." + it.key() + "' must be a number");
        setter(a.types[static_cast<int>(t)], it->get<double>());
      }
    }
  };
  per_type("rates", [](ActivityTypeParams& t, double v) { t.rate = v; });
  per_type("duration_median", [](ActivityTypeParams& t, double v) { t.duration_median = v; });
  per_type("slack", [](ActivityTypeParams& t, double v) { t.slack = v; });
  per_type("joint_probability", [](ActivityTypeParams& t, double v) { t.joint_probability = v; });
  o.read("work_share", a.work_share);
  o.read("part_time_share", a.part_time_share);
  o.read("work_at_home_share", a.work_at_home_share);
  o.read("nonworker_rate_multiplier", a.nonworker_rate_multiplier);
  o.read("min_duration_floor", a.min_duration_floor);
  o.done();
  for (const auto& t : a.types)
    if (t.rate < 0 || t.joint_probability < 0 || t.joint_probability > 1)
      throw ConfigError("activity rates must be >= 0 and joint probabilities in [0, 1]");
}

void parse_mode(Obj o, ModeChoiceParams& m) {
  o.read("beta_ivt", m.beta_ivt);
  o.read("beta_wait", m.beta_wait);
  o.read("beta_walk", m.beta_walk);
  o.read("beta_cost", m.beta_cost);
  if (const json* j = o.find("asc")) {
    if (!j->is_object()) throw ConfigError("config 'mode_choice.asc' must be an object");
    for (auto it = j->begin(); it != j->end(); ++it)
      m.asc[static_cast<int>(travel_mode_from_key(it.key()))] = it->get<double>();
  }
  o.read("nest_scale", m.nest_scale);
  o.read("walk_max_distance", m.walk_max_distance);
  o.read("bike_max_distance", m.bike_max_distance);
  o.done();
  m.validate();
}

void parse_los(Obj o, LosParams& l) {
  o.read("auto_cost_per_km", l.auto_cost_per_km);
  o.read("transit_fare", l.transit_fare);
  o.read("wait_weight", l.router.wait_weight);
  o.read("walk_weight", l.router.walk_weight);
  o.read("ivt_weight", l.router.ivt_weight);
  o.read("max_boardings", l.router.max_boardings);
  o.done();
  if (l.router.max_boardings < 1) throw ConfigError("los.max_boardings must be >= 1");
}

void parse_sim(Obj o, SimParams& s) {
  o.read("dt", s.dt);
  o.read("reroute_factor", s.reroute_factor);
  o.read("min_dwell", s.min_dwell);
  o.read("board_seconds", s.board_seconds);
  o.read("alight_seconds", s.alight_seconds);
  o.read("max_wait", s.max_wait);
  o.read("postpone_tolerance", s.postpone_tolerance);
  o.read("late_tolerance", s.late_tolerance);
  double hours = s.horizon / 3600.0;
  if (o.read("horizon_hours", hours)) s.horizon = hours * 3600.0;
  o.read("deadlock_seconds", s.deadlock_seconds);
  o.read("check_invariants", s.check_invariants);
  o.read("trajectory_interval", s.trajectory_interval);
  o.done();
}

void parse_equilibrium(Obj o, EquilibriumParams& e) {
  o.read("max_iters", e.max_iters);
  o.read("gap_target", e.gap_target);
  double alpha = 0.0;
  if (o.read("alpha", alpha)) e.fixed_alpha = alpha;
  o.read("route_inertia", e.route_inertia);
  o.done();
  if (e.max_iters < 1) throw ConfigError("equilibrium.max_iters must be >= 1");
  if (e.fixed_alpha && !(*e.fixed_alpha > 0.0 && *e.fixed_alpha <= 1.0))
    throw ConfigError("equilibrium.alpha must be in (0, 1]");
}

ScenarioSpec parse_scenario(Obj o) {
  ScenarioSpec s;
  if (!o.read("name", s.name) || s.name.empty()) throw ConfigError("every scenario needs a name");
  o.read("transit_removal", s.transit_removal);
  o.read("agencies", s.removed_agencies);
  std::string rule = "none";
  o.read("ownership_rule", rule);
  s.ownership = ownership_rule_from_string(rule);
  if (const json* j = o.find("overrides")) {
    if (!j->is_object()) throw ConfigError("scenario '" + s.name + "' overrides must be an object");
    s.overrides = *j;
  }
  o.done();
  for (char c : s.name)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-'))
      throw ConfigError("scenario name '" + s.name + "' may only use letters, digits, '_' and '-'");
  return s;
}

void parse_economics(Obj o, EconomicAssumptions& a, bool& households_from_population) {
  o.read("vot_auto", a.vot_auto);
  o.read("vot_transit", a.vot_transit);
  o.read("weekdays_per_year", a.weekdays_per_year);
  o.read("occupancy_auto", a.occupancy_auto);
  o.read("annual_car_cost", a.annual_car_cost);
  households_from_population = !o.read("households", a.households);
  o.read("annual_transit_funding", a.annual_transit_funding);
  o.read("spending", a.spending);
  o.read("category_map", a.category_of);
  o.done();
  a.validate();
}

}  // namespace

const ScenarioSpec& RunConfig::scenario(const std::string& name) const {
  for (const auto& s : scenarios)
    if (s.name == name) return s;
  throw ConfigError("unknown scenario '" + name + "'");
}

std::string config_hash(const json& raw) {
  json j = raw;
  if (j.is_object()) j.erase("workers");
  return hex64(fnv1a(j.dump()));
}

RunConfig parse_config(const json& j, const fs::path& base_dir) {
  RunConfig c;
  c.raw = j;
  c.hash = config_hash(j);
  c.base_dir = base_dir;
  Obj root(j, "");

  const json* paths = root.find("paths");
  if (!paths) throw ConfigError("config needs a 'paths' block");
  {
    Obj p(*paths, "paths");
    std::string nodes, links, zones, gtfs, out = "out";
    if (!p.read("nodes", nodes) || !p.read("links", links) || !p.read("zones", zones))
      throw ConfigError("config 'paths' needs nodes, links and zones");
    c.nodes_csv = existing(base_dir, nodes, "nodes file");
    c.links_csv = existing(base_dir, links, "links file");
    c.zones_csv = existing(base_dir, zones, "zones file");
    if (p.read("gtfs", gtfs)) c.gtfs_dir = existing(base_dir, gtfs, "GTFS directory");
    p.read("out", out);
    c.out_dir = resolve(base_dir, out);
    p.done();
  }
  root.read("service_date", c.service_date);
  ServiceDate::parse(c.service_date);
  root.read("seed", c.seed);
  root.read("workers", c.workers);
  if (c.workers < 1) throw ConfigError("workers must be >= 1");

  if (const json* n = root.find("network")) parse_network(Obj(*n, "network"), c.network);
  if (const json* g = root.find("gtfs")) {
    Obj o(*g, "gtfs");
    o.read("seat_capacity", c.gtfs.seat_capacity);
    o.read("crush_capacity", c.gtfs.crush_capacity);
    o.done();
  }
  if (const json* p = root.find("population")) parse_population(Obj(*p, "population"), c.population);
  if (const json* a = root.find("activities")) parse_activities(Obj(*a, "activities"), c.activities);
  if (const json* d = root.find("destination")) {
    Obj o(*d, "destination");
    o.read("beta_tt", c.beta_tt);
    o.done();
    if (c.beta_tt > 0) throw ConfigError("destination.beta_tt must be <= 0");
  }
  if (const json* m = root.find("mode_choice")) parse_mode(Obj(*m, "mode_choice"), c.mode);
  if (const json* l = root.find("los")) parse_los(Obj(*l, "los"), c.los);
  if (const json* s = root.find("simulation")) parse_sim(Obj(*s, "simulation"), c.sim);
  if (const json* e = root.find("equilibrium")) parse_equilibrium(Obj(*e, "equilibrium"), c.equilibrium);
  if (const json* s = root.find("scenarios")) {
    if (!s->is_array()) throw ConfigError("config 'scenarios' must be an array");
    for (std::size_t i = 0; i < s->size(); ++i)
      c.scenarios.push_back(parse_scenario(Obj((*s)[i], "scenarios[" + std::to_string(i) + "]")));
  } else {
    c.scenarios.push_back(ScenarioSpec{});
  }
  if (const json* r = root.find("reporting")) {
    Obj o(*r, "reporting");
    o.read("baseline", c.baseline);
    std::vector<int> city;
    o.read("city_zones", city);
    c.city_zones = {city.begin(), city.end()};
    o.done();
  }
  if (const json* e = root.find("economics"))
    parse_economics(Obj(*e, "economics"), c.economics, c.economics_households_from_population);
  root.done();

  std::set<std::string> names;
  for (const auto& s : c.scenarios)
    if (!names.insert(s.name).second) throw ConfigError("duplicate scenario '" + s.name + "'");
  if (!c.scenario(c.baseline).is_baseline())
    throw ConfigError("baseline scenario '" + c.baseline + "' must not carry transforms or overrides");
  c.sim.mode = c.mode;
  c.sim.los = c.los;
  c.sim.workers = c.workers;
  return c;
}

RunConfig load_config(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open config " + file.string());
  std::stringstream ss;
  ss << in.rdbuf();
  json j;
  try {
    j = json::parse(ss.str());
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + file.string() + " is not valid JSON: " + e.what());
  }
  return parse_config(j, fs::absolute(file).parent_path());
}

RunConfig scenario_config(const RunConfig& base, const std::string& scenario) {
  const ScenarioSpec& s = base.scenario(scenario);
  if (s.overrides.empty()) return base;
  json merged = base.raw;
  merged.merge_patch(s.overrides);
  RunConfig c = parse_config(merged, base.base_dir);
  c.hash = base.hash;
  c.raw = base.raw;
  c.workers = base.workers;
  c.sim.workers = base.workers;
  c.out_dir = base.out_dir;
  return c;
}

std::vector<ZoneRecord> read_zones(const fs::path& zones_csv) {
  const auto t = csv::Table::read_file(zones_csv);
  const auto cz = t.column("zone_id");
  const auto ch = t.column("households");
  const auto ce = t.column("employment");
  const auto cr = t.column("retail");
  const auto cs = t.column("school");
  std::vector<ZoneRecord> out;
  std::set<int> seen;
  for (std::size_t i = 0; i < t.size(); ++i) {
    ZoneRecord z;
    z.zone = static_cast<int>(csv::to_int(t.at(i, cz), t, "zone_id"));
    z.households = csv::to_double(t.at(i, ch), t, "households");
    z.attractors.population = z.households;
    z.attractors.employment = csv::to_double(t.at(i, ce), t, "employment");
    z.attractors.retail = csv::to_double(t.at(i, cr), t, "retail");
    z.attractors.school = csv::to_double(t.at(i, cs), t, "school");
    if (z.households < 0 || z.attractors.employment < 0 || z.attractors.retail < 0 || z.attractors.school < 0)
      throw ParseError(t.source() + ": negative zone attribute for zone " + std::to_string(z.zone));
    if (!seen.insert(z.zone).second) throw ParseError(t.source() + ": duplicate zone " + std::to_string(z.zone));
    out.push_back(z);
  }
  return out;
}

}  // namespace transitsim
