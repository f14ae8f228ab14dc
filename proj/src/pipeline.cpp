#include "transitsim/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <spdlog/spdlog.h>

#include "transitsim/csv.hpp"

namespace transitsim {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr std::uint64_t kTagHomeNode = 0x686f6d65, kTagActNode = 0x6e6f6465, kTagDest = 0x64657374;
const std::string kHashPrefix = "# config_hash: ";

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + p.string());
  out << text;
  if (!out) throw ConfigError("write failed: " + p.string());
}

// A CSV artifact: first line carries the config hash.
struct CsvOut {
  std::ostringstream s;
  explicit CsvOut(const std::string& hash, const std::vector<std::string>& header) {
    s << kHashPrefix << hash << '\n';
    csv::write_row(s, header);
  }
  void row(const std::vector<std::string>& f) { csv::write_row(s, f); }
};

std::string num(double v) { return csv::fmt_double(v); }
std::string num(long long v) { return std::to_string(v); }
std::string num(int v) { return std::to_string(v); }

// Reads a hashed CSV artifact; an empty `expect` skips the hash check.
csv::Table read_artifact(const fs::path& p, const std::string& expect) {
  if (!fs::exists(p)) throw ConfigError("missing artifact " + p.string() + " (run the earlier stage first)");
  std::string text = slurp(p);
  if (text.rfind(kHashPrefix, 0) != 0) throw ConfigError(p.string() + " has no config hash line");
  const auto eol = text.find('\n');
  const std::string hash = text.substr(kHashPrefix.size(), eol - kHashPrefix.size());
  if (!expect.empty() && hash != expect)
    throw ConfigError("stale artifact " + p.string() + ": built with config " + hash + ", current config is " +
                      expect + "; rerun the earlier stages");
  return csv::Table::parse(std::string_view(text).substr(eol + 1), p.string());
}

fs::path graph_path(const RunConfig& cfg, const std::string& scenario) {
  return cfg.out_dir / ("graph." + scenario + ".json");
}

fs::path run_dir(const RunConfig& cfg, const std::string& scenario) { return cfg.out_dir / scenario; }

int to_i(const csv::Table& t, std::size_t r, std::size_t c, const char* what) {
  return static_cast<int>(csv::to_int(t.at(r, c), t, what));
}

DestinationParams destination_params(const RunConfig& cfg, const std::vector<ZoneRecord>& zones) {
  DestinationParams d;
  d.beta_tt = cfg.beta_tt;
  for (const auto& z : zones) d.attractors[z.zone] = z.attractors;
  return d;
}

void write_json(const fs::path& p, const json& j) { spit(p, j.dump(1) + "\n"); }

}  // namespace

std::map<int, std::vector<int>> zone_nodes(const MultimodalGraph& g) {
  std::vector<char> in(g.nodes().size(), 0), out(g.nodes().size(), 0);
  for (const auto& l : g.links()) {
    if (!l.allows(kAuto)) continue;
    out[l.from] = 1;
    in[l.to] = 1;
  }
  std::map<int, std::vector<int>> z;
  for (std::size_t n = 0; n < g.nodes().size(); ++n)
    if (in[n] && out[n]) z[g.nodes()[n].zone].push_back(static_cast<int>(n));
  return z;
}

Synthesis synthesize(const MultimodalGraph& g, const RunConfig& cfg) {
  const auto zones = read_zones(cfg.zones_csv);
  const auto znodes = zone_nodes(g);
  PopulationConfig pc = cfg.population;
  pc.zone_weights.clear();
  for (const auto& z : zones) {
    if (!znodes.count(z.zone)) throw ConfigError("zone " + std::to_string(z.zone) + " has no drivable node");
    if (z.households > 0) pc.zone_weights[z.zone] = z.households;
  }
  const DestinationParams dest = destination_params(cfg, zones);
  // Free-flow morning skims for destination choice.
  const TravelTimeProfile ff(g);
  const Skims skims = drive_skims(g, ff, 8 * 3600.0);
  Population pop = synthesize_population(pc, dest, cfg.seed, &skims);

  auto pick = [&](int zone, std::uint64_t tag, long long id) {
    const auto& c = znodes.at(zone);
    Rng r(stream_seed(cfg.seed, tag, static_cast<std::uint64_t>(id)));
    return c[r.below(c.size())];
  };

  Synthesis s;
  s.households = pop.households;
  s.persons = pop.persons;
  for (const auto& h : s.households) s.home_node.push_back(pick(h.home_zone, kTagHomeNode, h.id));
  for (const auto& p : s.persons) {
    const auto& hh = s.households[p.household];
    auto acts = resolve_conflicts(generate_activities(p, hh, cfg.activities, cfg.seed));
    int origin = hh.home_zone;
    for (auto& a : acts) {
      if (a.zone < 0 && !a.mandatory && a.type != ActivityType::work_at_home) {
        Rng r(stream_seed(cfg.seed, kTagDest, static_cast<std::uint64_t>(a.id)));
        a.zone = choose_destination(a, origin, skims, dest, r);
      }
      if (a.zone < 0) a.zone = hh.home_zone;
      if (!znodes.count(a.zone)) throw ConfigError("activity zone " + std::to_string(a.zone) + " has no node");
      s.activity_node[a.id] =
          a.type == ActivityType::work_at_home ? s.home_node[hh.id] : pick(a.zone, kTagActNode, a.id);
      origin = a.zone;
    }
    if (!acts.empty()) s.activities[p.id] = std::move(acts);
  }
  return s;
}

std::vector<AgentDay> make_agents(const Synthesis& s, const std::vector<Household>& households) {
  std::vector<char> car(s.persons.size(), 0);
  for (const auto& h : households) {
    std::vector<int> eligible;
    for (int m : h.members)
      if (s.persons[m].age >= 16) eligible.push_back(m);
    std::stable_sort(eligible.begin(), eligible.end(), [&](int a, int b) {
      if (s.persons[a].worker != s.persons[b].worker) return s.persons[a].worker;
      return a < b;
    });
    for (int i = 0; i < static_cast<int>(eligible.size()) && i < h.vehicles; ++i) car[eligible[i]] = 1;
  }
  std::vector<AgentDay> out;
  for (const auto& [pid, acts] : s.activities) {
    const Person& p = s.persons[pid];
    AgentDay a;
    a.person = pid;
    a.household = p.household;
    a.home_node = s.home_node[p.household];
    a.car = car[pid] != 0;
    a.activities = acts;
    for (const auto& act : acts) a.nodes.push_back(s.activity_node.at(act.id));
    out.push_back(std::move(a));
  }
  return out;
}

void write_synthesis(const Synthesis& s, const fs::path& dir, const std::string& hash) {
  CsvOut hh(hash, {"household_id", "home_zone", "home_node", "income", "income_quintile", "vehicles"});
  for (const auto& h : s.households)
    hh.row({num(h.id), num(h.home_zone), num(s.home_node[h.id]), num(h.income), num(h.income_quintile),
            num(h.vehicles)});
  CsvOut pp(hash, {"person_id", "household_id", "gender", "age", "worker", "student", "work_zone", "school_zone"});
  for (const auto& p : s.persons)
    pp.row({num(p.id), num(p.household), p.gender == Gender::female ? "female" : "male", num(p.age),
            p.worker ? "1" : "0", p.student ? "1" : "0", num(p.work_zone), num(p.school_zone)});
  CsvOut aa(hash, {"activity_id", "person_id", "type", "zone", "node", "planned_start", "planned_duration",
                   "min_duration", "latest_end", "mandatory", "care", "joint"});
  for (const auto& [pid, acts] : s.activities)
    for (const auto& a : acts)
      aa.row({num(a.id), num(a.person), key(a.type), num(a.zone), num(s.activity_node.at(a.id)),
              num(a.planned_start), num(a.planned_duration), num(a.min_duration), num(a.latest_end),
              a.mandatory ? "1" : "0", a.care ? "1" : "0", a.joint ? "1" : "0"});
  spit(dir / "households.csv", hh.s.str());
  spit(dir / "persons.csv", pp.s.str());
  spit(dir / "activities.csv", aa.s.str());
}

Synthesis read_synthesis(const fs::path& dir, const std::string& hash) {
  Synthesis s;
  {
    const auto t = read_artifact(dir / "households.csv", hash);
    const auto ci = t.column("household_id"), cz = t.column("home_zone"), cn = t.column("home_node"),
               cin = t.column("income"), cq = t.column("income_quintile"), cv = t.column("vehicles");
    for (std::size_t r = 0; r < t.size(); ++r) {
      Household h;
      h.id = to_i(t, r, ci, "household_id");
      if (h.id != static_cast<int>(r)) throw ParseError(t.source() + ": household ids must be 0..n-1 in order");
      h.home_zone = to_i(t, r, cz, "home_zone");
      h.income = csv::to_double(t.at(r, cin), t, "income");
      h.income_quintile = to_i(t, r, cq, "income_quintile");
      h.vehicles = to_i(t, r, cv, "vehicles");
      s.households.push_back(h);
      s.home_node.push_back(to_i(t, r, cn, "home_node"));
    }
  }
  {
    const auto t = read_artifact(dir / "persons.csv", hash);
    const auto ci = t.column("person_id"), ch = t.column("household_id"), cg = t.column("gender"),
               ca = t.column("age"), cw = t.column("worker"), cs = t.column("student"), cwz = t.column("work_zone"),
               csz = t.column("school_zone");
    for (std::size_t r = 0; r < t.size(); ++r) {
      Person p;
      p.id = to_i(t, r, ci, "person_id");
      if (p.id != static_cast<int>(r)) throw ParseError(t.source() + ": person ids must be 0..n-1 in order");
      p.household = to_i(t, r, ch, "household_id");
      if (p.household < 0 || p.household >= static_cast<int>(s.households.size()))
        throw ParseError(t.source() + ": unknown household for person " + std::to_string(p.id));
      const std::string& g = t.at(r, cg);
      if (g != "female" && g != "male") throw ParseError(t.source() + ": bad gender '" + g + "'");
      p.gender = g == "female" ? Gender::female : Gender::male;
      p.age = to_i(t, r, ca, "age");
      p.worker = t.at(r, cw) == "1";
      p.student = t.at(r, cs) == "1";
      p.work_zone = to_i(t, r, cwz, "work_zone");
      p.school_zone = to_i(t, r, csz, "school_zone");
      s.households[p.household].members.push_back(p.id);
      s.persons.push_back(p);
    }
  }
  {
    const auto t = read_artifact(dir / "activities.csv", hash);
    const auto ci = t.column("activity_id"), cp = t.column("person_id"), ct = t.column("type"),
               cz = t.column("zone"), cn = t.column("node"), cs = t.column("planned_start"),
               cd = t.column("planned_duration"), cm = t.column("min_duration"), cl = t.column("latest_end"),
               cma = t.column("mandatory"), cc = t.column("care"), cj = t.column("joint");
    for (std::size_t r = 0; r < t.size(); ++r) {
      Activity a;
      a.id = csv::to_int(t.at(r, ci), t, "activity_id");
      a.person = to_i(t, r, cp, "person_id");
      if (a.person < 0 || a.person >= static_cast<int>(s.persons.size()))
        throw ParseError(t.source() + ": unknown person " + std::to_string(a.person));
      a.type = activity_type_from_key(t.at(r, ct));
      a.zone = to_i(t, r, cz, "zone");
      a.planned_start = csv::to_double(t.at(r, cs), t, "planned_start");
      a.planned_duration = csv::to_double(t.at(r, cd), t, "planned_duration");
      a.min_duration = csv::to_double(t.at(r, cm), t, "min_duration");
      a.latest_end = csv::to_double(t.at(r, cl), t, "latest_end");
      a.mandatory = t.at(r, cma) == "1";
      a.care = t.at(r, cc) == "1";
      a.joint = t.at(r, cj) == "1";
      s.activity_node[a.id] = to_i(t, r, cn, "node");
      s.activities[a.person].push_back(a);
    }
  }
  return s;
}

std::string population_hash(const fs::path& dir) {
  std::uint64_t h = fnv1a(slurp(dir / "households.csv"));
  h = fnv1a(slurp(dir / "persons.csv"), h);
  h = fnv1a(slurp(dir / "activities.csv"), h);
  return hex64(h);
}

MultimodalGraph load_graph_artifact(const fs::path& file, const std::string& hash) {
  if (!fs::exists(file)) throw ConfigError("missing artifact " + file.string() + " (run build first)");
  const std::string text = slurp(file);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(file.string() + ": " + e.what());
  }
  const std::string got = j.value("config_hash", "");
  if (got != hash)
    throw ConfigError("stale artifact " + file.string() + ": built with config " + got + ", current config is " +
                      hash + "; rerun build");
  return MultimodalGraph::from_json(text);
}

void write_outcomes(const fs::path& file, const std::vector<ActivityOutcome>& outcomes, const std::string& hash) {
  CsvOut o(hash, {"activity_id", "person_id", "type", "zone", "status", "realized_start", "realized_duration",
                  "reason"});
  for (const auto& x : outcomes)
    o.row({num(x.activity), num(x.person), key(x.type), num(x.zone), key(x.status), num(x.realized_start),
           num(x.realized_duration), key(x.reason)});
  spit(file, o.s.str());
}

std::vector<ActivityOutcome> read_outcomes(const fs::path& file) {
  const auto t = read_artifact(file, "");
  const auto ci = t.column("activity_id"), cp = t.column("person_id"), ct = t.column("type"),
             cz = t.column("zone"), cs = t.column("status"), crs = t.column("realized_start"),
             crd = t.column("realized_duration"), cr = t.column("reason");
  std::vector<ActivityOutcome> out;
  for (std::size_t r = 0; r < t.size(); ++r) {
    ActivityOutcome o;
    o.activity = csv::to_int(t.at(r, ci), t, "activity_id");
    o.person = to_i(t, r, cp, "person_id");
    o.type = activity_type_from_key(t.at(r, ct));
    o.zone = to_i(t, r, cz, "zone");
    const std::string& st = t.at(r, cs);
    bool ok = false;
    for (auto s : {OutcomeStatus::completed, OutcomeStatus::shortened, OutcomeStatus::postponed,
                   OutcomeStatus::cancelled})
      if (st == key(s)) o.status = s, ok = true;
    if (!ok) throw ParseError(t.source() + ": bad status '" + st + "'");
    o.realized_start = csv::to_double(t.at(r, crs), t, "realized_start");
    o.realized_duration = csv::to_double(t.at(r, crd), t, "realized_duration");
    const std::string& rs = t.at(r, cr);
    ok = false;
    for (auto c : {CancelReason::none, CancelReason::untravelable, CancelReason::too_late, CancelReason::cascade})
      if (rs == key(c)) o.reason = c, ok = true;
    if (!ok) throw ParseError(t.source() + ": bad reason '" + rs + "'");
    out.push_back(o);
  }
  return out;
}

void cmd_build(const RunConfig& cfg) {
  spdlog::info("[build] reading roadway {} / {}", cfg.nodes_csv.string(), cfg.links_csv.string());
  RoadwayData road = read_roadway(cfg.nodes_csv, cfg.links_csv, cfg.network);
  GtfsFeed feed;
  if (cfg.gtfs_dir) {
    spdlog::info("[build] reading GTFS {} for {}", cfg.gtfs_dir->string(), cfg.service_date);
    feed = parse_gtfs(*cfg.gtfs_dir, ServiceDate::parse(cfg.service_date), cfg.gtfs);
  }
  const MultimodalGraph base = MultimodalGraph::build(std::move(road), std::move(feed), cfg.network);
  for (const auto& w : base.warnings()) spdlog::warn("[build] {}", w);
  spdlog::info("[build] {} nodes, {} links, {} stops, {} patterns", base.nodes().size(), base.links().size(),
               base.stops().size(), base.patterns().size());
  for (const auto& s : cfg.scenarios) {
    const MultimodalGraph g = scenario_graph(base, s);
    json j = json::parse(g.to_json());
    j["config_hash"] = cfg.hash;
    const fs::path p = graph_path(cfg, s.name);
    spit(p, j.dump(1) + "\n");
    spdlog::info("[build] wrote {} ({} patterns)", p.string(), g.patterns().size());
  }
}

void cmd_synthesize(const RunConfig& cfg) {
  const MultimodalGraph g = load_graph_artifact(graph_path(cfg, cfg.baseline), cfg.hash);
  const Synthesis s = synthesize(g, cfg);
  std::size_t acts = 0;
  for (const auto& [p, a] : s.activities) acts += a.size();
  write_synthesis(s, cfg.out_dir, cfg.hash);
  spdlog::info("[synthesize] {} households, {} persons, {} activities", s.households.size(), s.persons.size(),
               acts);
}

RunSummary cmd_run(const RunConfig& base_cfg, const std::string& scenario, const RunOptions& opts) {
  const RunConfig cfg = scenario_config(base_cfg, scenario);
  const ScenarioSpec& spec = cfg.scenario(scenario);
  const MultimodalGraph g = load_graph_artifact(graph_path(cfg, scenario), cfg.hash);
  const Synthesis syn = read_synthesis(cfg.out_dir, cfg.hash);
  const auto households = scenario_households(syn.households, spec);
  const auto agents = make_agents(syn, households);
  spdlog::info("[run:{}] {} agents, fleet {}", scenario, agents.size(), fleet_size(households));

  SimParams sim = cfg.sim;
  sim.record_trajectories = opts.trajectories;
  EquilibriumParams eq = cfg.equilibrium;
  if (opts.max_iters) eq.max_iters = *opts.max_iters;
  const ChoiceContext choice{cfg.mode, cfg.los, cfg.seed};

  const fs::path dir = run_dir(cfg, scenario);
  fs::create_directories(dir);
  std::ofstream traj;
  if (opts.trajectories) {
    traj.open(dir / "trajectories.jsonl", std::ios::binary);
    if (!traj) throw ConfigError("cannot write " + (dir / "trajectories.jsonl").string());
  }
  auto log_iter = [&](const IterationRecord& r) {
    spdlog::info("[run:{}][iter {}] gap={:.5f} alpha={:.4f} veh_h={:.1f} speed={:.2f} cancelled={}", scenario, r.k,
                 r.gap, r.alpha, r.vehicle_hours, r.mean_speed, r.cancelled);
  };
  const EquilibriumResult res =
      run_to_convergence(g, agents, choice, sim, eq, log_iter, opts.trajectories ? &traj : nullptr);
  const DayResult& day = res.day;

  write_outcomes(dir / "outcomes.csv", day.outcomes, cfg.hash);
  {
    CsvOut o(cfg.hash, {"k", "alpha", "gap", "vehicle_hours", "mean_speed", "person_hours", "trips", "cancelled"});
    for (const auto& r : res.iterations)
      o.row({num(r.k), num(r.alpha), num(r.gap), num(r.vehicle_hours), num(r.mean_speed), num(r.person_hours),
             num(r.trips), num(r.cancelled)});
    spit(dir / "iterations.csv", o.s.str());
  }
  {
    CsvOut o(cfg.hash, {"link_id", "bin", "traversals", "mean_time", "free_flow_time"});
    const auto& rec = day.records;
    for (std::size_t l = 0; l < g.links().size(); ++l)
      for (int b = 0; b < kBinsPerDay; ++b) {
        const std::size_t i = l * kBinsPerDay + b;
        if (rec.count[i] == 0) continue;
        o.row({num(g.links()[l].id), num(b), num(rec.count[i]), num(rec.sum[i] / rec.count[i]),
               num(g.links()[l].free_flow_time())});
      }
    spit(dir / "linktimes.csv", o.s.str());
  }
  long long boardings = 0;
  {
    CsvOut o(cfg.hash, {"route_id", "pattern", "position", "stop_id", "boardings", "alightings", "denied"});
    for (const auto& b : day.boardings) {
      const auto& p = g.patterns()[b.pattern];
      o.row({p.route_id, num(b.pattern), num(b.position), g.stops()[p.stops[b.position]].gtfs_id, num(b.boardings),
             num(b.alightings), num(b.denied)});
      boardings += b.boardings;
    }
    spit(dir / "boardings.csv", o.s.str());
  }
  double transit_seconds = 0.0, all_seconds = 0.0;
  long long completed = 0;
  {
    CsvOut o(cfg.hash, {"person_id", "trip", "activity_id", "planned_mode", "mode", "origin_node", "dest_node",
                        "departure", "arrival", "predicted", "distance", "boardings", "reroutes", "mode_switched",
                        "gave_up"});
    for (const auto& t : day.trips) {
      o.row({num(t.person), num(t.trip), num(t.activity), key(t.planned_mode), key(t.mode),
             num(g.nodes()[t.origin_node].id), num(g.nodes()[t.dest_node].id), num(t.departure), num(t.arrival),
             num(t.predicted), num(t.distance), num(t.boardings), num(t.reroutes), t.mode_switched ? "1" : "0",
             t.gave_up ? "1" : "0"});
      if (!t.completed()) continue;
      ++completed;
      all_seconds += t.arrival - t.departure;
      if (is_transit(t.mode)) transit_seconds += t.arrival - t.departure;
    }
    spit(dir / "trips.csv", o.s.str());
  }

  RunSummary s;
  s.scenario = scenario;
  s.population_hash = population_hash(cfg.out_dir);
  s.fleet = fleet_size(households);
  s.vehicle_hours = day.vehicle_hours;
  s.transit_person_hours = transit_seconds / 3600.0;
  s.person_hours = day.person_hours;
  s.boardings = boardings;
  s.iterations = static_cast<int>(res.iterations.size());
  s.final_gap = res.iterations.back().gap;
  s.region = congestion_stats(g, day, nullptr);
  s.city = congestion_stats(g, day, &cfg.city_zones);
  s.modes = mode_share(day.trips);
  s.vehicles_in_network = day.vehicles_in_network;
  for (std::size_t b = 0; b < day.bin_vehicle_seconds.size(); ++b)
    s.speed_profile.push_back(day.bin_vehicle_seconds[b] > 0 ? day.bin_vehicle_meters[b] / day.bin_vehicle_seconds[b]
                                                             : 0.0);
  s.mean_person_trip_time = completed > 0 ? all_seconds / completed : 0.0;
  json sj = to_json(s);
  sj["config_hash"] = cfg.hash;
  sj["converged"] = res.converged;
  write_json(dir / "summary.json", sj);
  spdlog::info("[run:{}] done: {} iterations, final gap {:.5f}{}", scenario, s.iterations, s.final_gap,
               res.converged ? "" : " (not converged)");
  return s;
}

ImpactReport cmd_compare(const RunConfig& cfg, const std::string& a, const std::string& b) {
  cfg.scenario(a);
  cfg.scenario(b);
  auto load_summary = [&](const std::string& name) {
    const fs::path p = run_dir(cfg, name) / "summary.json";
    if (!fs::exists(p)) throw ConfigError("missing " + p.string() + " (run scenario '" + name + "' first)");
    json j;
    try {
      j = json::parse(slurp(p));
    } catch (const json::exception& e) {
      throw ParseError(p.string() + ": " + e.what());
    }
    if (j.value("config_hash", "") != cfg.hash)
      throw ConfigError("stale run " + p.string() + ": produced under another config; rerun it");
    return run_summary_from_json(j);
  };
  const RunSummary sa = load_summary(a), sb = load_summary(b);
  if (sa.population_hash != sb.population_hash)
    throw ConfigError("population hash mismatch between '" + a + "' (" + sa.population_hash + ") and '" + b +
                      "' (" + sb.population_hash + ")");
  const auto oa = read_outcomes(run_dir(cfg, a) / "outcomes.csv");
  const auto ob = read_outcomes(run_dir(cfg, b) / "outcomes.csv");
  const Synthesis syn = read_synthesis(cfg.out_dir, cfg.hash);
  if (population_hash(cfg.out_dir) != sa.population_hash)
    throw ConfigError("population files changed since the runs; rerun them");

  ReportInputs in;
  in.baseline = &sa;
  in.scenario = &sb;
  in.baseline_outcomes = &oa;
  in.scenario_outcomes = &ob;
  in.persons = &syn.persons;
  in.households = &syn.households;
  in.city = &cfg.city_zones;
  in.assumptions = cfg.economics;
  if (cfg.economics_households_from_population) in.assumptions.households = static_cast<double>(syn.households.size());
  const ImpactReport r = build_report(in);

  json j = to_json(r);
  j["config_hash"] = cfg.hash;
  j["population_hash"] = sa.population_hash;
  write_json(cfg.out_dir / "report.json", j);

  auto table_csv = [&](const CancellationTable& t, const fs::path& p) {
    CsvOut o(cfg.hash, {"activity_type", a, b, "change_pct"});
    for (const auto& row : t.rows)
      o.row({label(activity_type_from_key(row.type)), num(row.baseline), num(row.scenario),
             row.change_pct ? num(*row.change_pct) : "n/a"});
    o.row({"Total", num(t.total.baseline), num(t.total.scenario),
           t.total.change_pct ? num(*t.total.change_pct) : "n/a"});
    spit(p, o.s.str());
  };
  table_csv(r.region_table, cfg.out_dir / "tables" / "activities_region.csv");
  table_csv(r.city_table, cfg.out_dir / "tables" / "activities_city.csv");
  {
    CsvOut o(cfg.hash, {"category", "annual_dollars"});
    o.row({"activity_cancellations", num(r.economics.spending_total)});
    for (const auto& [cat, v] : r.economics.spending_by_category) o.row({"  " + cat, num(v)});
    o.row({"travel_time_losses", num(r.economics.net_vot)});
    o.row({"car_ownership_increase", num(r.economics.car_cost)});
    o.row({"grand_total", num(r.economics.grand_total)});
    o.row({"funding_ratio", num(r.economics.funding_ratio)});
    spit(cfg.out_dir / "tables" / "economic_losses.csv", o.s.str());
  }
  {
    CsvOut o(cfg.hash, {"partition", "group", "overall_count", "overall_share", "non_work_count", "non_work_share"});
    auto add = [&](const char* part, const GroupShares& gs) {
      for (std::size_t i = 0; i < gs.overall.size(); ++i)
        o.row({part, gs.overall[i].group, num(gs.overall[i].count),
               gs.overall[i].share ? num(*gs.overall[i].share) : "n/a", num(gs.non_work[i].count),
               gs.non_work[i].share ? num(*gs.non_work[i].share) : "n/a"});
    };
    add("gender", r.equity.gender);
    add("income_quintile", r.equity.quintile);
    spit(cfg.out_dir / "tables" / "equity.csv", o.s.str());
  }
  {
    CsvOut o(cfg.hash, {"zone", "by_home_zone", "by_activity_zone"});
    std::set<int> zs;
    for (const auto& [z, c] : r.equity.by_home_zone) zs.insert(z);
    for (const auto& [z, c] : r.equity.by_activity_zone) zs.insert(z);
    for (int z : zs) {
      auto h = r.equity.by_home_zone.find(z);
      auto ac = r.equity.by_activity_zone.find(z);
      o.row({num(z), num(h == r.equity.by_home_zone.end() ? 0LL : h->second),
             num(ac == r.equity.by_activity_zone.end() ? 0LL : ac->second)});
    }
    spit(cfg.out_dir / "tables" / "cancellations_by_zone.csv", o.s.str());
  }
  auto profile_csv = [&](const std::vector<double>& x, const std::vector<double>& y, const fs::path& p) {
    CsvOut o(cfg.hash, {"bin", "start", a, b});
    const std::size_t n = std::max(x.size(), y.size());
    for (std::size_t i = 0; i < n; ++i)
      o.row({num(static_cast<int>(i)), format_hms(static_cast<double>(i) * kBinSeconds), num(i < x.size() ? x[i] : 0.0),
             num(i < y.size() ? y[i] : 0.0)});
    spit(p, o.s.str());
  };
  profile_csv(sa.vehicles_in_network, sb.vehicles_in_network, cfg.out_dir / "plotdata" / "vehicles_in_network.csv");
  profile_csv(sa.speed_profile, sb.speed_profile, cfg.out_dir / "plotdata" / "speed_profile.csv");

  spdlog::info("[compare] {} vs {}: activities {:+.2f}%, grand total ${:.4g}", a, b,
               r.region_table.total.change_pct.value_or(0.0), r.economics.grand_total);
  return r;
}

json plan_to_json(const TripPlan& plan) {
  json legs = json::array();
  for (const auto& l : plan.legs)
    legs.push_back({{"kind", key(l.kind)},
                    {"ref", l.ref},
                    {"trip", l.trip},
                    {"stop", l.stop},
                    {"start", l.start},
                    {"duration", l.duration}});
  return {{"found", plan.found},
          {"mode", key(plan.mode)},
          {"departure", plan.departure},
          {"predicted_total", plan.predicted_total},
          {"generalized_cost", plan.generalized_cost},
          {"distance", plan.distance},
          {"boardings", plan.boardings()},
          {"legs", legs}};
}

json cmd_route(const RunConfig& cfg, const RouteRequest& req) {
  const MultimodalGraph g = load_graph_artifact(graph_path(cfg, req.scenario), cfg.hash);
  const int from = g.node_index(req.from_node_id), to = g.node_index(req.to_node_id);
  if (from < 0) throw ConfigError("unknown node " + std::to_string(req.from_node_id));
  if (to < 0) throw ConfigError("unknown node " + std::to_string(req.to_node_id));
  const TravelTimeProfile ff(g);
  TripPlan plan;
  switch (req.mode) {
    case TravelMode::drive:
      plan = shortest_path(g, ff, from, to, req.departure, UnimodalMode::drive, cfg.los.router);
      break;
    case TravelMode::walk:
      plan = shortest_path(g, ff, from, to, req.departure, UnimodalMode::walk, cfg.los.router);
      break;
    case TravelMode::bike:
      plan = shortest_path(g, ff, from, to, req.departure, UnimodalMode::bike, cfg.los.router);
      break;
    case TravelMode::walk_to_transit:
      plan = intermodal_path(g, ff, from, to, req.departure, AccessMode::walk, cfg.los.router);
      break;
    case TravelMode::drive_to_transit:
      plan = intermodal_path(g, ff, from, to, req.departure, AccessMode::drive, cfg.los.router);
      break;
  }
  plan.mode = req.mode;
  plan.departure = req.departure;
  json j = plan_to_json(plan);
  j["from"] = req.from_node_id;
  j["to"] = req.to_node_id;
  j["scenario"] = req.scenario;
  return j;
}

}  // namespace transitsim
