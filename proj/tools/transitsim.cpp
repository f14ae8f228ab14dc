// transitsim command-line driver.
#include <cstdlib>
#include <iostream>
#include <regex>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "transitsim/pipeline.hpp"

using namespace transitsim;

namespace {

// "HH:MM", "HH:MM:SS" or plain seconds.
Seconds parse_clock(const std::string& s) {
  static const std::regex hm(R"((\d{1,2}):(\d{2})(?::(\d{2}))?)");
  std::smatch m;
  if (std::regex_match(s, m, hm)) {
    const int mm = std::stoi(m[2]), ss = m[3].matched ? std::stoi(m[3]) : 0;
    if (mm > 59 || ss > 59) throw ConfigError("bad time '" + s + "'");
    return std::stoi(m[1]) * 3600.0 + mm * 60.0 + ss;
  }
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size() && v >= 0) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError("bad time '" + s + "' (use HH:MM or seconds)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multimodal activity-based transit scenario simulator"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path, out_dir;
  int workers = 0;
  bool quiet = false, verbose = false;
  app.add_option("--config", config_path, "JSON run config")->required()->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "Output directory (overrides paths.out)");
  app.add_option("--workers", workers, "Worker threads (results do not depend on this)")->check(CLI::PositiveNumber);
  app.add_flag("--quiet", quiet, "Warnings and errors only");
  app.add_flag("--verbose", verbose, "Debug logging");

  auto* build = app.add_subcommand("build", "Build per-scenario graph artifacts");
  auto* synth = app.add_subcommand("synthesize", "Synthesize population and activity plans");

  auto* run = app.add_subcommand("run", "Iterate one scenario to equilibrium");
  std::string run_scenario;
  int max_iters = 0;
  bool trajectories = false;
  run->add_option("--scenario", run_scenario, "Scenario name")->required();
  run->add_option("--max-iters", max_iters, "Override equilibrium.max_iters")->check(CLI::PositiveNumber);
  run->add_flag("--trajectories", trajectories, "Write trajectories.jsonl");

  auto* compare = app.add_subcommand("compare", "Compare two scenario runs");
  std::string cmp_a, cmp_b;
  compare->add_option("--baseline", cmp_a, "Baseline scenario (default: reporting.baseline)");
  compare->add_option("--scenario", cmp_b, "Scenario to compare")->required();

  auto* route = app.add_subcommand("route", "Print a free-flow route plan as JSON");
  std::string route_scenario = "baseline", route_mode = "drive", depart = "08:00";
  int from = 0, to = 0;
  route->add_option("--scenario", route_scenario, "Scenario graph to use");
  route->add_option("--from", from, "Origin node id")->required();
  route->add_option("--to", to, "Destination node id")->required();
  route->add_option("--depart", depart, "Departure time, HH:MM or seconds");
  route->add_option("--mode", route_mode, "drive, walk, bike, walk_to_transit or drive_to_transit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  spdlog::set_pattern("%^%l%$ %v");
  spdlog::set_level(quiet ? spdlog::level::warn : verbose ? spdlog::level::debug : spdlog::level::info);

  try {
    RunConfig cfg = load_config(config_path);
    if (!out_dir.empty()) cfg.out_dir = std::filesystem::absolute(out_dir);
    if (workers > 0) {
      cfg.workers = workers;
      cfg.sim.workers = workers;
    }
    if (*build) {
      cmd_build(cfg);
    } else if (*synth) {
      cmd_synthesize(cfg);
    } else if (*run) {
      RunOptions opts;
      if (max_iters > 0) opts.max_iters = max_iters;
      opts.trajectories = trajectories;
      cmd_run(cfg, run_scenario, opts);
    } else if (*compare) {
      cmd_compare(cfg, cmp_a.empty() ? cfg.baseline : cmp_a, cmp_b);
    } else if (*route) {
      RouteRequest req;
      req.scenario = route_scenario;
      req.from_node_id = from;
      req.to_node_id = to;
      req.departure = parse_clock(depart);
      req.mode = travel_mode_from_key(route_mode);
      std::cout << cmd_route(cfg, req).dump(2) << "\n";
    }
  } catch (const ConfigError& e) {
    spdlog::error("{}", e.what());
    return 1;
  } catch (const ParseError& e) {
    spdlog::error("{}", e.what());
    return 1;
  } catch (const std::exception& e) {
    spdlog::critical("internal error: {}", e.what());
    return 2;
  }
  return 0;
}
