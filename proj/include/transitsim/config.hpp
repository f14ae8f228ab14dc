#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "transitsim/analytics.hpp"
#include "transitsim/equilibrium.hpp"
#include "transitsim/scenario.hpp"

namespace transitsim {

struct ZoneRecord {
  int zone = 0;
  double households = 0.0;  // home-location weight
  ZoneAttractors attractors;
};

struct RunConfig {
  nlohmann::json raw;  // as loaded, before scenario overrides
  std::string hash;    // hex FNV-1a of the canonical dump (minus "workers")
  std::filesystem::path base_dir;

  std::filesystem::path nodes_csv;
  std::filesystem::path links_csv;
  std::filesystem::path zones_csv;
  std::optional<std::filesystem::path> gtfs_dir;
  std::string service_date = "20250101";
  std::filesystem::path out_dir = "out";

  std::uint64_t seed = 1;
  int workers = 1;

  NetworkParams network;
  GtfsOptions gtfs;
  PopulationConfig population;
  ActivityParams activities = ActivityParams::defaults();
  double beta_tt = -0.08;
  ModeChoiceParams mode;
  LosParams los;
  SimParams sim;
  EquilibriumParams equilibrium;
  std::vector<ScenarioSpec> scenarios;
  std::string baseline = "baseline";
  std::set<int> city_zones;
  EconomicAssumptions economics = EconomicAssumptions::defaults();
  bool economics_households_from_population = true;

  const ScenarioSpec& scenario(const std::string& name) const;
};

// Strict parse: unknown keys anywhere are a ConfigError naming the key path.
// Relative paths resolve against `base_dir`; every input path must exist.
RunConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir);
RunConfig load_config(const std::filesystem::path& file);

// Config for one scenario: the scenario's overrides merged over the raw
// config and re-parsed. The hash stays the one of the full file.
RunConfig scenario_config(const RunConfig& base, const std::string& scenario);

std::string config_hash(const nlohmann::json& raw);

std::vector<ZoneRecord> read_zones(const std::filesystem::path& zones_csv);

}  // namespace transitsim
