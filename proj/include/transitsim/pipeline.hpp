#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "transitsim/config.hpp"

namespace transitsim {

// Households, persons and their planned activities with locations.
struct Synthesis {
  std::vector<Household> households;
  std::vector<Person> persons;
  std::vector<int> home_node;                          // per household
  std::map<int, std::vector<Activity>> activities;     // by person, time-ordered
  std::map<long long, int> activity_node;
};

// Zone -> candidate nodes (nodes with both entering and leaving drive links).
std::map<int, std::vector<int>> zone_nodes(const MultimodalGraph& g);

Synthesis synthesize(const MultimodalGraph& g, const RunConfig& cfg);

// Cars go to persons aged >= 16, workers first, then by id.
std::vector<AgentDay> make_agents(const Synthesis& s, const std::vector<Household>& households);

void write_synthesis(const Synthesis& s, const std::filesystem::path& dir, const std::string& config_hash);
// Throws ConfigError when the files are missing or were written under another config.
Synthesis read_synthesis(const std::filesystem::path& dir, const std::string& config_hash);
std::string population_hash(const std::filesystem::path& dir);

MultimodalGraph load_graph_artifact(const std::filesystem::path& file, const std::string& config_hash);

void write_outcomes(const std::filesystem::path& file, const std::vector<ActivityOutcome>& outcomes,
                    const std::string& config_hash);
std::vector<ActivityOutcome> read_outcomes(const std::filesystem::path& file);

struct RunOptions {
  std::optional<int> max_iters;
  bool trajectories = false;
};

struct RouteRequest {
  std::string scenario;
  int from_node_id = 0;
  int to_node_id = 0;
  Seconds departure = 8 * 3600.0;
  TravelMode mode = TravelMode::drive;
};

void cmd_build(const RunConfig& cfg);
void cmd_synthesize(const RunConfig& cfg);
RunSummary cmd_run(const RunConfig& cfg, const std::string& scenario, const RunOptions& opts = {});
ImpactReport cmd_compare(const RunConfig& cfg, const std::string& baseline, const std::string& scenario);
nlohmann::json cmd_route(const RunConfig& cfg, const RouteRequest& req);

nlohmann::json plan_to_json(const TripPlan& plan);

}  // namespace transitsim
