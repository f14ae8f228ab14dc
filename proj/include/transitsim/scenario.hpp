#pragma once

#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "transitsim/demand.hpp"
#include "transitsim/network.hpp"

namespace transitsim {

enum class OwnershipRule : std::uint8_t { none, paper_rule };
OwnershipRule ownership_rule_from_string(const std::string& s);
const char* key(OwnershipRule r);

struct ScenarioSpec {
  std::string name = "baseline";
  bool transit_removal = false;
  std::vector<std::string> removed_agencies;  // empty with transit_removal: every agency
  OwnershipRule ownership = OwnershipRule::none;
  nlohmann::json overrides = nlohmann::json::object();  // merged over the run config

  bool is_baseline() const {
    return !transit_removal && ownership == OwnershipRule::none && overrides.empty();
  }
};

// Drops the selected agencies' patterns together with the access and
// transfer edges of stops no longer served. Roadway, walk and bike layers
// are untouched.
MultimodalGraph apply_transit_removal(const MultimodalGraph& g,
                                      const std::vector<std::string>& agencies = {});

// 0 cars -> 1, 1 -> 2, more unchanged.
std::vector<Household> apply_ownership_rule(const std::vector<Household>& households);

long long fleet_size(const std::vector<Household>& households);

// Graph and households for a scenario, derived from baseline inputs.
MultimodalGraph scenario_graph(const MultimodalGraph& baseline, const ScenarioSpec& s);
std::vector<Household> scenario_households(const std::vector<Household>& baseline, const ScenarioSpec& s);

}  // namespace transitsim
