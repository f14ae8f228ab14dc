#include "transitsim/scenario.hpp"

#include <algorithm>

namespace transitsim {

OwnershipRule ownership_rule_from_string(const std::string& s) {
  if (s == "none") return OwnershipRule::none;
  if (s == "paper_rule" || s == "add_one_below_two") return OwnershipRule::paper_rule;
  throw ConfigError("unknown ownership rule '" + s + "'");
}

const char* key(OwnershipRule r) { return r == OwnershipRule::none ? "none" : "paper_rule"; }

MultimodalGraph apply_transit_removal(const MultimodalGraph& g, const std::vector<std::string>& agencies) {
  std::vector<bool> keep(g.patterns().size(), true);
  for (std::size_t p = 0; p < keep.size(); ++p) {
    const auto& a = g.patterns()[p].agency;
    keep[p] = !agencies.empty() && std::find(agencies.begin(), agencies.end(), a) == agencies.end();
  }
  return g.without_patterns(keep);
}

std::vector<Household> apply_ownership_rule(const std::vector<Household>& households) {
  std::vector<Household> out = households;
  for (auto& h : out)
    if (h.vehicles < 2) h.vehicles += 1;
  return out;
}

long long fleet_size(const std::vector<Household>& households) {
  long long n = 0;
  for (const auto& h : households) n += h.vehicles;
  return n;
}

MultimodalGraph scenario_graph(const MultimodalGraph& baseline, const ScenarioSpec& s) {
  return s.transit_removal ? apply_transit_removal(baseline, s.removed_agencies) : baseline;
}

std::vector<Household> scenario_households(const std::vector<Household>& baseline, const ScenarioSpec& s) {
  return s.ownership == OwnershipRule::paper_rule ? apply_ownership_rule(baseline) : baseline;
}

}  // namespace transitsim
