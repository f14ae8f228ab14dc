#pragma once

// Single-activity commuters and the small uncongested grid they drive on.

#include "support.hpp"
#include "transitsim/equilibrium.hpp"

namespace tstest {

inline Activity work(long long id, int person, Seconds start) {
  Activity a;
  a.id = id;
  a.person = person;
  a.type = ActivityType::work;
  a.planned_start = start;
  a.planned_duration = 4 * 3600;
  a.min_duration = 2 * 3600;
  a.latest_end = start + 6 * 3600;
  a.mandatory = true;
  return a;
}

inline AgentDay commuter(int person, int home, int dest, Seconds start) {
  AgentDay ag;
  ag.person = person;
  ag.household = person;
  ag.home_node = home;
  ag.car = true;
  ag.activities = {work(person, person, start)};
  ag.nodes = {dest};
  return ag;
}

inline ChoiceContext drive_only() {
  ChoiceContext ctx;
  ctx.seed = 99;
  ctx.mode.walk_max_distance = 0;
  ctx.mode.bike_max_distance = 0;
  return ctx;
}

// 60 commuters spread two minutes apart on a 6 x 6 grid; nobody ever queues.
struct UncongestedGrid {
  MultimodalGraph g;
  std::vector<AgentDay> agents;
};

inline UncongestedGrid uncongested_grid() {
  auto r = grid_roadway(6, 6, 400, 15);
  for (auto& n : r.nodes) n.zone = 1 + (n.x >= 1200 ? 1 : 0) + (n.y >= 1200 ? 2 : 0);
  UncongestedGrid u{make_graph(r), {}};
  Rng rng(3);
  for (int i = 0; i < 60; ++i) {
    const int home = static_cast<int>(rng.below(36));
    int dest = static_cast<int>(rng.below(36));
    if (dest == home) dest = (home + 7) % 36;
    u.agents.push_back(commuter(i, home, dest, 6 * 3600 + 120.0 * i));
  }
  return u;
}

}  // namespace tstest
