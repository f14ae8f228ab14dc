#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "transitsim/simcore.hpp"

namespace transitsim {

struct EquilibriumParams {
  int max_iters = 20;
  double gap_target = 0.03;
  std::optional<double> fixed_alpha;  // unset: 1/k
  // Drive trips keep last iteration's route; those with a better route under the
  // experienced times switch to it with probability 1/k.
  bool route_inertia = true;
};

// h' = (1 - alpha) h + alpha e per link and bin, floored at free flow.
TravelTimeProfile mix_times(const TravelTimeProfile& historical, const TravelTimeProfile& experienced,
                            double alpha);

struct GapTerm {
  double experienced = 0.0;
  double best = 0.0;
  int trip = -1;               // index into the trip list
  std::vector<int> best_links;  // best-response route, empty if none better
};

// sum(max(0, experienced - best)) / sum(best); 0 when there are no terms.
double relative_gap(const std::vector<GapTerm>& terms);

// Per completed drive trip: cost of the driven route under `experienced`
// and the best-response cost from the same departure.
std::vector<GapTerm> gap_terms(const MultimodalGraph& g, const std::vector<TripRecord>& trips,
                               const TravelTimeProfile& experienced, int workers = 1);

struct IterationRecord {
  int k = 0;
  double alpha = 0.0;
  double gap = 0.0;
  double vehicle_hours = 0.0;
  double mean_speed = 0.0;  // car traversal meters / seconds
  double person_hours = 0.0;
  long long trips = 0;
  long long cancelled = 0;
};

struct EquilibriumResult {
  std::vector<IterationRecord> iterations;
  TravelTimeProfile historical;   // profile the final day was routed on
  TravelTimeProfile experienced;  // from the final day
  DayResult day;
  std::vector<AgentDay> agents;   // final iteration's plans
  bool converged = false;
};

struct ChoiceContext {
  ModeChoiceParams mode;
  LosParams los;
  std::uint64_t seed = 0;
};

// Mode choice for every trip of every agent from zone-level LoS on `profile`.
// Draws are keyed by (seed, person, trip) so they repeat across iterations.
void choose_modes(const MultimodalGraph& g, const TravelTimeProfile& profile, std::vector<AgentDay>& agents,
                  const ChoiceContext& ctx, int workers);

using IterationCallback = std::function<void(const IterationRecord&)>;

EquilibriumResult run_to_convergence(const MultimodalGraph& g, std::vector<AgentDay> agents,
                                     const ChoiceContext& choice, const SimParams& sim,
                                     const EquilibriumParams& eq, const IterationCallback& on_iter = {},
                                     std::ostream* trajectories = nullptr);

}  // namespace transitsim
