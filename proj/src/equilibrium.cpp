#include "transitsim/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <tuple>

#include <spdlog/spdlog.h>

namespace transitsim {

TravelTimeProfile mix_times(const TravelTimeProfile& historical, const TravelTimeProfile& experienced,
                            double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError("mixing alpha must be in (0, 1]");
  if (historical.link_count() != experienced.link_count())
    throw ConfigError("profiles cover different link sets");
  TravelTimeProfile out = historical;
  for (std::size_t l = 0; l < historical.link_count(); ++l) {
    const int li = static_cast<int>(l);
    for (int b = 0; b < kBinsPerDay; ++b) {
      const double h = historical.time(li, b);
      const double e = experienced.time(li, b);
      out.set(li, b, alpha == 1.0 ? e : (1.0 - alpha) * h + alpha * e);
    }
  }
  return out;
}

double relative_gap(const std::vector<GapTerm>& terms) {
  double num = 0.0, den = 0.0;
  for (const auto& t : terms) {
    num += std::max(0.0, t.experienced - t.best);
    den += t.best;
  }
  return den > 0.0 ? num / den : 0.0;
}

std::vector<GapTerm> gap_terms(const MultimodalGraph& g, const std::vector<TripRecord>& trips,
                               const TravelTimeProfile& experienced, int workers) {
  std::vector<int> idx;
  for (std::size_t i = 0; i < trips.size(); ++i) {
    const auto& t = trips[i];
    if (t.completed() && t.mode == TravelMode::drive && !t.links.empty()) idx.push_back(static_cast<int>(i));
  }
  std::vector<GapTerm> out(idx.size());
  const int n = static_cast<int>(idx.size());
#pragma omp parallel for schedule(dynamic, 64) num_threads(workers) if (workers > 1)
  for (int k = 0; k < n; ++k) {
    const auto& t = trips[idx[k]];
    Seconds clock = t.departure;
    for (int l : t.links) clock = experienced.exit_time(l, clock);
    const int from = g.links()[t.links.front()].from;
    const int to = g.links()[t.links.back()].to;
    const TripPlan best = shortest_path(g, experienced, from, to, t.departure, UnimodalMode::drive);
    out[k].experienced = clock - t.departure;
    out[k].best = best.found ? best.predicted_total : out[k].experienced;
    out[k].trip = idx[k];
    if (best.found && out[k].best < out[k].experienced) out[k].best_links = best.links();
  }
  return out;
}

void choose_modes(const MultimodalGraph& g, const TravelTimeProfile& profile, std::vector<AgentDay>& agents,
                  const ChoiceContext& ctx, int workers) {
  using Key = std::tuple<int, int, int>;
  struct TripRef {
    int agent;
    int trip;
    int from;
    int to;
    Key key;
  };
  std::vector<TripRef> refs;
  std::map<Key, int> keys;
  const auto& nodes = g.nodes();
  for (std::size_t a = 0; a < agents.size(); ++a) {
    auto& ag = agents[a];
    const int n = static_cast<int>(ag.activities.size());
    ag.modes.assign(n + 1, std::nullopt);
    ag.expected_time.assign(n + 1, 0.0);
    int from = ag.home_node;
    for (int i = 0; i <= n; ++i) {
      const int to = i < n ? ag.nodes[i] : ag.home_node;
      const Seconds when = i < n ? ag.activities[i].planned_start
                                 : (n > 0 ? ag.activities[n - 1].planned_end() : 0.0);
      const int hour = std::clamp(static_cast<int>(when / 3600.0), 0, 23);
      if (from != to) {
        const Key k{nodes[from].zone, nodes[to].zone, hour};
        keys.emplace(k, 0);
        refs.push_back({static_cast<int>(a), i, from, to, k});
      } else {
        ag.modes[i] = TravelMode::walk;
      }
      from = to;
    }
  }
  std::vector<Key> key_list;
  key_list.reserve(keys.size());
  for (auto& [k, v] : keys) {
    v = static_cast<int>(key_list.size());
    key_list.push_back(k);
  }
  std::vector<LosTable> los(key_list.size());
  const int nk = static_cast<int>(key_list.size());
#pragma omp parallel for schedule(dynamic, 8) num_threads(workers) if (workers > 1)
  for (int i = 0; i < nk; ++i) {
    const auto& [oz, dz, hour] = key_list[i];
    los[i] = mode_levels_of_service(g, profile, oz, dz, hour * 3600.0 + 1800.0, ctx.los);
  }
  for (const auto& r : refs) {
    auto& ag = agents[r.agent];
    LosTable table = los[keys.at(r.key)];
    restrict_modes(table, ag.car, g.straight_distance(r.from, r.to), ctx.mode);
    Rng rng(stream_seed(ctx.seed, static_cast<std::uint64_t>(ag.person), static_cast<std::uint64_t>(r.trip),
                        0x6d6f6465ULL));
    const auto m = choose_mode(table, ctx.mode, rng);
    ag.modes[r.trip] = m;
    if (m) ag.expected_time[r.trip] = table[static_cast<int>(*m)].total_time();
  }
}

EquilibriumResult run_to_convergence(const MultimodalGraph& g, std::vector<AgentDay> agents,
                                     const ChoiceContext& choice, const SimParams& sim,
                                     const EquilibriumParams& eq, const IterationCallback& on_iter,
                                     std::ostream* trajectories) {
  if (eq.max_iters < 1) throw ConfigError("max_iters must be >= 1");
  if (eq.fixed_alpha && !(*eq.fixed_alpha > 0.0 && *eq.fixed_alpha <= 1.0))
    throw ConfigError("alpha must be in (0, 1]");
  validate_sim_params(g, sim);

  EquilibriumResult res;
  TravelTimeProfile hist(g);
  double alpha_scale = 1.0;
  int rising = 0;
  double last_gap = kInf;
  std::vector<GapTerm> last_terms;
  std::string traj_text;

  for (int k = 1; k <= eq.max_iters; ++k) {
    choose_modes(g, hist, agents, choice, sim.workers);
    // Route memory from the previous day.
    for (auto& ag : agents) ag.prior_routes.assign(ag.activities.size() + 1, {});
    // Drivers keep yesterday's route; those who could have done better switch
    // to yesterday's best response with probability 1/k.
    if (eq.route_inertia && k > 1) {
      std::size_t a = 0;
      for (const auto& term : last_terms) {
        const auto& t = res.day.trips[term.trip];
        while (a < agents.size() && agents[a].person < t.person) ++a;
        if (a >= agents.size() || agents[a].person != t.person) continue;
        auto route = &t.links;
        if (!term.best_links.empty()) {
          Rng rng(stream_seed(choice.seed, static_cast<std::uint64_t>(t.person), static_cast<std::uint64_t>(t.trip),
                              0x726f7574ULL + static_cast<std::uint64_t>(k)));
          if (rng.uniform() < 1.0 / k) route = &term.best_links;
        }
        agents[a].prior_routes[t.trip] = *route;
      }
    }

    std::ostringstream traj;
    DayResult day = run_day(g, hist, agents, sim, trajectories ? &traj : nullptr);
    TravelTimeProfile exp = experienced_profile(g, day.records);
    last_terms = gap_terms(g, day.trips, exp, sim.workers);
    const double gap = relative_gap(last_terms);

    IterationRecord rec;
    rec.k = k;
    rec.gap = gap;
    rec.vehicle_hours = day.vehicle_hours;
    rec.person_hours = day.person_hours;
    double meters = 0.0, secs = 0.0;
    for (std::size_t l = 0; l < day.records.meters.size(); ++l) {
      meters += day.records.meters[l];
      secs += day.records.seconds[l];
    }
    rec.mean_speed = secs > 0.0 ? meters / secs : 0.0;
    for (const auto& t : day.trips)
      if (t.completed()) ++rec.trips;
    for (const auto& o : day.outcomes)
      if (o.status == OutcomeStatus::cancelled) ++rec.cancelled;

    const double base_alpha = eq.fixed_alpha ? *eq.fixed_alpha : 1.0 / k;
    rising = gap > last_gap ? rising + 1 : 0;
    if (rising >= 3) {
      spdlog::warn("[iter {}] gap rose three iterations in a row; halving alpha", k);
      alpha_scale *= 0.5;
      rising = 0;
    }
    last_gap = gap;
    rec.alpha = base_alpha * alpha_scale;
    res.iterations.push_back(rec);
    if (on_iter) on_iter(rec);

    const bool done = gap <= eq.gap_target || k == eq.max_iters;
    if (done) {
      res.converged = gap <= eq.gap_target;
      res.historical = hist;
      res.experienced = std::move(exp);
      res.day = std::move(day);
      res.agents = agents;
      traj_text = traj.str();
      break;
    }
    hist = mix_times(hist, exp, rec.alpha);
    res.day = std::move(day);
  }
  if (trajectories) *trajectories << traj_text;
  return res;
}

}  // namespace transitsim
