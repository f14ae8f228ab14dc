#pragma once

// Mode-choice checks shared by the demand tests and the acceptance runner.

#include <cmath>
#include <vector>

#include "support.hpp"
#include "transitsim/demand.hpp"

namespace tstest {

using namespace transitsim;

// Nested logit probabilities written out directly from the closed form.
inline std::vector<double> nested_oracle(const std::vector<double>& u, const std::vector<int>& nest_of,
                                         const std::vector<double>& scale) {
  std::vector<double> sums(scale.size(), 0.0);
  for (std::size_t i = 0; i < u.size(); ++i) sums[nest_of[i]] += std::exp(u[i] / scale[nest_of[i]]);
  double denom = 0.0;
  for (std::size_t n = 0; n < scale.size(); ++n)
    if (sums[n] > 0.0) denom += std::pow(sums[n], scale[n]);
  std::vector<double> p(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    const int n = nest_of[i];
    p[i] = std::pow(sums[n], scale[n]) / denom * std::exp(u[i] / scale[n]) / sums[n];
  }
  return p;
}

// Largest |MNL - NL| over `n` random utility vectors with unit nest scales.
inline double unit_scale_worst(int n = 1000, std::uint64_t seed = 5) {
  Rng rng(seed);
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    std::vector<double> u(kTravelModes);
    std::vector<bool> av(kTravelModes);
    for (int k = 0; k < kTravelModes; ++k) {
      u[k] = rng.uniform(-6, 3);
      av[k] = rng.uniform() < 0.8;
    }
    const auto mnl = mnl_probabilities(u, av);
    const auto nl = nested_logit_probabilities(u, av, {{kModeNest.begin(), kModeNest.end()}, {1.0, 1.0, 1.0}});
    for (int k = 0; k < kTravelModes; ++k) worst = std::max(worst, std::fabs(mnl[k] - nl[k]));
  }
  return worst;
}

// Chi-square test of sampled mode frequencies against the closed form, one
// per random configuration (ASCs and nest scales), all modes available.
inline std::vector<ChiSquare> nested_sampling_chi_square(int configs = 20, long long draws = 20000,
                                                         std::uint64_t seed = 123) {
  Rng setup(seed);
  std::vector<ChiSquare> out;
  for (int cfg = 0; cfg < configs; ++cfg) {
    ModeChoiceParams p;
    for (auto& a : p.asc) a = setup.uniform(-2.5, 1.0);
    for (auto& s : p.nest_scale) s = setup.uniform(0.3, 1.0);
    LosTable los{};
    for (auto& m : los) m.available = true;
    std::vector<double> u(p.asc.begin(), p.asc.end());
    const auto want = nested_oracle(u, {kModeNest.begin(), kModeNest.end()}, {p.nest_scale.begin(), p.nest_scale.end()});
    Rng rng(stream_seed(seed, 1, static_cast<std::uint64_t>(cfg)));
    std::vector<long long> obs(kTravelModes, 0);
    for (long long i = 0; i < draws; ++i) ++obs[static_cast<int>(*choose_mode(los, p, rng))];
    out.push_back(chi_square(obs, want, draws));
  }
  return out;
}

}  // namespace tstest
