#include "transitsim/demand.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace transitsim {

namespace {

constexpr std::array<const char*, kActivityTypes> kTypeKeys{
    "eat_out",    "errands",         "ev_charging", "healthcare",     "leisure", "part_time_work",
    "personal",   "pickup_dropoff",  "religious_civic", "school",      "service", "shop_major",
    "shop_other", "social",          "work",        "work_at_home"};
constexpr std::array<const char*, kActivityTypes> kTypeLabels{
    "Eat out",    "Errands",        "EV charging",     "Healthcare", "Leisure", "Part-time work",
    "Personal",   "Pickup-dropoff", "Religious-civic", "School",     "Service", "Shop-major",
    "Shop-other", "Social",         "Work",            "Work at home"};
constexpr std::array<const char*, kTravelModes> kModeKeys{
    "drive", "walk_to_transit", "drive_to_transit", "walk", "bike"};

// Substream tags.
constexpr std::uint64_t kTagHomeZone = 1, kTagSize = 2, kTagIncome = 3, kTagVehicles = 4,
                        kTagGender = 5, kTagAge = 6, kTagWorker = 7, kTagStudent = 8,
                        kTagMandatoryZone = 9, kTagActivities = 10;

template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng.below(i)]);
}

// Expands quota counts into a shuffled label list of length n.
template <typename Label>
std::vector<Label> quota_labels(const std::vector<Label>& labels, const std::vector<double>& weights,
                                int n, Rng& rng) {
  const auto counts = quota_counts(weights, n);
  std::vector<Label> out;
  out.reserve(n);
  for (std::size_t i = 0; i < labels.size(); ++i) out.insert(out.end(), counts[i], labels[i]);
  shuffle(out, rng);
  return out;
}

int draw_weighted_zone(const std::vector<int>& zones, const std::vector<double>& weights, Rng& rng) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(total > 0.0)) return zones.empty() ? -1 : zones.front();
  double u = rng.uniform() * total;
  for (std::size_t i = 0; i < zones.size(); ++i) {
    if (u < weights[i]) return zones[i];
    u -= weights[i];
  }
  for (std::size_t i = zones.size(); i-- > 0;)
    if (weights[i] > 0.0) return zones[i];
  return zones.back();
}

}  // namespace

const char* key(ActivityType t) { return kTypeKeys[static_cast<int>(t)]; }
const char* label(ActivityType t) { return kTypeLabels[static_cast<int>(t)]; }

ActivityType activity_type_from_key(const std::string& k) {
  for (int i = 0; i < kActivityTypes; ++i)
    if (k == kTypeKeys[i]) return static_cast<ActivityType>(i);
  throw ConfigError("unknown activity type '" + k + "'");
}

const char* key(TravelMode m) { return kModeKeys[static_cast<int>(m)]; }

TravelMode travel_mode_from_key(const std::string& k) {
  for (int i = 0; i < kTravelModes; ++i)
    if (k == kModeKeys[i]) return static_cast<TravelMode>(i);
  throw ConfigError("unknown travel mode '" + k + "'");
}

std::vector<int> quota_counts(const std::vector<double>& weights, int n) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  std::vector<int> counts(weights.size(), 0);
  if (!(total > 0.0) || n <= 0) return counts;
  std::vector<std::pair<double, std::size_t>> rem;
  int assigned = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double exact = weights[i] / total * n;
    counts[i] = static_cast<int>(std::floor(exact));
    assigned += counts[i];
    rem.emplace_back(exact - counts[i], i);
  }
  std::stable_sort(rem.begin(), rem.end(), [](auto& a, auto& b) { return a.first > b.first; });
  for (std::size_t k = 0; assigned < n; ++k, ++assigned) ++counts[rem[k % rem.size()].second];
  return counts;
}

std::array<double, 48> start_histogram(const std::vector<std::array<double, 3>>& peaks) {
  std::array<double, 48> h{};
  for (const auto& [hour, sd, weight] : peaks) {
    for (int b = 0; b < 48; ++b) {
      const double lo = b * 0.5, hi = lo + 0.5;
      const double s = std::max(sd, 1e-3) * std::sqrt(2.0);
      h[b] += weight * 0.5 * (std::erf((hi - hour) / s) - std::erf((lo - hour) / s));
    }
  }
  return h;
}

ActivityParams ActivityParams::defaults() {
  ActivityParams p;
  using T = ActivityType;
  auto set = [&](T t, double rate, std::vector<std::array<double, 3>> peaks, double median,
                 double sigma, double min_frac, double slack, double joint) {
    auto& tp = p.types[static_cast<int>(t)];
    tp.rate = rate;
    tp.start_hist = start_histogram(peaks);
    tp.duration_median = median;
    tp.duration_sigma = sigma;
    tp.min_duration_fraction = min_frac;
    tp.slack = slack;
    tp.joint_probability = joint;
  };
  // Per-person daily rates proportional to a 21.8M-activity region of 10M
  // residents; mandatory types are driven by worker/student flags instead.
  set(T::eat_out, 0.215, {{12, 1, 0.5}, {18.5, 1.2, 0.5}}, 3600, 0.4, 0.5, 3600, 0.3);
  set(T::errands, 0.128, {{11, 3, 1}}, 1800, 0.5, 0.5, 3600, 0.0);
  set(T::ev_charging, 0.00003, {{14, 4, 1}}, 2700, 0.4, 0.5, 3600, 0.0);
  set(T::healthcare, 0.0894, {{11, 2.5, 1}}, 3600, 0.4, 0.6, 2700, 0.0);
  set(T::leisure, 0.167, {{17, 3, 1}}, 7200, 0.5, 0.5, 3600, 0.3);
  set(T::part_time_work, 0.0, {{9, 2, 1}}, 16200, 0.3, 0.5, 1800, 0.0);
  set(T::personal, 0.0327, {{13, 3, 1}}, 2700, 0.5, 0.5, 3600, 0.0);
  set(T::pickup_dropoff, 0.230, {{8, 0.7, 0.5}, {15.5, 1, 0.5}}, 600, 0.4, 0.8, 1200, 0.0);
  set(T::religious_civic, 0.0386, {{11, 3, 1}}, 5400, 0.4, 0.5, 3600, 0.4);
  set(T::school, 0.0, {{7.75, 0.5, 1}}, 23400, 0.15, 0.5, 1800, 0.0);
  set(T::service, 0.0509, {{12, 3, 1}}, 2700, 0.5, 0.5, 3600, 0.0);
  set(T::shop_major, 0.0667, {{14, 3, 1}}, 3600, 0.4, 0.5, 3600, 0.2);
  set(T::shop_other, 0.279, {{15, 3.5, 1}}, 1800, 0.5, 0.5, 3600, 0.0);
  set(T::social, 0.118, {{18, 2.5, 1}}, 7200, 0.5, 0.5, 3600, 0.3);
  set(T::work, 0.0, {{8, 1, 1}}, 30600, 0.2, 0.5, 1800, 0.0);
  set(T::work_at_home, 0.0, {{8.5, 1, 1}}, 25200, 0.3, 0.5, 3600, 0.0);
  p.work_share = 0.7364;
  p.part_time_share = 0.1133;
  p.work_at_home_share = 0.1503;
  return p;
}

double DestinationParams::attraction(int zone, ActivityType t) const {
  auto it = attractors.find(zone);
  if (it == attractors.end()) return 0.0;
  const auto& a = it->second;
  switch (t) {
    case ActivityType::work:
    case ActivityType::part_time_work:
    case ActivityType::healthcare:
    case ActivityType::service: return a.employment;
    case ActivityType::school: return a.school;
    case ActivityType::eat_out:
    case ActivityType::errands:
    case ActivityType::shop_major:
    case ActivityType::shop_other:
    case ActivityType::ev_charging:
    case ActivityType::leisure: return a.retail;
    default: return a.population;
  }
}

void ModeChoiceParams::validate() const {
  for (double s : nest_scale)
    if (!(s > 0.0 && s <= 1.0)) throw ConfigError("nest scales must lie in (0, 1]");
  if (beta_ivt > 0 || beta_wait > 0 || beta_walk > 0 || beta_cost > 0)
    throw ConfigError("mode impedance coefficients must be <= 0");
}

std::vector<double> mnl_probabilities(const std::vector<double>& utility,
                                      const std::vector<bool>& available) {
  std::vector<double> p(utility.size(), 0.0);
  double mx = -kInf;
  for (std::size_t i = 0; i < utility.size(); ++i)
    if (available[i]) mx = std::max(mx, utility[i]);
  if (mx == -kInf) return p;
  double sum = 0.0;
  for (std::size_t i = 0; i < utility.size(); ++i)
    if (available[i]) sum += (p[i] = std::exp(utility[i] - mx));
  for (auto& v : p) v /= sum;
  return p;
}

std::vector<double> nested_logit_probabilities(const std::vector<double>& utility,
                                               const std::vector<bool>& available,
                                               const NestStructure& nests) {
  const std::size_t n_nests = nests.scale.size();
  std::vector<double> inclusive(n_nests, -kInf);
  std::vector<double> nest_max(n_nests, -kInf);
  std::vector<double> nest_sum(n_nests, 0.0);
  for (std::size_t i = 0; i < utility.size(); ++i) {
    if (!available[i]) continue;
    const int n = nests.nest_of[i];
    nest_max[n] = std::max(nest_max[n], utility[i] / nests.scale[n]);
  }
  for (std::size_t i = 0; i < utility.size(); ++i) {
    if (!available[i]) continue;
    const int n = nests.nest_of[i];
    nest_sum[n] += std::exp(utility[i] / nests.scale[n] - nest_max[n]);
  }
  double top = -kInf;
  for (std::size_t n = 0; n < n_nests; ++n) {
    if (nest_sum[n] > 0.0) {
      inclusive[n] = nests.scale[n] * (nest_max[n] + std::log(nest_sum[n]));
      top = std::max(top, inclusive[n]);
    }
  }
  std::vector<double> p(utility.size(), 0.0);
  if (top == -kInf) return p;
  double denom = 0.0;
  for (std::size_t n = 0; n < n_nests; ++n)
    if (inclusive[n] > -kInf) denom += std::exp(inclusive[n] - top);
  for (std::size_t i = 0; i < utility.size(); ++i) {
    if (!available[i]) continue;
    const int n = nests.nest_of[i];
    const double p_nest = std::exp(inclusive[n] - top) / denom;
    const double p_leaf = std::exp(utility[i] / nests.scale[n] - nest_max[n]) / nest_sum[n];
    p[i] = p_nest * p_leaf;
  }
  return p;
}

int sample_index(const std::vector<double>& probabilities, double u) {
  int last = -1;
  double acc = 0.0;
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    if (probabilities[i] <= 0.0) continue;
    last = static_cast<int>(i);
    acc += probabilities[i];
    if (u < acc) return last;
  }
  return last;
}

double mode_utility(TravelMode m, const ModeLos& los, const ModeChoiceParams& p) {
  return p.asc[static_cast<int>(m)] + p.beta_ivt * los.in_vehicle / 60.0 +
         p.beta_wait * los.wait / 60.0 + p.beta_walk * los.walk / 60.0 + p.beta_cost * los.cost;
}

std::array<double, kTravelModes> mode_probabilities(const LosTable& los, const ModeChoiceParams& p) {
  std::vector<double> u(kTravelModes);
  std::vector<bool> avail(kTravelModes);
  for (int m = 0; m < kTravelModes; ++m) {
    avail[m] = los[m].available;
    u[m] = mode_utility(static_cast<TravelMode>(m), los[m], p);
  }
  NestStructure nests{{kModeNest.begin(), kModeNest.end()}, {p.nest_scale.begin(), p.nest_scale.end()}};
  const auto v = nested_logit_probabilities(u, avail, nests);
  std::array<double, kTravelModes> out{};
  std::copy(v.begin(), v.end(), out.begin());
  return out;
}

std::optional<TravelMode> choose_mode(const LosTable& los, const ModeChoiceParams& p, Rng& rng) {
  const auto probs = mode_probabilities(los, p);
  const int i = sample_index({probs.begin(), probs.end()}, rng.uniform());
  if (i < 0) return std::nullopt;
  return static_cast<TravelMode>(i);
}

void restrict_modes(LosTable& los, bool has_car, double straight_distance,
                    const ModeChoiceParams& p) {
  if (!has_car) {
    los[static_cast<int>(TravelMode::drive)].available = false;
    los[static_cast<int>(TravelMode::drive_to_transit)].available = false;
  }
  if (straight_distance > p.walk_max_distance) los[static_cast<int>(TravelMode::walk)].available = false;
  if (straight_distance > p.bike_max_distance) los[static_cast<int>(TravelMode::bike)].available = false;
}

Skims::Skims(std::vector<int> zones, std::vector<double> times)
    : zones_(std::move(zones)), times_(std::move(times)) {
  for (std::size_t i = 0; i < zones_.size(); ++i) index_[zones_[i]] = static_cast<int>(i);
  if (times_.size() != zones_.size() * zones_.size())
    throw ConfigError("skim matrix size does not match zone count");
}

int Skims::index(int zone) const {
  auto it = index_.find(zone);
  return it == index_.end() ? -1 : it->second;
}

double Skims::time(int from_zone, int to_zone) const {
  const int a = index(from_zone), b = index(to_zone);
  if (a < 0 || b < 0) return kInf;
  return times_[static_cast<std::size_t>(a) * zones_.size() + b];
}

std::vector<double> destination_probabilities(ActivityType t, int origin_zone, const Skims& skims,
                                              const DestinationParams& p) {
  const auto& zones = skims.zones();
  std::vector<double> u(zones.size(), -kInf);
  double mx = -kInf;
  for (std::size_t i = 0; i < zones.size(); ++i) {
    const double a = p.attraction(zones[i], t);
    const double tt = skims.time(origin_zone, zones[i]);
    if (a > 0.0 && std::isfinite(tt)) {
      u[i] = p.beta_tt * tt / 60.0 + std::log(a);
      mx = std::max(mx, u[i]);
    }
  }
  std::vector<double> prob(zones.size(), 0.0);
  if (mx == -kInf) return prob;
  double sum = 0.0;
  for (std::size_t i = 0; i < zones.size(); ++i)
    if (u[i] > -kInf) sum += (prob[i] = std::exp(u[i] - mx));
  for (auto& v : prob) v /= sum;
  return prob;
}

int choose_destination(const Activity& activity, int origin_zone, const Skims& skims,
                       const DestinationParams& p, Rng& rng) {
  if ((activity.mandatory || activity.type == ActivityType::work_at_home) && activity.zone >= 0)
    return activity.zone;
  const auto prob = destination_probabilities(activity.type, origin_zone, skims, p);
  const int i = sample_index(prob, rng.uniform());
  if (i < 0)
    throw ConfigError(std::string("no reachable destination for activity type ") +
                      key(activity.type) + " from zone " + std::to_string(origin_zone));
  return skims.zones()[i];
}

Population synthesize_population(const PopulationConfig& cfg, const DestinationParams& dest,
                                 std::uint64_t seed, const Skims* skims) {
  if (cfg.households <= 0) throw ConfigError("population: household count must be > 0");
  if (cfg.zone_weights.empty()) throw ConfigError("population: no zones configured");
  const int n = cfg.households;
  Population pop;

  auto split = [](const std::map<int, double>& m) {
    std::pair<std::vector<int>, std::vector<double>> out;
    for (auto& [k, w] : m) {
      out.first.push_back(k);
      out.second.push_back(w);
    }
    return out;
  };

  Rng zone_rng(stream_seed(seed, kTagHomeZone));
  const auto [zones, zone_w] = split(cfg.zone_weights);
  const auto home = quota_labels(zones, zone_w, n, zone_rng);
  Rng size_rng(stream_seed(seed, kTagSize));
  const auto [sizes, size_w] = split(cfg.household_size);
  const auto hh_size = quota_labels(sizes, size_w, n, size_rng);

  pop.households.resize(n);
  for (int h = 0; h < n; ++h) {
    auto& hh = pop.households[h];
    hh.id = h;
    hh.home_zone = home[h];
    Rng r(stream_seed(seed, kTagIncome, h));
    hh.income = r.lognormal(cfg.income_median, cfg.income_sigma);
  }
  // Quintiles by income rank (ties by id): five groups of equal size.
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return pop.households[a].income < pop.households[b].income;
  });
  std::vector<double> rank(n);
  for (int r = 0; r < n; ++r) {
    pop.households[order[r]].income_quintile = 1 + static_cast<int>((5LL * r) / n);
    rank[order[r]] = (r + 0.5) / n;
  }
  // Vehicle counts: exact quota, handed out in order of noisy income rank.
  {
    const auto [levels, level_w] = split(cfg.vehicle_ownership);
    const auto counts = quota_counts(level_w, n);
    std::vector<int> fleet;
    for (std::size_t i = 0; i < levels.size(); ++i) fleet.insert(fleet.end(), counts[i], levels[i]);
    std::vector<std::pair<double, int>> keyed(n);
    for (int h = 0; h < n; ++h) {
      Rng r(stream_seed(seed, kTagVehicles, h));
      keyed[h] = {rank[h] + cfg.vehicle_income_noise * r.normal(), h};
    }
    std::stable_sort(keyed.begin(), keyed.end());
    for (int i = 0; i < n; ++i) pop.households[keyed[i].second].vehicles = fleet[i];
  }

  int total = 0;
  for (int s : hh_size) total += s;
  Rng gender_rng(stream_seed(seed, kTagGender));
  const auto genders = quota_labels(std::vector<Gender>{Gender::female, Gender::male},
                                    {cfg.female_share, 1.0 - cfg.female_share}, total, gender_rng);
  std::vector<int> bracket_ids(cfg.age_brackets.size());
  std::vector<double> bracket_w;
  for (std::size_t i = 0; i < cfg.age_brackets.size(); ++i) {
    bracket_ids[i] = static_cast<int>(i);
    bracket_w.push_back(cfg.age_brackets[i][2]);
  }
  Rng age_rng(stream_seed(seed, kTagAge));
  const auto brackets = quota_labels(bracket_ids, bracket_w, total, age_rng);

  pop.persons.resize(total);
  int pid = 0;
  for (int h = 0; h < n; ++h) {
    for (int k = 0; k < hh_size[h]; ++k, ++pid) {
      auto& p = pop.persons[pid];
      p.id = pid;
      p.household = h;
      p.gender = genders[pid];
      const auto& br = cfg.age_brackets[brackets[pid]];
      Rng r(stream_seed(seed, kTagAge, pid));
      p.age = static_cast<int>(br[0] + std::floor(r.uniform() * (br[1] - br[0] + 1)));
      pop.households[h].members.push_back(pid);
    }
  }

  auto assign_flag = [&](auto eligible, double rate, std::uint64_t tag, auto setter) {
    std::vector<int> ids;
    for (const auto& p : pop.persons)
      if (eligible(p)) ids.push_back(p.id);
    Rng r(stream_seed(seed, tag));
    shuffle(ids, r);
    const int k = quota_counts({rate, 1.0 - rate}, static_cast<int>(ids.size()))[0];
    for (int i = 0; i < k; ++i) setter(pop.persons[ids[i]]);
  };
  assign_flag([](const Person& p) { return p.age >= 16 && p.age <= 74; }, cfg.worker_rate,
              kTagWorker, [](Person& p) { p.worker = true; });
  assign_flag([](const Person& p) { return p.age >= 5 && p.age <= 24; }, cfg.student_rate,
              kTagStudent, [](Person& p) { p.student = true; });

  std::vector<int> all_zones;
  std::vector<double> emp_w, school_w;
  for (auto& [z, a] : dest.attractors) {
    all_zones.push_back(z);
    emp_w.push_back(a.employment);
    school_w.push_back(a.school);
  }
  for (auto& p : pop.persons) {
    Rng r(stream_seed(seed, kTagMandatoryZone, p.id));
    const int home_zone = pop.households[p.household].home_zone;
    auto draw = [&](ActivityType t, const std::vector<double>& w) {
      if (all_zones.empty()) return home_zone;
      if (!skims) return draw_weighted_zone(all_zones, w, r);
      const auto prob = destination_probabilities(t, home_zone, *skims, dest);
      const int i = sample_index(prob, r.uniform());
      return i < 0 ? home_zone : skims->zones()[i];
    };
    if (p.worker) p.work_zone = draw(ActivityType::work, emp_w);
    if (p.student) p.school_zone = draw(ActivityType::school, school_w);
  }
  return pop;
}

std::vector<Activity> generate_activities(const Person& person, const Household& household,
                                          const ActivityParams& params, std::uint64_t seed) {
  Rng rng(stream_seed(seed, kTagActivities, static_cast<std::uint64_t>(person.id)));
  std::vector<Activity> out;
  auto make = [&](ActivityType t, int zone) {
    const auto& tp = params.types[static_cast<int>(t)];
    Activity a;
    a.id = static_cast<long long>(person.id) * 100 + static_cast<long long>(out.size());
    a.person = person.id;
    a.type = t;
    a.mandatory = is_mandatory(t);
    a.care = is_care(t);
    a.zone = zone;
    std::vector<double> hist(tp.start_hist.begin(), tp.start_hist.end());
    int bin = sample_index(hist, rng.uniform() * std::accumulate(hist.begin(), hist.end(), 0.0));
    if (bin < 0) bin = 16;
    a.planned_start = std::floor((bin + rng.uniform()) * 1800.0);
    double dur = rng.lognormal(tp.duration_median, tp.duration_sigma);
    dur = std::clamp(std::round(dur), params.min_duration_floor, 14.0 * 3600.0);
    a.planned_duration = dur;
    a.min_duration =
        std::min(dur, std::max(params.min_duration_floor, std::round(tp.min_duration_fraction * dur)));
    a.latest_end = a.planned_start + a.planned_duration + tp.slack;
    a.joint = household.members.size() > 1 && rng.uniform() < tp.joint_probability;
    out.push_back(a);
  };
  if (person.worker) {
    const double u = rng.uniform() *
                     (params.work_share + params.part_time_share + params.work_at_home_share);
    if (u < params.work_share) make(ActivityType::work, person.work_zone);
    else if (u < params.work_share + params.part_time_share)
      make(ActivityType::part_time_work, person.work_zone);
    else make(ActivityType::work_at_home, household.home_zone);
  }
  if (person.student) make(ActivityType::school, person.school_zone);
  const double mult = person.worker ? 1.0 : params.nonworker_rate_multiplier;
  for (int t = 0; t < kActivityTypes; ++t) {
    const auto type = static_cast<ActivityType>(t);
    if (is_mandatory(type) || type == ActivityType::work_at_home) continue;
    const int count = rng.poisson(params.types[t].rate * mult);
    for (int k = 0; k < count; ++k) make(type, -1);
  }
  return out;
}

std::vector<Activity> resolve_conflicts(std::vector<Activity> schedule) {
  auto by_start = [](const Activity& a, const Activity& b) {
    if (a.planned_start != b.planned_start) return a.planned_start < b.planned_start;
    return a.id < b.id;
  };
  std::stable_sort(schedule.begin(), schedule.end(), by_start);
  std::vector<Activity> placed;
  placed.reserve(schedule.size());

  Seconds last_end = -kInf;
  for (auto a : schedule) {
    if (!a.mandatory) continue;
    if (a.planned_start < last_end) a.planned_start = last_end;
    a.latest_end = std::max(a.latest_end, a.planned_end());
    last_end = a.planned_end();
    placed.push_back(a);
  }

  for (auto a : schedule) {
    if (a.mandatory) continue;
    // Free gaps after the current placements, in time order.
    std::vector<std::pair<Seconds, Seconds>> gaps;
    Seconds cursor = -kInf;
    for (const auto& b : placed) {
      if (b.planned_start > cursor) gaps.emplace_back(cursor, b.planned_start);
      cursor = std::max(cursor, b.planned_end());
    }
    gaps.emplace_back(cursor, kInf);

    bool done = false;
    for (const auto& [g0, g1] : gaps) {
      const Seconds s = std::max(g0, a.planned_start);
      if (s + a.planned_duration <= g1 && s + a.planned_duration <= a.latest_end) {
        a.planned_start = s;
        done = true;
        break;
      }
    }
    if (!done) {
      for (const auto& [g0, g1] : gaps) {
        const Seconds s = std::max(g0, a.planned_start);
        const Seconds avail = std::min(g1, a.latest_end) - s;
        if (avail >= a.min_duration) {
          a.planned_start = s;
          a.planned_duration = std::min(a.planned_duration, avail);
          done = true;
          break;
        }
      }
    }
    if (!done) continue;
    placed.insert(std::upper_bound(placed.begin(), placed.end(), a, by_start), a);
  }
  return placed;
}

}  // namespace transitsim
