#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "transitsim/common.hpp"

namespace transitsim {

enum class ActivityType : std::uint8_t {
  eat_out,
  errands,
  ev_charging,
  healthcare,
  leisure,
  part_time_work,
  personal,
  pickup_dropoff,
  religious_civic,
  school,
  service,
  shop_major,
  shop_other,
  social,
  work,
  work_at_home,
};
inline constexpr int kActivityTypes = 16;

const char* key(ActivityType t);    // "eat_out"
const char* label(ActivityType t);  // "Eat out"
ActivityType activity_type_from_key(const std::string& k);

inline constexpr bool is_mandatory(ActivityType t) {
  return t == ActivityType::work || t == ActivityType::school ||
         t == ActivityType::part_time_work;
}
// Mobility-of-care categories.
inline constexpr bool is_care(ActivityType t) {
  return t == ActivityType::errands || t == ActivityType::healthcare ||
         t == ActivityType::pickup_dropoff || t == ActivityType::school ||
         t == ActivityType::shop_major;
}
// Reporting group "work/school" (everything else is "non-work").
inline constexpr bool is_work_school(ActivityType t) {
  return t == ActivityType::work || t == ActivityType::part_time_work ||
         t == ActivityType::work_at_home || t == ActivityType::school;
}

enum class Gender : std::uint8_t { female, male };

struct Household {
  int id = 0;
  int home_zone = 0;
  double income = 0.0;
  int income_quintile = 1;  // 1 = lowest
  int vehicles = 0;
  std::vector<int> members;  // person ids
  bool operator==(const Household&) const = default;
};

struct Person {
  int id = 0;
  int household = 0;
  Gender gender = Gender::female;
  int age = 30;
  bool worker = false;
  bool student = false;
  int work_zone = -1;
  int school_zone = -1;
  bool operator==(const Person&) const = default;
};

struct Activity {
  long long id = 0;
  int person = 0;
  ActivityType type = ActivityType::leisure;
  Seconds planned_start = 0;
  Seconds planned_duration = 0;
  Seconds min_duration = 0;
  Seconds latest_end = 0;
  int zone = -1;
  bool mandatory = false;
  bool care = false;
  bool joint = false;  // household-joint travel party
  Seconds planned_end() const { return planned_start + planned_duration; }
  bool operator==(const Activity&) const = default;
};

struct Population {
  std::vector<Household> households;
  std::vector<Person> persons;  // ordered by id, ids 0..n-1
};

// Zone attractor sizes; activity types map onto one attractor each.
struct ZoneAttractors {
  double employment = 0.0;
  double retail = 0.0;
  double population = 0.0;
  double school = 0.0;
};

struct PopulationConfig {
  int households = 1000;
  std::map<int, double> zone_weights;              // home zone -> weight
  std::map<int, double> household_size{{1, 0.28}, {2, 0.34}, {3, 0.16}, {4, 0.22}};
  std::map<int, double> vehicle_ownership{{0, 0.10}, {1, 0.37}, {2, 0.40}, {3, 0.13}};
  double income_median = 70000.0;
  double income_sigma = 0.8;
  // Correlation knob: noise added to the income rank when assigning cars.
  double vehicle_income_noise = 0.35;
  double female_share = 0.51;
  // (min_age, max_age, weight) brackets.
  std::vector<std::array<double, 3>> age_brackets{{5, 17, 0.16}, {18, 34, 0.26},
                                                  {35, 64, 0.40}, {65, 85, 0.18}};
  double worker_rate = 0.62;   // among ages 16..74
  double student_rate = 0.55;  // among ages 5..24
};

struct ActivityTypeParams {
  double rate = 0.0;                // expected count per person-day (flexible)
  std::array<double, 48> start_hist{};  // 30-minute start-time bins
  double duration_median = 3600.0;
  double duration_sigma = 0.4;
  double min_duration_fraction = 0.5;
  double slack = 3600.0;  // latest_end - planned end at generation time
  double joint_probability = 0.0;
};

struct ActivityParams {
  std::array<ActivityTypeParams, kActivityTypes> types{};
  // Shares among workers' mandatory activity (work, part-time, at home).
  double work_share = 0.75;
  double part_time_share = 0.12;
  double work_at_home_share = 0.13;
  double nonworker_rate_multiplier = 1.0;
  double min_duration_floor = 300.0;

  static ActivityParams defaults();
};

// 30-minute start histogram from Gaussian peaks (hour, sd_hours, weight).
std::array<double, 48> start_histogram(const std::vector<std::array<double, 3>>& peaks);

struct DestinationParams {
  double beta_tt = -0.08;  // per minute of travel time, <= 0
  std::map<int, ZoneAttractors> attractors;

  double attraction(int zone, ActivityType t) const;
};

enum class TravelMode : std::uint8_t {
  drive = 0,
  walk_to_transit = 1,
  drive_to_transit = 2,
  walk = 3,
  bike = 4,
};
inline constexpr int kTravelModes = 5;
const char* key(TravelMode m);
TravelMode travel_mode_from_key(const std::string& k);
inline constexpr bool is_transit(TravelMode m) {
  return m == TravelMode::walk_to_transit || m == TravelMode::drive_to_transit;
}

// Level of service for one mode; times in seconds, cost in dollars.
struct ModeLos {
  bool available = false;
  double in_vehicle = 0.0;
  double wait = 0.0;
  double walk = 0.0;
  double distance = 0.0;
  double cost = 0.0;
  double total_time() const { return in_vehicle + wait + walk; }
};
using LosTable = std::array<ModeLos, kTravelModes>;

struct ModeChoiceParams {
  // Utility coefficients per minute / per dollar.
  double beta_ivt = -0.03;
  double beta_wait = -0.06;
  double beta_walk = -0.06;
  double beta_cost = -0.15;
  std::array<double, kTravelModes> asc{0.0, -0.6, -1.2, -0.4, -1.4};
  // Nest scales: auto, transit, active.
  std::array<double, 3> nest_scale{1.0, 0.6, 0.7};
  double walk_max_distance = 3000.0;
  double bike_max_distance = 8000.0;

  void validate() const;
};

struct ChoiceParams {
  ModeChoiceParams mode;
  DestinationParams destination;
};

// Mode -> nest: auto {drive}, transit {walk/drive-to-transit}, active {walk, bike}.
inline constexpr std::array<int, kTravelModes> kModeNest{0, 1, 1, 2, 2};

struct NestStructure {
  std::vector<int> nest_of;     // leaf -> nest
  std::vector<double> scale;    // per nest, in (0, 1]
};

std::vector<double> mnl_probabilities(const std::vector<double>& utility,
                                      const std::vector<bool>& available);
std::vector<double> nested_logit_probabilities(const std::vector<double>& utility,
                                               const std::vector<bool>& available,
                                               const NestStructure& nests);

// Inverse-CDF draw; returns -1 when every probability is zero.
int sample_index(const std::vector<double>& probabilities, double u);

double mode_utility(TravelMode m, const ModeLos& los, const ModeChoiceParams& p);
std::array<double, kTravelModes> mode_probabilities(const LosTable& los, const ModeChoiceParams& p);

// std::nullopt means "untravelable": no mode is available.
std::optional<TravelMode> choose_mode(const LosTable& los, const ModeChoiceParams& p, Rng& rng);

// Applies the person/scenario availability rules to a LoS table in place.
void restrict_modes(LosTable& los, bool has_car, double straight_distance,
                    const ModeChoiceParams& p);

// Zone-to-zone travel times in seconds.
class Skims {
 public:
  Skims() = default;
  Skims(std::vector<int> zones, std::vector<double> times);
  const std::vector<int>& zones() const { return zones_; }
  int index(int zone) const;
  double time(int from_zone, int to_zone) const;

 private:
  std::vector<int> zones_;
  std::map<int, int> index_;
  std::vector<double> times_;
};

std::vector<double> destination_probabilities(ActivityType t, int origin_zone, const Skims& skims,
                                              const DestinationParams& p);
int choose_destination(const Activity& activity, int origin_zone, const Skims& skims,
                       const DestinationParams& p, Rng& rng);

// With skims, work and school zones follow the gravity model from the home zone;
// without, they are drawn by attractor weight alone.
Population synthesize_population(const PopulationConfig& config, const DestinationParams& dest,
                                 std::uint64_t seed, const Skims* skims = nullptr);

std::vector<Activity> generate_activities(const Person& person, const Household& household,
                                          const ActivityParams& params, std::uint64_t seed);

// Time-ordered, non-overlapping repair. Mandatory windows are kept (a
// mandatory activity overlapping an earlier mandatory one starts when that
// one ends); flexible activities are shifted later, then shortened (not
// below min_duration), then dropped.
std::vector<Activity> resolve_conflicts(std::vector<Activity> schedule);

// Largest-remainder quota allocation of `n` items over weighted categories.
std::vector<int> quota_counts(const std::vector<double>& weights, int n);

}  // namespace transitsim
