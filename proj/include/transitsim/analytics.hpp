#pragma once

#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "transitsim/simcore.hpp"

namespace transitsim {

using TypeCounts = std::array<double, kActivityTypes>;

// (scenario - baseline) / baseline * 100, n/a when baseline is zero.
std::optional<double> percent_change(double baseline, double scenario);

struct CancellationRow {
  std::string type;
  double baseline = 0.0;
  double scenario = 0.0;
  std::optional<double> change_pct;
};

struct CancellationTable {
  std::vector<CancellationRow> rows;  // one per activity type
  CancellationRow total;
};

CancellationTable cancellation_table(const TypeCounts& baseline, const TypeCounts& scenario);

// Performed (not cancelled) activities per type; `zones` restricts by activity zone.
TypeCounts performed_counts(const std::vector<ActivityOutcome>& outcomes, const std::set<int>* zones = nullptr);

CancellationTable cancellation_table(const std::vector<ActivityOutcome>& baseline,
                                     const std::vector<ActivityOutcome>& scenario,
                                     const std::set<int>* zones = nullptr);

struct ShareEntry {
  std::string group;
  long long count = 0;
  std::optional<double> share;  // fraction of the total
};

struct GroupShares {
  std::vector<ShareEntry> overall;
  std::vector<ShareEntry> non_work;
};

struct EquityShares {
  long long cancellations = 0;
  long long non_work_cancellations = 0;
  GroupShares gender;
  GroupShares quintile;
  std::map<int, long long> by_home_zone;
  std::map<int, long long> by_activity_zone;
};

EquityShares equity_shares(const std::vector<ActivityOutcome>& scenario, const std::vector<Person>& persons,
                           const std::vector<Household>& households);

struct CareDelta {
  double baseline = 0.0;
  double scenario = 0.0;
  double drop = 0.0;                  // baseline - scenario
  std::optional<double> drop_pct;     // drop / baseline * 100
};

CareDelta care_delta(const TypeCounts& baseline, const TypeCounts& scenario);
CareDelta care_delta(const std::vector<ActivityOutcome>& baseline, const std::vector<ActivityOutcome>& scenario);

struct EconomicAssumptions {
  double vot_auto = 30.0;
  double vot_transit = 25.5;
  double weekdays_per_year = 261.0;
  double occupancy_auto = 1.48;
  double annual_car_cost = 10728.0;
  double households = 3.8e6;
  double annual_transit_funding = 2.7e9;
  std::map<std::string, double> spending;              // category -> $/household/year
  std::map<std::string, std::string> category_of;      // activity key -> category

  static EconomicAssumptions defaults();
  void validate() const;
};

struct EconomicInputs {
  double added_vehicle_hours_per_day = 0.0;
  double transit_person_hours_per_day = 0.0;
  double added_cars = 0.0;
  TypeCounts baseline_counts{};
  TypeCounts scenario_counts{};
  std::optional<double> spending_loss;  // use this total instead of the category build-up
};

struct EconomicReport {
  double vot_loss = 0.0;
  double transit_gain = 0.0;
  double net_vot = 0.0;
  double car_cost = 0.0;
  std::map<std::string, double> spending_by_category;
  std::map<std::string, double> reduction_by_category;  // fraction
  double spending_total = 0.0;
  double grand_total = 0.0;
  double funding_ratio = 0.0;
};

EconomicReport economic_impact(const EconomicInputs& in, const EconomicAssumptions& a);

struct CongestionStats {
  double meters = 0.0;
  double seconds = 0.0;
  double trip_seconds = 0.0;
  long long trips = 0;
  std::optional<double> mean_speed() const;
  std::optional<double> mean_trip_time() const;
};

// Car link traversals on links starting in `zones` (all when null), and
// completed drive trips with an end in `zones`.
CongestionStats congestion_stats(const MultimodalGraph& g, const DayResult& day, const std::set<int>* zones = nullptr);

struct CongestionDelta {
  CongestionStats baseline;
  CongestionStats scenario;
  std::optional<double> speed_change_pct;
  std::optional<double> travel_time_change_pct;
};

CongestionDelta congestion_delta(const CongestionStats& baseline, const CongestionStats& scenario);

struct ModeShare {
  std::array<double, kTravelModes> share{};
  std::array<long long, kTravelModes> count{};
  long long trips = 0;
  double transit = 0.0;
};

ModeShare mode_share(const std::vector<TripRecord>& trips);

// Per-group rate of activities lost between runs: 1 - scenario / baseline performed.
struct CancelRates {
  std::optional<double> work_school;
  std::optional<double> non_work;
  std::optional<double> overall;
};
CancelRates cancel_rates(const TypeCounts& baseline, const TypeCounts& scenario);

// Everything the comparison needs from one scenario run.
struct RunSummary {
  std::string scenario;
  std::string population_hash;
  long long fleet = 0;
  double vehicle_hours = 0.0;
  double transit_person_hours = 0.0;
  double person_hours = 0.0;
  long long boardings = 0;
  int iterations = 0;
  double final_gap = 0.0;
  CongestionStats region;
  CongestionStats city;
  ModeShare modes;
  std::vector<double> vehicles_in_network;
  std::vector<double> speed_profile;  // m/s per bin, 0 when no traffic
  double mean_person_trip_time = 0.0;
};

struct ImpactReport {
  std::string baseline;
  std::string scenario;
  CongestionDelta region;
  CongestionDelta city;
  ModeShare baseline_modes;
  ModeShare scenario_modes;
  long long baseline_boardings = 0;
  long long scenario_boardings = 0;
  CancellationTable region_table;
  CancellationTable city_table;
  CancelRates region_rates;
  CancelRates city_rates;
  EquityShares equity;
  CareDelta care;
  EconomicInputs econ_inputs;
  EconomicReport economics;
};

struct ReportInputs {
  const RunSummary* baseline = nullptr;
  const RunSummary* scenario = nullptr;
  const std::vector<ActivityOutcome>* baseline_outcomes = nullptr;
  const std::vector<ActivityOutcome>* scenario_outcomes = nullptr;
  const std::vector<Person>* persons = nullptr;
  const std::vector<Household>* households = nullptr;
  const std::set<int>* city = nullptr;
  EconomicAssumptions assumptions;
};

ImpactReport build_report(const ReportInputs& in);

nlohmann::json to_json(const ImpactReport& r);
nlohmann::json to_json(const CancellationTable& t);
nlohmann::json to_json(const EconomicReport& e);
nlohmann::json to_json(const RunSummary& s);
RunSummary run_summary_from_json(const nlohmann::json& j);

}  // namespace transitsim
