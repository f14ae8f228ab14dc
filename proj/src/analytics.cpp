#include "transitsim/analytics.hpp"

#include <cmath>

namespace transitsim {

namespace {

using nlohmann::json;

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> ratio(double num, double den) {
  if (!(den > 0.0)) return std::nullopt;
  return num / den;
}

bool in_mask(const std::set<int>* zones, int zone) { return !zones || zones->count(zone) > 0; }

constexpr const char* kEntertainment = "entertainment";
constexpr const char* kFood = "food_away_from_home";
constexpr const char* kApparel = "apparel_and_services";

GroupShares shares(const std::vector<std::string>& groups, const std::vector<long long>& all,
                   const std::vector<long long>& non_work) {
  GroupShares out;
  long long ta = 0, tn = 0;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    ta += all[i];
    tn += non_work[i];
  }
  for (std::size_t i = 0; i < groups.size(); ++i) {
    out.overall.push_back({groups[i], all[i], ta > 0 ? std::optional<double>(double(all[i]) / ta) : std::nullopt});
    out.non_work.push_back(
        {groups[i], non_work[i], tn > 0 ? std::optional<double>(double(non_work[i]) / tn) : std::nullopt});
  }
  return out;
}

json to_json(const GroupShares& s) {
  auto list = [](const std::vector<ShareEntry>& v) {
    json a = json::array();
    for (const auto& e : v) a.push_back({{"group", e.group}, {"count", e.count}, {"share", opt(e.share)}});
    return a;
  };
  return {{"overall", list(s.overall)}, {"non_work", list(s.non_work)}};
}

json to_json(const CongestionStats& s) {
  return {{"meters", s.meters},
          {"seconds", s.seconds},
          {"trip_seconds", s.trip_seconds},
          {"trips", s.trips},
          {"mean_speed", opt(s.mean_speed())},
          {"mean_trip_time", opt(s.mean_trip_time())}};
}

CongestionStats congestion_from_json(const json& j) {
  CongestionStats s;
  s.meters = j.at("meters").get<double>();
  s.seconds = j.at("seconds").get<double>();
  s.trip_seconds = j.at("trip_seconds").get<double>();
  s.trips = j.at("trips").get<long long>();
  return s;
}

json to_json(const CongestionDelta& d) {
  return {{"baseline", to_json(d.baseline)},
          {"scenario", to_json(d.scenario)},
          {"speed_change_pct", opt(d.speed_change_pct)},
          {"travel_time_change_pct", opt(d.travel_time_change_pct)}};
}

json to_json(const ModeShare& m) {
  json share = json::object(), count = json::object();
  for (int i = 0; i < kTravelModes; ++i) {
    const char* k = key(static_cast<TravelMode>(i));
    share[k] = m.share[i];
    count[k] = m.count[i];
  }
  return {{"trips", m.trips}, {"transit", m.transit}, {"share", share}, {"count", count}};
}

ModeShare mode_share_from_json(const json& j) {
  ModeShare m;
  m.trips = j.at("trips").get<long long>();
  m.transit = j.at("transit").get<double>();
  for (int i = 0; i < kTravelModes; ++i) {
    const char* k = key(static_cast<TravelMode>(i));
    m.share[i] = j.at("share").at(k).get<double>();
    m.count[i] = j.at("count").at(k).get<long long>();
  }
  return m;
}

json to_json(const CancelRates& r) {
  return {{"work_school", opt(r.work_school)}, {"non_work", opt(r.non_work)}, {"overall", opt(r.overall)}};
}

json to_json(const CareDelta& c) {
  return {{"baseline", c.baseline}, {"scenario", c.scenario}, {"drop", c.drop}, {"drop_pct", opt(c.drop_pct)}};
}

}  // namespace

std::optional<double> percent_change(double baseline, double scenario) {
  if (baseline == 0.0) return std::nullopt;
  return (scenario - baseline) / baseline * 100.0;
}

CancellationTable cancellation_table(const TypeCounts& baseline, const TypeCounts& scenario) {
  CancellationTable t;
  t.total.type = "total";
  for (int i = 0; i < kActivityTypes; ++i) {
    CancellationRow r;
    r.type = key(static_cast<ActivityType>(i));
    r.baseline = baseline[i];
    r.scenario = scenario[i];
    r.change_pct = percent_change(r.baseline, r.scenario);
    t.total.baseline += r.baseline;
    t.total.scenario += r.scenario;
    t.rows.push_back(std::move(r));
  }
  t.total.change_pct = percent_change(t.total.baseline, t.total.scenario);
  return t;
}

TypeCounts performed_counts(const std::vector<ActivityOutcome>& outcomes, const std::set<int>* zones) {
  TypeCounts c{};
  for (const auto& o : outcomes)
    if (o.status != OutcomeStatus::cancelled && in_mask(zones, o.zone)) c[static_cast<int>(o.type)] += 1.0;
  return c;
}

CancellationTable cancellation_table(const std::vector<ActivityOutcome>& baseline,
                                     const std::vector<ActivityOutcome>& scenario, const std::set<int>* zones) {
  return cancellation_table(performed_counts(baseline, zones), performed_counts(scenario, zones));
}

EquityShares equity_shares(const std::vector<ActivityOutcome>& scenario, const std::vector<Person>& persons,
                           const std::vector<Household>& households) {
  std::map<int, const Person*> pmap;
  for (const auto& p : persons) pmap[p.id] = &p;
  std::map<int, const Household*> hmap;
  for (const auto& h : households) hmap[h.id] = &h;

  EquityShares out;
  std::vector<long long> g_all(2, 0), g_nw(2, 0), q_all(5, 0), q_nw(5, 0);
  for (const auto& o : scenario) {
    if (o.status != OutcomeStatus::cancelled) continue;
    auto pit = pmap.find(o.person);
    if (pit == pmap.end()) throw ConfigError("cancellation for unknown person " + std::to_string(o.person));
    const Person& p = *pit->second;
    auto hit = hmap.find(p.household);
    if (hit == hmap.end()) throw ConfigError("person " + std::to_string(p.id) + " has unknown household");
    const Household& h = *hit->second;
    const bool nw = !is_work_school(o.type);
    const int g = p.gender == Gender::female ? 0 : 1;
    const int q = std::clamp(h.income_quintile, 1, 5) - 1;
    ++out.cancellations;
    ++g_all[g];
    ++q_all[q];
    if (nw) {
      ++out.non_work_cancellations;
      ++g_nw[g];
      ++q_nw[q];
    }
    ++out.by_home_zone[h.home_zone];
    ++out.by_activity_zone[o.zone];
  }
  out.gender = shares({"female", "male"}, g_all, g_nw);
  out.quintile = shares({"q1", "q2", "q3", "q4", "q5"}, q_all, q_nw);
  return out;
}

CareDelta care_delta(const TypeCounts& baseline, const TypeCounts& scenario) {
  CareDelta d;
  for (int i = 0; i < kActivityTypes; ++i) {
    if (!is_care(static_cast<ActivityType>(i))) continue;
    d.baseline += baseline[i];
    d.scenario += scenario[i];
  }
  d.drop = d.baseline - d.scenario;
  if (d.baseline > 0.0) d.drop_pct = d.drop / d.baseline * 100.0;
  return d;
}

CareDelta care_delta(const std::vector<ActivityOutcome>& baseline, const std::vector<ActivityOutcome>& scenario) {
  return care_delta(performed_counts(baseline), performed_counts(scenario));
}

EconomicAssumptions EconomicAssumptions::defaults() {
  EconomicAssumptions a;
  // Back-solved per-household amounts (see README).
  a.spending = {{kEntertainment, 4218.9}, {kFood, 4114.7}, {kApparel, 2393.0}};
  a.category_of = {{"leisure", kEntertainment},
                   {"eat_out", kFood},
                   {"shop_major", kApparel},
                   {"shop_other", kApparel},
                   {"errands", kApparel}};
  return a;
}

void EconomicAssumptions::validate() const {
  const std::pair<const char*, double> scalars[] = {
      {"vot_auto", vot_auto},         {"vot_transit", vot_transit},
      {"weekdays_per_year", weekdays_per_year}, {"occupancy_auto", occupancy_auto},
      {"annual_car_cost", annual_car_cost},     {"households", households},
      {"annual_transit_funding", annual_transit_funding}};
  for (const auto& [name, v] : scalars)
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string("economics.") + name + " must be positive");
  for (const auto& [cat, v] : spending)
    if (!(v > 0.0)) throw ConfigError("economics spending for '" + cat + "' must be positive");
  for (const auto& [type, cat] : category_of) {
    activity_type_from_key(type);
    if (!spending.count(cat)) throw ConfigError("no spending amount for category '" + cat + "' (mapped from " + type + ")");
  }
  const std::pair<const char*, const char*> required[] = {{"shop_major", kApparel},
                                                         {"shop_other", kApparel},
                                                         {"errands", kApparel},
                                                         {"leisure", kEntertainment},
                                                         {"eat_out", kFood}};
  for (const auto& [type, cat] : required) {
    auto it = category_of.find(type);
    if (it == category_of.end() || it->second != cat)
      throw ConfigError(std::string("economics category map must send ") + type + " to " + cat);
  }
}

EconomicReport economic_impact(const EconomicInputs& in, const EconomicAssumptions& a) {
  a.validate();
  EconomicReport r;
  r.vot_loss = in.added_vehicle_hours_per_day * a.occupancy_auto * a.vot_auto * a.weekdays_per_year;
  r.transit_gain = in.transit_person_hours_per_day * a.vot_transit * a.weekdays_per_year;
  r.net_vot = r.vot_loss - r.transit_gain;
  r.car_cost = in.added_cars * a.annual_car_cost;

  std::map<std::string, std::pair<double, double>> weights;  // category -> (baseline, scenario)
  for (const auto& [type, cat] : a.category_of) {
    const int t = static_cast<int>(activity_type_from_key(type));
    weights[cat].first += in.baseline_counts[t];
    weights[cat].second += in.scenario_counts[t];
  }
  double built = 0.0;
  for (const auto& [cat, amount] : a.spending) {
    const auto w = weights[cat];
    const double reduction = w.first > 0.0 ? (w.first - w.second) / w.first : 0.0;
    r.reduction_by_category[cat] = reduction;
    r.spending_by_category[cat] = a.households * amount * reduction;
    built += r.spending_by_category[cat];
  }
  r.spending_total = in.spending_loss ? *in.spending_loss : built;
  r.grand_total = r.spending_total + r.net_vot + r.car_cost;
  r.funding_ratio = r.grand_total / a.annual_transit_funding;
  return r;
}

std::optional<double> CongestionStats::mean_speed() const { return ratio(meters, seconds); }
std::optional<double> CongestionStats::mean_trip_time() const {
  return trips > 0 ? std::optional<double>(trip_seconds / trips) : std::nullopt;
}

CongestionStats congestion_stats(const MultimodalGraph& g, const DayResult& day, const std::set<int>* zones) {
  CongestionStats s;
  const auto& links = g.links();
  const auto& nodes = g.nodes();
  for (std::size_t l = 0; l < day.records.meters.size() && l < links.size(); ++l) {
    if (!in_mask(zones, nodes[links[l].from].zone)) continue;
    s.meters += day.records.meters[l];
    s.seconds += day.records.seconds[l];
  }
  for (const auto& t : day.trips) {
    if (!t.completed() || t.mode != TravelMode::drive) continue;
    if (!in_mask(zones, nodes[t.origin_node].zone) && !in_mask(zones, nodes[t.dest_node].zone)) continue;
    s.trip_seconds += t.arrival - t.departure;
    ++s.trips;
  }
  return s;
}

CongestionDelta congestion_delta(const CongestionStats& baseline, const CongestionStats& scenario) {
  CongestionDelta d{baseline, scenario, std::nullopt, std::nullopt};
  const auto sb = baseline.mean_speed(), ss = scenario.mean_speed();
  if (sb && ss) d.speed_change_pct = percent_change(*sb, *ss);
  const auto tb = baseline.mean_trip_time(), ts = scenario.mean_trip_time();
  if (tb && ts) d.travel_time_change_pct = percent_change(*tb, *ts);
  return d;
}

ModeShare mode_share(const std::vector<TripRecord>& trips) {
  ModeShare m;
  for (const auto& t : trips) {
    if (!t.completed()) continue;
    ++m.count[static_cast<int>(t.mode)];
    ++m.trips;
  }
  for (int i = 0; i < kTravelModes; ++i) m.share[i] = m.trips > 0 ? double(m.count[i]) / m.trips : 0.0;
  m.transit = m.share[static_cast<int>(TravelMode::walk_to_transit)] +
              m.share[static_cast<int>(TravelMode::drive_to_transit)];
  return m;
}

CancelRates cancel_rates(const TypeCounts& baseline, const TypeCounts& scenario) {
  double bw = 0, sw = 0, bn = 0, sn = 0;
  for (int i = 0; i < kActivityTypes; ++i) {
    if (is_work_school(static_cast<ActivityType>(i))) {
      bw += baseline[i];
      sw += scenario[i];
    } else {
      bn += baseline[i];
      sn += scenario[i];
    }
  }
  auto rate = [](double b, double s) { return b > 0.0 ? std::optional<double>(1.0 - s / b) : std::nullopt; };
  return {rate(bw, sw), rate(bn, sn), rate(bw + bn, sw + sn)};
}

ImpactReport build_report(const ReportInputs& in) {
  if (!in.baseline || !in.scenario || !in.baseline_outcomes || !in.scenario_outcomes || !in.persons ||
      !in.households)
    throw ConfigError("build_report: missing inputs");
  const RunSummary& b = *in.baseline;
  const RunSummary& s = *in.scenario;
  ImpactReport r;
  r.baseline = b.scenario;
  r.scenario = s.scenario;
  r.region = congestion_delta(b.region, s.region);
  r.city = congestion_delta(b.city, s.city);
  r.baseline_modes = b.modes;
  r.scenario_modes = s.modes;
  r.baseline_boardings = b.boardings;
  r.scenario_boardings = s.boardings;

  const TypeCounts rb = performed_counts(*in.baseline_outcomes), rs = performed_counts(*in.scenario_outcomes);
  const TypeCounts cb = performed_counts(*in.baseline_outcomes, in.city);
  const TypeCounts cs = performed_counts(*in.scenario_outcomes, in.city);
  r.region_table = cancellation_table(rb, rs);
  r.city_table = cancellation_table(cb, cs);
  r.region_rates = cancel_rates(rb, rs);
  r.city_rates = cancel_rates(cb, cs);
  r.equity = equity_shares(*in.scenario_outcomes, *in.persons, *in.households);
  r.care = care_delta(rb, rs);

  r.econ_inputs.added_vehicle_hours_per_day = s.vehicle_hours - b.vehicle_hours;
  r.econ_inputs.transit_person_hours_per_day = b.transit_person_hours - s.transit_person_hours;
  r.econ_inputs.added_cars = static_cast<double>(s.fleet - b.fleet);
  r.econ_inputs.baseline_counts = rb;
  r.econ_inputs.scenario_counts = rs;
  r.economics = economic_impact(r.econ_inputs, in.assumptions);
  return r;
}

json to_json(const CancellationTable& t) {
  json rows = json::array();
  auto row = [](const CancellationRow& r) {
    return json{{"type", r.type}, {"baseline", r.baseline}, {"scenario", r.scenario}, {"change_pct", opt(r.change_pct)}};
  };
  for (const auto& r : t.rows) rows.push_back(row(r));
  return {{"rows", rows}, {"total", row(t.total)}};
}

json to_json(const EconomicReport& e) {
  return {{"vot_loss", e.vot_loss},
          {"transit_gain", e.transit_gain},
          {"net_vot", e.net_vot},
          {"car_cost", e.car_cost},
          {"spending_by_category", e.spending_by_category},
          {"reduction_by_category", e.reduction_by_category},
          {"spending_total", e.spending_total},
          {"grand_total", e.grand_total},
          {"funding_ratio", e.funding_ratio}};
}

json to_json(const ImpactReport& r) {
  json zones_home = json::object(), zones_act = json::object();
  for (const auto& [z, c] : r.equity.by_home_zone) zones_home[std::to_string(z)] = c;
  for (const auto& [z, c] : r.equity.by_activity_zone) zones_act[std::to_string(z)] = c;
  return {
      {"baseline", r.baseline},
      {"scenario", r.scenario},
      {"congestion", {{"region", to_json(r.region)}, {"city", to_json(r.city)}}},
      {"mode_share", {{"baseline", to_json(r.baseline_modes)}, {"scenario", to_json(r.scenario_modes)}}},
      {"boardings", {{"baseline", r.baseline_boardings}, {"scenario", r.scenario_boardings}}},
      {"activities", {{"region", to_json(r.region_table)}, {"city", to_json(r.city_table)}}},
      {"cancel_rates", {{"region", to_json(r.region_rates)}, {"city", to_json(r.city_rates)}}},
      {"equity",
       {{"cancellations", r.equity.cancellations},
        {"non_work_cancellations", r.equity.non_work_cancellations},
        {"gender", to_json(r.equity.gender)},
        {"quintile", to_json(r.equity.quintile)},
        {"by_home_zone", zones_home},
        {"by_activity_zone", zones_act}}},
      {"mobility_of_care", to_json(r.care)},
      {"economics",
       {{"inputs",
         {{"added_vehicle_hours_per_day", r.econ_inputs.added_vehicle_hours_per_day},
          {"transit_person_hours_per_day", r.econ_inputs.transit_person_hours_per_day},
          {"added_cars", r.econ_inputs.added_cars}}},
        {"result", to_json(r.economics)}}},
  };
}

json to_json(const RunSummary& s) {
  return {{"scenario", s.scenario},
          {"population_hash", s.population_hash},
          {"fleet", s.fleet},
          {"vehicle_hours", s.vehicle_hours},
          {"transit_person_hours", s.transit_person_hours},
          {"person_hours", s.person_hours},
          {"boardings", s.boardings},
          {"iterations", s.iterations},
          {"final_gap", s.final_gap},
          {"region", to_json(s.region)},
          {"city", to_json(s.city)},
          {"modes", to_json(s.modes)},
          {"vehicles_in_network", s.vehicles_in_network},
          {"speed_profile", s.speed_profile},
          {"mean_person_trip_time", s.mean_person_trip_time}};
}

RunSummary run_summary_from_json(const json& j) {
  RunSummary s;
  s.scenario = j.at("scenario").get<std::string>();
  s.population_hash = j.at("population_hash").get<std::string>();
  s.fleet = j.at("fleet").get<long long>();
  s.vehicle_hours = j.at("vehicle_hours").get<double>();
  s.transit_person_hours = j.at("transit_person_hours").get<double>();
  s.person_hours = j.at("person_hours").get<double>();
  s.boardings = j.at("boardings").get<long long>();
  s.iterations = j.at("iterations").get<int>();
  s.final_gap = j.at("final_gap").get<double>();
  s.region = congestion_from_json(j.at("region"));
  s.city = congestion_from_json(j.at("city"));
  s.modes = mode_share_from_json(j.at("modes"));
  s.vehicles_in_network = j.at("vehicles_in_network").get<std::vector<double>>();
  s.speed_profile = j.at("speed_profile").get<std::vector<double>>();
  s.mean_person_trip_time = j.at("mean_person_trip_time").get<double>();
  return s;
}

}  // namespace transitsim
