#pragma once

#include <deque>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "transitsim/router.hpp"

namespace transitsim {

struct SimParams {
  double dt = 1.0;
  double reroute_factor = 1.5;     // en-route check when elapsed >= factor * predicted
  double min_dwell = 20.0;
  double board_seconds = 3.0;      // per boarding passenger
  double alight_seconds = 2.0;     // per alighting passenger
  double max_wait = 1800.0;        // passenger gives up after this long at a stop
  double postpone_tolerance = 300.0;
  double late_tolerance = 300.0;   // predicted lateness that triggers a mode re-check
  double horizon = 36.0 * 3600.0;
  double deadlock_seconds = 3600.0;
  bool check_invariants = false;
  bool record_trajectories = false;
  double trajectory_interval = 300.0;
  int workers = 1;
  LosParams los;
  ModeChoiceParams mode;
};

// Throws ConfigError when dt violates dt <= jam_spacing / wave_speed on any
// congestable link (for every vehicle class), or parameters are out of range.
void validate_sim_params(const MultimodalGraph& g, const SimParams& p);

struct VehicleState {
  int id = 0;
  VehicleClass cls = VehicleClass::car;
  int link = -1;  // -1 before entering and after leaving
  double position = 0.0;
  double speed = 0.0;
  int occupants = 1;
  int leader = -1;
  std::vector<int> route;
  int route_index = 0;
  Seconds departure = 0;
  Seconds link_entry = 0;
  Seconds arrival = -1;
  int owner = -1;
};

enum class TrafficEventKind : std::uint8_t { entered_link, arrived };

struct TrafficEvent {
  TrafficEventKind kind;
  int vehicle;
  int link;
  Seconds time;
};

struct LinkCounters {
  long long entered = 0;
  long long exited = 0;
};

// Car traversal times by entry bin, plus per-link distance/time totals.
struct LinkTimeRecords {
  std::vector<double> sum;    // link * 96 + bin
  std::vector<int> count;
  std::vector<double> meters;   // per link, completed car traversals
  std::vector<double> seconds;
  std::vector<double> censored;  // link * 96 + bin, longest time of cars still on the link at the end
  void resize(std::size_t links);
};

// Mean experienced time per link and entry bin; unobserved bins fall back to
// the longest censored stay, else free flow.
TravelTimeProfile experienced_profile(const MultimodalGraph& g, const LinkTimeRecords& r);

// Mesoscopic Lagrangian traffic: one lane-group per link, vehicles ordered
// front to back, each following link_speed() of the spacing to its leader.
class TrafficSim {
 public:
  TrafficSim(const MultimodalGraph& g, const SimParams& p);

  // Queues a vehicle at the upstream end of route[0]. Route must be non-empty.
  int add_vehicle(VehicleClass c, std::vector<int> route, Seconds departure, int owner,
                  int occupants = 1);
  // Puts a vehicle straight onto route[0] at `position`, behind every vehicle already there.
  int place_vehicle(VehicleClass c, std::vector<int> route, double position, Seconds now,
                    int owner = -1);

  // Advances [t, t + dt). Link entries and arrivals are appended to `events`
  // in deterministic order.
  void step(Seconds t, std::vector<TrafficEvent>& events);

  // Replaces the links after the vehicle's current one.
  void replace_route_tail(int vehicle, std::vector<int> tail);

  const VehicleState& vehicle(int id) const { return vehicles_[id]; }
  std::size_t vehicle_count() const { return vehicles_.size(); }
  const std::deque<int>& vehicles_on(int link) const { return on_link_[link]; }
  const std::vector<LinkCounters>& counters() const { return counters_; }
  std::size_t in_network() const { return in_network_; }
  std::size_t waiting() const { return waiting_; }
  bool idle() const { return in_network_ == 0 && waiting_ == 0; }
  bool moved_last_step() const { return moved_; }
  Seconds earliest_waiting_departure() const;

  // Throws SimulationError on a conservation or ordering violation.
  void check_invariants() const;

  const LinkTimeRecords& records() const { return records_; }
  // Adds censored stays for vehicles still on links at time `t`.
  void close_records(Seconds t);

  // Per time-of-day bin: car vehicle-seconds and car meters travelled.
  const std::vector<double>& bin_vehicle_seconds() const { return bin_vs_; }
  const std::vector<double>& bin_vehicle_meters() const { return bin_vm_; }
  double car_vehicle_seconds() const { return car_vs_; }

  // Smoothed recent car traversal time on a link and when it was last observed.
  double recent_time(int link) const { return recent_[link]; }
  Seconds recent_exit(int link) const { return recent_exit_[link]; }

 private:
  struct Proposal {
    double next = 0.0;
    double old = 0.0;
  };

  double min_gap(const Link& l, VehicleClass c) const {
    return l.class_jam_spacing(c) / l.lanes;
  }
  void move_link(int l);
  bool try_enter(int vid, int link, Seconds when, Seconds t, double proposed);
  void leave_link(int vid, int link, Seconds entry, Seconds time, bool last,
                  std::vector<TrafficEvent>& events);
  void accumulate(int vid, double meters, double seconds, Seconds t);

  const MultimodalGraph* g_;
  SimParams p_;
  std::vector<VehicleState> vehicles_;
  std::vector<Proposal> prop_;
  std::vector<std::deque<int>> on_link_;
  std::vector<std::deque<int>> origin_;  // per first link, by (departure, id)
  std::vector<LinkCounters> counters_;
  std::vector<double> room_;
  std::vector<int> active_;      // links with vehicles, rebuilt each step
  std::size_t in_network_ = 0;
  std::size_t waiting_ = 0;
  bool moved_ = false;
  LinkTimeRecords records_;
  std::vector<double> bin_vs_, bin_vm_;
  double car_vs_ = 0.0;
  std::vector<double> recent_;
  std::vector<Seconds> recent_exit_;
};

// --- transit service ---------------------------------------------------

struct Onboard {
  int passenger = 0;
  int alight_pos = 0;
  bool seated = false;
};

struct TransitVehicleState {
  int pattern = 0;
  int trip = 0;
  int next_stop = 0;
  std::vector<Onboard> onboard;
  int seated = 0;
  int standing = 0;
  int seat_capacity = 40;
  int crush_capacity = 70;
};

struct WaitingPassenger {
  int passenger = 0;
  int alight_pos = 0;
  Seconds since = 0;
};

struct DwellParams {
  double min_dwell = 20.0;
  double board_seconds = 3.0;
  double alight_seconds = 2.0;
};

struct StopService {
  std::vector<int> alighted;
  std::vector<int> boarded;
  Seconds dwell = 0;
};

// Alights everyone bound for `stop_pos`, moves standees into freed seats,
// then boards the queue in FIFO order up to crush capacity.
StopService serve_stop(TransitVehicleState& v, int stop_pos, std::deque<WaitingPassenger>& queue,
                       const DwellParams& p);

// --- activities and replanning -----------------------------------------

enum class OutcomeStatus : std::uint8_t { completed, shortened, postponed, cancelled };
enum class CancelReason : std::uint8_t { none, untravelable, too_late, cascade };
const char* key(OutcomeStatus s);
const char* key(CancelReason r);

struct ActivityOutcome {
  long long activity = 0;
  int person = 0;
  ActivityType type = ActivityType::leisure;
  int zone = -1;
  OutcomeStatus status = OutcomeStatus::completed;
  Seconds realized_start = -1;
  Seconds realized_duration = 0;
  CancelReason reason = CancelReason::none;
};

// Decision on reaching activity `a` at `arrival` (waits for planned_start
// when early). Flexible: keep, shorten to the remaining window, or cancel
// too_late. Mandatory: start late and compress, never below min_duration.
ActivityOutcome arrive_at_activity(const Activity& a, Seconds arrival, const SimParams& p);

// True when a flexible activity can no longer fit min_duration given the arrival.
bool activity_infeasible(const Activity& a, Seconds arrival);

// Runs the day ladder for one person with a fixed travel-time oracle:
// travel(from, to, depart) gives the arrival (std::nullopt = untravelable);
// index -1 is home. `lead(i)` is the planned travel time used to pick the
// departure for activity i.
using TravelFn = std::function<std::optional<Seconds>(int from, int to, Seconds depart)>;
std::vector<ActivityOutcome> execute_chain(const std::vector<Activity>& acts, const TravelFn& travel,
                                           const std::function<Seconds(int)>& lead,
                                           const SimParams& p);

// --- day simulation ----------------------------------------------------

struct AgentDay {
  int person = 0;
  int household = 0;
  int home_node = 0;
  bool car = false;  // a household vehicle is allocated for the day
  std::vector<Activity> activities;  // time-ordered, non-overlapping
  std::vector<int> nodes;            // location node per activity
  // One entry per trip: to each activity, then back home. nullopt = no mode.
  std::vector<std::optional<TravelMode>> modes;
  std::vector<Seconds> expected_time;        // per trip, used to time departures
  std::vector<std::vector<int>> prior_routes;  // per trip, drive route to reuse if valid
};

struct TripRecord {
  int person = 0;
  int trip = 0;                  // index in the person's day
  long long activity = -1;       // -1 for the trip home
  TravelMode planned_mode = TravelMode::drive;
  TravelMode mode = TravelMode::drive;
  int origin_node = 0;
  int dest_node = 0;
  Seconds departure = 0;
  Seconds arrival = -1;
  Seconds predicted = 0;
  double distance = 0.0;
  int boardings = 0;
  int reroutes = 0;
  bool mode_switched = false;
  bool gave_up = false;
  std::vector<int> links;        // links actually driven
  bool completed() const { return arrival >= 0; }
};

struct StopBoardings {
  int pattern = 0;
  int position = 0;
  long long boardings = 0;
  long long alightings = 0;
  long long denied = 0;
};

struct DayResult {
  std::vector<ActivityOutcome> outcomes;  // in agent order, then activity order
  std::vector<TripRecord> trips;
  LinkTimeRecords records;
  std::vector<StopBoardings> boardings;
  double vehicle_hours = 0.0;  // cars, including origin-queue waits
  double bus_hours = 0.0;
  double person_hours = 0.0;   // all completed trips
  std::vector<double> vehicles_in_network;  // cars, sampled at each bin start
  std::vector<double> bin_vehicle_seconds;
  std::vector<double> bin_vehicle_meters;
  long long steps = 0;
  long long max_onboard = 0;
  long long gave_up = 0;
};

DayResult run_day(const MultimodalGraph& g, const TravelTimeProfile& profile,
                  const std::vector<AgentDay>& agents, const SimParams& p,
                  std::ostream* trajectories = nullptr);

}  // namespace transitsim
