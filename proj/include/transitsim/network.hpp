#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

#include "transitsim/common.hpp"

namespace transitsim {

enum class VehicleClass : std::uint8_t { car = 0, bus = 1, truck = 2 };
inline constexpr int kVehicleClasses = 3;

enum ModeBit : std::uint8_t {
  kAuto = 1 << 0,
  kBus = 1 << 1,
  kTruck = 1 << 2,
  kWalk = 1 << 3,
  kBike = 1 << 4,
};
using ModeMask = std::uint8_t;

// "auto|bus|walk" (also ';' or ' ' separated). Unknown tokens throw.
ModeMask parse_mode_mask(const std::string& text);
std::string mode_mask_string(ModeMask m);

// Multipliers applied to a link's base free-flow speed and jam spacing.
struct ClassFactors {
  double ffs = 1.0;
  double jam = 1.0;
  bool operator==(const ClassFactors&) const = default;
};

struct Node {
  int id = 0;
  double x = 0.0;
  double y = 0.0;
  int zone = 0;
  bool operator==(const Node&) const = default;
};

struct Link {
  int id = 0;
  int from = 0;  // node index
  int to = 0;    // node index
  double length = 0.0;
  int lanes = 1;
  double free_flow_speed = 0.0;
  double jam_spacing = 7.5;
  double wave_speed = 6.0;
  ModeMask modes = kAuto;
  bool congestable = true;
  std::array<ClassFactors, kVehicleClasses> factors{};

  bool allows(ModeBit m) const { return (modes & m) != 0; }
  double class_free_flow(VehicleClass c) const {
    return free_flow_speed * factors[static_cast<int>(c)].ffs;
  }
  double class_jam_spacing(VehicleClass c) const {
    return jam_spacing * factors[static_cast<int>(c)].jam;
  }
  double free_flow_time(VehicleClass c = VehicleClass::car) const {
    return length / class_free_flow(c);
  }
  bool operator==(const Link&) const = default;
};

// Equilibrium speed for a vehicle of class `c` at per-lane `spacing`
// (triangular fundamental diagram in spacing form), clamped to
// [0, class free-flow speed].
double link_speed(const Link& link, double spacing, VehicleClass c);

enum class TransitMode : std::uint8_t { bus = 0, metro_rail = 1, commuter_rail = 2 };
std::string to_string(TransitMode m);
TransitMode transit_mode_from_string(const std::string& s);

struct TransitStop {
  std::string gtfs_id;
  std::string name;
  double x = 0.0;
  double y = 0.0;
  int node = -1;  // nearest walk-layer node index
  bool park_and_ride = false;
  bool accessible = true;
  bool operator==(const TransitStop&) const = default;
};

struct TransitTrip {
  std::string trip_id;
  std::vector<Seconds> arrivals;
  std::vector<Seconds> departures;
  Seconds first_departure() const { return departures.front(); }
  bool operator==(const TransitTrip&) const = default;
};

struct TransitPattern {
  std::string route_id;
  std::string agency;
  TransitMode mode = TransitMode::bus;
  std::vector<int> stops;  // stop indices, in travel order
  std::vector<TransitTrip> trips;  // sorted by first departure
  int seat_capacity = 40;
  int crush_capacity = 70;
  bool operator==(const TransitPattern&) const = default;

  // True when no trip overtakes another at any stop, so the earliest
  // boardable trip is also the earliest arriving everywhere downstream.
  bool is_fifo() const;
};

enum class AccessKind : std::uint8_t { walk = 0, drive = 1 };

struct AccessEdge {
  int stop = 0;
  int node = 0;
  double distance = 0.0;
  AccessKind kind = AccessKind::walk;
  bool operator==(const AccessEdge&) const = default;
};

struct TransferEdge {
  int from_stop = 0;
  int to_stop = 0;
  double distance = 0.0;
  bool operator==(const TransferEdge&) const = default;
};

struct NetworkParams {
  double walk_speed = 1.34;
  double bike_speed = 4.5;
  double max_access_walk = 800.0;
  double park_time = 120.0;  // parking before a drive-to-transit boarding
  std::array<ClassFactors, kVehicleClasses> class_defaults{
      ClassFactors{1.0, 1.0}, ClassFactors{0.85, 2.0}, ClassFactors{0.9, 2.0}};
  bool operator==(const NetworkParams&) const = default;
};

// Result of reading a GTFS static feed for one service date.
struct GtfsFeed {
  std::vector<TransitStop> stops;
  std::vector<TransitPattern> patterns;
  std::vector<std::string> warnings;
};

struct ServiceDate {
  int year = 1970;
  int month = 1;
  int day = 1;
  static ServiceDate parse(const std::string& yyyymmdd);
  int as_int() const { return year * 10000 + month * 100 + day; }
  int weekday() const;  // 0 = Sunday
};

struct GtfsOptions {
  // Seat/crush capacity by TransitMode when routes.txt does not carry them.
  std::array<int, 3> seat_capacity{40, 200, 500};
  std::array<int, 3> crush_capacity{70, 600, 900};
};

// Reads stops/routes/trips/stop_times/calendar (+ optional calendar_dates).
// Planar coordinates come from optional stop_x/stop_y columns, falling back
// to stop_lon/stop_lat taken as-is.
GtfsFeed parse_gtfs(const std::filesystem::path& feed_dir, ServiceDate date,
                    const GtfsOptions& options = {});

struct RoadwayData {
  std::vector<Node> nodes;
  std::vector<Link> links;  // from/to already resolved to node indices
};

RoadwayData read_roadway(const std::filesystem::path& nodes_csv,
                         const std::filesystem::path& links_csv,
                         const NetworkParams& params = {});

// Immutable after construction; concurrent readers are safe.
class MultimodalGraph {
 public:
  struct WalkArc {
    int link;
    int to;
  };
  struct StopVisit {
    int pattern;
    int position;
  };

  MultimodalGraph() = default;

  static MultimodalGraph build(RoadwayData roadway, GtfsFeed feed, const NetworkParams& params);

  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Link>& links() const { return links_; }
  const std::vector<TransitStop>& stops() const { return stops_; }
  const std::vector<TransitPattern>& patterns() const { return patterns_; }
  const std::vector<AccessEdge>& access_edges() const { return access_; }
  const std::vector<TransferEdge>& transfer_edges() const { return transfers_; }
  const NetworkParams& params() const { return params_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  int node_index(int node_id) const;  // -1 when absent
  const std::vector<int>& out_links(int node) const { return out_[node]; }
  const std::vector<WalkArc>& walk_arcs(int node) const { return walk_[node]; }
  const std::vector<WalkArc>& bike_arcs(int node) const { return bike_[node]; }
  const std::vector<int>& stop_access(int stop) const { return stop_access_[stop]; }
  const std::vector<int>& node_access(int node) const { return node_access_[node]; }
  const std::vector<int>& stop_transfers(int stop) const { return stop_transfers_[stop]; }
  const std::vector<StopVisit>& stop_visits(int stop) const { return stop_visits_[stop]; }
  bool pattern_fifo(int pattern) const { return pattern_fifo_[pattern] != 0; }

  int inaccessible_stop_count() const;
  bool has_transit() const { return !patterns_.empty(); }

  const std::vector<int>& zones() const { return zone_ids_; }
  int zone_centroid(int zone) const;  // node index, -1 when unknown

  double straight_distance(int a, int b) const;
  // Lower bound on travel time between nodes at `speed`, accounting for
  // links shorter than their endpoints' straight-line distance.
  double heuristic_seconds(int a, int b, double max_speed) const;
  double max_free_flow(VehicleClass c) const;
  // min(1, min over links of length / straight-line endpoint distance)
  double heuristic_scale() const { return heuristic_scale_; }

  MultimodalGraph without_patterns(const std::vector<bool>& keep_pattern) const;

  std::string to_json() const;
  static MultimodalGraph from_json(const std::string& text);

  bool same_content(const MultimodalGraph& o) const;

 private:
  void index();

  std::vector<Node> nodes_;
  std::vector<Link> links_;
  std::vector<TransitStop> stops_;
  std::vector<TransitPattern> patterns_;
  std::vector<AccessEdge> access_;
  std::vector<TransferEdge> transfers_;
  NetworkParams params_;
  std::vector<std::string> warnings_;

  std::unordered_map<int, int> node_by_id_;
  std::vector<std::vector<int>> out_;
  std::vector<std::vector<WalkArc>> walk_;
  std::vector<std::vector<WalkArc>> bike_;
  std::vector<std::vector<int>> stop_access_;
  std::vector<std::vector<int>> node_access_;
  std::vector<std::vector<int>> stop_transfers_;
  std::vector<std::vector<StopVisit>> stop_visits_;
  std::vector<char> pattern_fifo_;
  std::vector<int> zone_ids_;
  std::unordered_map<int, int> centroid_;
  double heuristic_scale_ = 1.0;
  std::array<double, kVehicleClasses> max_ffs_{};
};

}  // namespace transitsim
