#pragma once

#include <optional>
#include <vector>

#include "transitsim/demand.hpp"
#include "transitsim/network.hpp"

namespace transitsim {

// Anything that can answer "entering link l at time t, when do I leave it?".
// Implementations must be FIFO: exit_time is non-decreasing in t.
class LinkTimeSource {
 public:
  virtual ~LinkTimeSource() = default;
  virtual Seconds exit_time(int link, Seconds t) const = 0;
};

// Expected car travel time per link in 96 fifteen-minute bins. Times are
// piecewise constant by entry bin; exit_time() takes the running maximum
// over earlier bins so that a later entry never leaves earlier.
class TravelTimeProfile final : public LinkTimeSource {
 public:
  TravelTimeProfile() = default;
  explicit TravelTimeProfile(const MultimodalGraph& g);  // free flow

  static TravelTimeProfile free_flow(const MultimodalGraph& g) { return TravelTimeProfile(g); }

  std::size_t link_count() const { return free_flow_.size(); }
  double time(int link, int bin) const { return times_[idx(link, bin)]; }
  double free_flow_time(int link) const { return free_flow_[link]; }
  // Entries are floored at the link's free-flow time.
  void set(int link, int bin, double seconds);
  void scale_all(double factor);

  Seconds exit_time(int link, Seconds t) const override;

  const std::vector<double>& values() const { return times_; }
  bool operator==(const TravelTimeProfile& o) const { return times_ == o.times_; }

 private:
  std::size_t idx(int link, int bin) const {
    return static_cast<std::size_t>(link) * kBinsPerDay + bin;
  }
  void rebuild_prefix(int link);

  std::vector<double> free_flow_;
  std::vector<double> times_;
  std::vector<double> prefix_;  // max over earlier bins of (bin end + time)
};

enum class LegKind : std::uint8_t { drive, walk, bike, board, ride, alight, wait, park };
const char* key(LegKind k);

struct Leg {
  LegKind kind = LegKind::walk;
  int ref = -1;       // link for drive/walk/bike; pattern for board/ride/alight; stop for wait/park
  int trip = -1;      // trip index within the pattern
  int from_pos = -1;  // stop positions within the pattern (ride)
  int to_pos = -1;
  int stop = -1;      // stop index for access/egress/transfer walks, board/alight
  Seconds start = 0;
  Seconds duration = 0;
};

struct TripPlan {
  bool found = false;
  int person = -1;
  long long activity = -1;
  TravelMode mode = TravelMode::drive;
  Seconds departure = 0;
  std::vector<Leg> legs;
  Seconds predicted_total = 0;
  double generalized_cost = 0;
  double distance = 0;  // meters on roadway/walk links
  int boardings() const;
  std::vector<int> links() const;  // roadway links of drive legs, in order
};

// bus routes on bus-permitted links at free-flow bus speed, ignoring the profile.
enum class UnimodalMode : std::uint8_t { drive, truck, walk, bike, bus };

struct RouterParams {
  double wait_weight = 2.0;
  double walk_weight = 2.0;
  double ivt_weight = 1.0;
  int max_boardings = 3;
};

struct SearchOptions {
  bool use_heuristic = true;
};

TripPlan shortest_path(const MultimodalGraph& g, const LinkTimeSource& times, int origin,
                       int destination, Seconds departure, UnimodalMode mode,
                       const RouterParams& rp = {}, SearchOptions opts = {});

enum class AccessMode : std::uint8_t { walk, drive };

TripPlan intermodal_path(const MultimodalGraph& g, const LinkTimeSource& times, int origin,
                         int destination, Seconds departure, AccessMode access,
                         const RouterParams& rp = {});

double generalized_cost(const std::vector<Leg>& legs, const RouterParams& rp);

struct LosParams {
  double auto_cost_per_km = 0.20;
  double transit_fare = 2.25;
  RouterParams router;
};

LosTable mode_levels_of_service(const MultimodalGraph& g, const LinkTimeSource& times,
                                int origin_zone, int destination_zone, Seconds departure,
                                const LosParams& p = {});

// Zone-centroid drive times at a given departure, for destination choice.
Skims drive_skims(const MultimodalGraph& g, const LinkTimeSource& times, Seconds departure);

}  // namespace transitsim
