#include <algorithm>
#include <chrono>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "transitsim/csv.hpp"
#include "transitsim/network.hpp"

namespace transitsim {

namespace {

bool valid_date(int y, int m, int d) {
  namespace ch = std::chrono;
  return ch::year_month_day{ch::year{y}, ch::month{static_cast<unsigned>(m)},
                            ch::day{static_cast<unsigned>(d)}}
      .ok();
}

}  // namespace

ServiceDate ServiceDate::parse(const std::string& yyyymmdd) {
  if (yyyymmdd.size() != 8 || !std::all_of(yyyymmdd.begin(), yyyymmdd.end(), ::isdigit))
    throw ConfigError("service date must be YYYYMMDD, got '" + yyyymmdd + "'");
  ServiceDate d;
  d.year = std::stoi(yyyymmdd.substr(0, 4));
  d.month = std::stoi(yyyymmdd.substr(4, 2));
  d.day = std::stoi(yyyymmdd.substr(6, 2));
  if (!valid_date(d.year, d.month, d.day))
    throw ConfigError("invalid calendar date '" + yyyymmdd + "'");
  return d;
}

int ServiceDate::weekday() const {
  namespace ch = std::chrono;
  const ch::year_month_day ymd{ch::year{year}, ch::month{static_cast<unsigned>(month)},
                               ch::day{static_cast<unsigned>(day)}};
  return static_cast<int>(ch::weekday{ch::sys_days{ymd}}.c_encoding());
}

namespace {

// "H:MM:SS" with hours possibly beyond 24. Returns -1 when malformed.
Seconds parse_gtfs_time(const std::string& s) {
  int parts[3] = {0, 0, 0};
  int idx = 0;
  bool digit = false;
  for (char c : s) {
    if (c == ' ') continue;
    if (c == ':') {
      if (!digit || ++idx > 2) return -1;
      digit = false;
      continue;
    }
    if (c < '0' || c > '9') return -1;
    parts[idx] = parts[idx] * 10 + (c - '0');
    digit = true;
  }
  if (idx != 2 || !digit || parts[1] > 59 || parts[2] > 59) return -1;
  return parts[0] * 3600.0 + parts[1] * 60.0 + parts[2];
}

TransitMode mode_for_route_type(long long t) {
  switch (t) {
    case 0:
    case 1:
    case 5:
    case 12: return TransitMode::metro_rail;
    case 2: return TransitMode::commuter_rail;
    default: return TransitMode::bus;
  }
}

struct RouteInfo {
  std::string agency;
  TransitMode mode = TransitMode::bus;
  int seat = 0;
  int crush = 0;
};

struct StopTimeRow {
  long long sequence;
  int stop;
  Seconds arrival;
  Seconds departure;
};

}  // namespace

GtfsFeed parse_gtfs(const std::filesystem::path& feed_dir, ServiceDate date,
                    const GtfsOptions& options) {
  for (const char* f : {"stops.txt", "routes.txt", "trips.txt", "stop_times.txt", "calendar.txt"}) {
    if (!std::filesystem::exists(feed_dir / f))
      throw ParseError("GTFS feed " + feed_dir.string() + ": missing required file " + f);
  }
  GtfsFeed feed;

  // Active services on the requested date.
  std::set<std::string> active;
  {
    static const char* kDays[7] = {"sunday",   "monday", "tuesday", "wednesday",
                                   "thursday", "friday", "saturday"};
    const auto cal = csv::Table::read_file(feed_dir / "calendar.txt");
    const auto sid = cal.column("service_id"), sd = cal.column("start_date"),
               ed = cal.column("end_date"), wd = cal.column(kDays[date.weekday()]);
    const long long today = date.as_int();
    for (std::size_t r = 0; r < cal.size(); ++r) {
      if (cal.at(r, wd) != "1") continue;
      if (csv::to_int(cal.at(r, sd), cal, "start_date") > today) continue;
      if (csv::to_int(cal.at(r, ed), cal, "end_date") < today) continue;
      active.insert(cal.at(r, sid));
    }
    if (std::filesystem::exists(feed_dir / "calendar_dates.txt")) {
      const auto cd = csv::Table::read_file(feed_dir / "calendar_dates.txt");
      const auto csid = cd.column("service_id"), cdate = cd.column("date"),
                 cex = cd.column("exception_type");
      for (std::size_t r = 0; r < cd.size(); ++r) {
        if (csv::to_int(cd.at(r, cdate), cd, "date") != today) continue;
        const auto ex = csv::to_int(cd.at(r, cex), cd, "exception_type");
        if (ex == 1) active.insert(cd.at(r, csid));
        else if (ex == 2) active.erase(cd.at(r, csid));
      }
    }
  }

  std::unordered_map<std::string, int> stop_index;
  {
    const auto st = csv::Table::read_file(feed_dir / "stops.txt");
    const auto cid = st.column("stop_id");
    const auto cname = st.find_column("stop_name");
    auto cx = st.find_column("stop_x"), cy = st.find_column("stop_y");
    if (!cx || !cy) {
      cx = st.column("stop_lon");
      cy = st.column("stop_lat");
    }
    const auto cpr = st.find_column("park_and_ride");
    for (std::size_t r = 0; r < st.size(); ++r) {
      TransitStop s;
      s.gtfs_id = st.at(r, cid);
      if (cname) s.name = st.at(r, *cname);
      s.x = csv::to_double(st.at(r, *cx), st, "stop x");
      s.y = csv::to_double(st.at(r, *cy), st, "stop y");
      if (cpr) s.park_and_ride = st.at(r, *cpr) == "1";
      if (!stop_index.emplace(s.gtfs_id, static_cast<int>(feed.stops.size())).second)
        throw ParseError("stops.txt: duplicate stop_id " + s.gtfs_id);
      feed.stops.push_back(std::move(s));
    }
  }

  std::unordered_map<std::string, RouteInfo> routes;
  {
    const auto rt = csv::Table::read_file(feed_dir / "routes.txt");
    const auto rid = rt.column("route_id"), rtype = rt.column("route_type");
    const auto ragency = rt.find_column("agency_id"), rseat = rt.find_column("seat_capacity"),
               rcrush = rt.find_column("crush_capacity");
    for (std::size_t r = 0; r < rt.size(); ++r) {
      RouteInfo info;
      info.mode = mode_for_route_type(csv::to_int(rt.at(r, rtype), rt, "route_type"));
      if (ragency) info.agency = rt.at(r, *ragency);
      const int m = static_cast<int>(info.mode);
      info.seat = options.seat_capacity[m];
      info.crush = options.crush_capacity[m];
      if (rseat && !rt.at(r, *rseat).empty())
        info.seat = static_cast<int>(csv::to_int(rt.at(r, *rseat), rt, "seat_capacity"));
      if (rcrush && !rt.at(r, *rcrush).empty())
        info.crush = static_cast<int>(csv::to_int(rt.at(r, *rcrush), rt, "crush_capacity"));
      if (info.seat <= 0 || info.crush <= 0 || info.seat > info.crush)
        throw ParseError("routes.txt: route " + rt.at(r, rid) +
                         " needs 0 < seat_capacity <= crush_capacity");
      routes.emplace(rt.at(r, rid), info);
    }
  }

  // trip_id -> (route_id), restricted to active services; file order kept.
  std::unordered_map<std::string, std::string> trip_route;
  std::vector<std::string> trip_order;
  {
    const auto tt = csv::Table::read_file(feed_dir / "trips.txt");
    const auto tid = tt.column("trip_id"), troute = tt.column("route_id"),
               tsvc = tt.column("service_id");
    for (std::size_t r = 0; r < tt.size(); ++r) {
      if (!active.count(tt.at(r, tsvc))) continue;
      if (!routes.count(tt.at(r, troute))) {
        feed.warnings.push_back("trip " + tt.at(r, tid) + " rejected: unknown route " +
                                tt.at(r, troute));
        continue;
      }
      if (trip_route.emplace(tt.at(r, tid), tt.at(r, troute)).second)
        trip_order.push_back(tt.at(r, tid));
    }
  }

  std::unordered_map<std::string, std::vector<StopTimeRow>> rows;
  std::unordered_set<std::string> rejected;
  {
    const auto sx = csv::Table::read_file(feed_dir / "stop_times.txt");
    const auto ctrip = sx.column("trip_id"), carr = sx.column("arrival_time"),
               cdep = sx.column("departure_time"), cstop = sx.column("stop_id"),
               cseq = sx.column("stop_sequence");
    for (std::size_t r = 0; r < sx.size(); ++r) {
      const auto& trip = sx.at(r, ctrip);
      if (!trip_route.count(trip) || rejected.count(trip)) continue;
      auto s = stop_index.find(sx.at(r, cstop));
      if (s == stop_index.end()) {
        feed.warnings.push_back("trip " + trip + " rejected: dangling stop reference " +
                                sx.at(r, cstop));
        rejected.insert(trip);
        continue;
      }
      Seconds a = parse_gtfs_time(sx.at(r, carr));
      Seconds d = parse_gtfs_time(sx.at(r, cdep));
      if (a < 0 && d >= 0) a = d;
      if (d < 0 && a >= 0) d = a;
      if (a < 0) {
        feed.warnings.push_back("trip " + trip + " rejected: untimed or malformed stop time");
        rejected.insert(trip);
        continue;
      }
      rows[trip].push_back({csv::to_int(sx.at(r, cseq), sx, "stop_sequence"), s->second, a, d});
    }
  }

  using Key = std::pair<std::string, std::vector<int>>;
  std::map<Key, TransitPattern> grouped;
  for (const auto& trip : trip_order) {
    if (rejected.count(trip)) continue;
    auto it = rows.find(trip);
    if (it == rows.end() || it->second.size() < 2) {
      feed.warnings.push_back("trip " + trip + " rejected: fewer than two stop times");
      continue;
    }
    auto& st = it->second;
    std::stable_sort(st.begin(), st.end(),
                     [](const StopTimeRow& a, const StopTimeRow& b) { return a.sequence < b.sequence; });
    bool monotone = true;
    for (std::size_t i = 0; i < st.size() && monotone; ++i) {
      if (st[i].departure < st[i].arrival) monotone = false;
      if (i > 0 && !(st[i].arrival > st[i - 1].departure)) monotone = false;
    }
    if (!monotone) {
      feed.warnings.push_back("trip " + trip + " rejected: stop times not strictly increasing");
      continue;
    }
    Key key{trip_route.at(trip), {}};
    TransitTrip tr;
    tr.trip_id = trip;
    for (const auto& row : st) {
      key.second.push_back(row.stop);
      tr.arrivals.push_back(row.arrival);
      tr.departures.push_back(row.departure);
    }
    auto [pit, fresh] = grouped.try_emplace(key);
    if (fresh) {
      const auto& info = routes.at(key.first);
      pit->second.route_id = key.first;
      pit->second.agency = info.agency;
      pit->second.mode = info.mode;
      pit->second.stops = key.second;
      pit->second.seat_capacity = info.seat;
      pit->second.crush_capacity = info.crush;
    }
    pit->second.trips.push_back(std::move(tr));
  }
  for (auto& [key, p] : grouped) {
    std::stable_sort(p.trips.begin(), p.trips.end(), [](const TransitTrip& a, const TransitTrip& b) {
      if (a.first_departure() != b.first_departure()) return a.first_departure() < b.first_departure();
      return a.trip_id < b.trip_id;
    });
    feed.patterns.push_back(std::move(p));
  }
  return feed;
}

}  // namespace transitsim
