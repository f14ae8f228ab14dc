#!/usr/bin/env python3
"""Writes the bundled toy city: a 23x23 street grid with bus and rail GTFS.

    python3 tools/make_toycity.py data/toycity
"""
import csv
import os
import sys

N = 23            # nodes per side
SPACING = 300.0   # metres between intersections
ARTERIALS = {2, 7, 11, 15, 20}
BUS_LINES = [7, 15]   # rows and columns with bus service
RAIL_LINE = 11        # row and column with rail
ZONE_BANDS = 5
# An agent stands for a block of residents. Storage is scaled through the
# jam spacing and flow capacity through the backward wave speed, the way
# sample runs scale storage and flow capacity separately.
JAM = 75.0
WAVE = 0.5
# A river runs between columns RIVER and RIVER + 1; cars cross on bridges only.
RIVER = 11
BRIDGES = {2, 7, 15, 20}


def band(i):
    return i * ZONE_BANDS // N


def zone_of(r, c):
    return band(r) * ZONE_BANDS + band(c) + 1


def node_id(r, c):
    return r * N + c + 1


def write_csv(path, header, rows):
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def hms(t):
    t = int(round(t))
    return "%02d:%02d:%02d" % (t // 3600, (t // 60) % 60, t % 60)


def roadway(out):
    nodes = [(node_id(r, c), c * SPACING, r * SPACING, zone_of(r, c)) for r in range(N) for c in range(N)]
    write_csv(os.path.join(out, "nodes.csv"), ["id", "x", "y", "zone"], nodes)
    links = []
    lid = 1
    for r in range(N):
        for c in range(N):
            for dr, dc in ((0, 1), (1, 0), (0, -1), (-1, 0)):
                r2, c2 = r + dr, c + dc
                if not (0 <= r2 < N and 0 <= c2 < N):
                    continue
                # Arterial when the link runs along an arterial row/column.
                art = (dr == 0 and r in ARTERIALS) or (dc == 0 and c in ARTERIALS)
                lanes, ffs = (2, 15.6) if art else (1, 11.2)
                modes = "auto|bus|truck|walk|bike"
                if {c, c2} == {RIVER, RIVER + 1} and r not in BRIDGES:
                    modes = "walk|bike"
                links.append((lid, node_id(r, c), node_id(r2, c2), SPACING, lanes, ffs, JAM, WAVE, modes, 1))
                lid += 1
    write_csv(os.path.join(out, "links.csv"),
              ["id", "from", "to", "length_m", "lanes", "ffs_mps", "jam_spacing_m", "wave_mps", "modes",
               "congestable"], links)
    return len(nodes), len(links)


def zones(out):
    rows = []
    for zr in range(ZONE_BANDS):
        for zc in range(ZONE_BANDS):
            z = zr * ZONE_BANDS + zc + 1
            ring = max(abs(zr - 2), abs(zc - 2))
            hh, emp, retail, school = {0: (100, 8000, 3000, 50), 1: (250, 1500, 800, 100),
                                       2: (150, 300, 300, 100)}[ring]
            rows.append((z, hh, emp, retail, school))
    write_csv(os.path.join(out, "zones.csv"), ["zone_id", "households", "employment", "retail", "school"], rows)


def headway(t, peak, off):
    h = t / 3600.0
    return peak if (6.5 <= h < 9.5 or 15.5 <= h < 18.5) else off


def gtfs(out):
    g = os.path.join(out, "gtfs")
    os.makedirs(g, exist_ok=True)
    write_csv(os.path.join(g, "agency.txt"), ["agency_id", "agency_name", "agency_url", "agency_timezone"],
              [("BUS", "Toy Bus", "http://example.org", "America/Chicago"),
               ("RAIL", "Toy Rail", "http://example.org", "America/Chicago")])
    write_csv(os.path.join(g, "calendar.txt"),
              ["service_id", "monday", "tuesday", "wednesday", "thursday", "friday", "saturday", "sunday",
               "start_date", "end_date"],
              [("WK", 1, 1, 1, 1, 1, 0, 0, "20250101", "20251231")])

    stops = {}
    routes = []
    trips = []
    stop_times = []

    def stop(sid, x, y, pr=0):
        stops.setdefault(sid, (sid, sid, round(x, 1), round(y, 1), pr))
        return sid

    def line(route_id, agency, rtype, points, speed, dwell, peak, off, start, end):
        routes.append((route_id, agency, route_id, rtype))
        for direction, pts in enumerate((points, points[::-1])):
            t = start + direction * 120
            k = 0
            while t < end:
                trip = "%s_%d_%03d" % (route_id, direction, k)
                trips.append((route_id, "WK", trip, direction))
                clock = t
                for seq, (sid, x, y) in enumerate(pts):
                    if seq > 0:
                        px, py = pts[seq - 1][1], pts[seq - 1][2]
                        clock += abs(x - px) / speed + abs(y - py) / speed
                    arr = clock
                    dep = clock + (dwell if 0 < seq < len(pts) - 1 else 0)
                    stop_times.append((trip, hms(arr), hms(dep), sid, seq + 1))
                    clock = dep
                t += headway(t, peak, off)
                k += 1

    # Buses on arterials: stops every second intersection, offset 10 m from the node.
    for i in BUS_LINES:
        row = [(stop("B_R%d_%d" % (i, c), c * SPACING, i * SPACING + 10), c * SPACING, i * SPACING)
               for c in range(0, N, 2)]
        col = [(stop("B_C%d_%d" % (i, r), i * SPACING + 10, r * SPACING), i * SPACING, r * SPACING)
               for r in range(0, N, 2)]
        # Scheduled speed leaves slack over the bus free-flow speed.
        line("BR%d" % i, "BUS", 3, row, 11.0, 20, 600, 1200, 5 * 3600, 23 * 3600)
        line("BC%d" % i, "BUS", 3, col, 11.0, 20, 600, 1200, 5 * 3600 + 300, 23 * 3600)

    # Rail: one line per axis, stations every third intersection, park-and-ride at the ends.
    idx = list(range(1, N, 3))
    row = [(stop("R_R%d" % c, c * SPACING, RAIL_LINE * SPACING - 20, 1 if c in (idx[0], idx[-1]) else 0),
            c * SPACING, RAIL_LINE * SPACING) for c in idx]
    col = [(stop("R_C%d" % r, RAIL_LINE * SPACING - 20, r * SPACING, 1 if r in (idx[0], idx[-1]) else 0),
            RAIL_LINE * SPACING, r * SPACING) for r in idx]
    line("RED", "RAIL", 1, row, 18.0, 30, 360, 600, 5 * 3600, 24 * 3600)
    line("BLUE", "RAIL", 1, col, 18.0, 30, 360, 600, 5 * 3600 + 180, 24 * 3600)

    write_csv(os.path.join(g, "stops.txt"), ["stop_id", "stop_name", "stop_x", "stop_y", "park_and_ride"],
              sorted(stops.values()))
    write_csv(os.path.join(g, "routes.txt"), ["route_id", "agency_id", "route_short_name", "route_type"], routes)
    write_csv(os.path.join(g, "trips.txt"), ["route_id", "service_id", "trip_id", "direction_id"], trips)
    write_csv(os.path.join(g, "stop_times.txt"),
              ["trip_id", "arrival_time", "departure_time", "stop_id", "stop_sequence"], stop_times)
    return len(stops), len(trips)


def main():
    out = sys.argv[1] if len(sys.argv) > 1 else "data/toycity"
    os.makedirs(out, exist_ok=True)
    n, l = roadway(out)
    zones(out)
    s, t = gtfs(out)
    print("wrote %s: %d nodes, %d links, %d stops, %d transit trips" % (out, n, l, s, t))


if __name__ == "__main__":
    main()
