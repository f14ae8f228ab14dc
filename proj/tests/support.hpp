#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "transitsim/network.hpp"

namespace tstest {

using namespace transitsim;

// Scratch directory removed on scope exit.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "ts") {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            (tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& s) const { return path_ / s; }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  std::filesystem::create_directories(p.parent_path());
  std::ofstream(p, std::ios::binary) << text;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline Link make_link(int id, int from, int to, double length, double ffs, int lanes = 1,
                      ModeMask modes = kAuto | kBus | kWalk | kBike) {
  Link l;
  l.id = id;
  l.from = from;
  l.to = to;
  l.length = length;
  l.free_flow_speed = ffs;
  l.lanes = lanes;
  l.modes = modes;
  l.jam_spacing = 7.5;
  l.wave_speed = 6.0;
  return l;
}

// nx * ny grid, node id = index + 1, links both ways between neighbours.
inline RoadwayData grid_roadway(int nx, int ny, double spacing, double ffs,
                                ModeMask modes = kAuto | kBus | kWalk | kBike) {
  RoadwayData r;
  for (int y = 0; y < ny; ++y)
    for (int x = 0; x < nx; ++x) r.nodes.push_back({y * nx + x + 1, x * spacing, y * spacing, 1});
  int id = 1;
  for (int y = 0; y < ny; ++y) {
    for (int x = 0; x < nx; ++x) {
      const int a = y * nx + x;
      if (x + 1 < nx) {
        r.links.push_back(make_link(id++, a, a + 1, spacing, ffs, 1, modes));
        r.links.push_back(make_link(id++, a + 1, a, spacing, ffs, 1, modes));
      }
      if (y + 1 < ny) {
        r.links.push_back(make_link(id++, a, a + nx, spacing, ffs, 1, modes));
        r.links.push_back(make_link(id++, a + nx, a, spacing, ffs, 1, modes));
      }
    }
  }
  return r;
}

inline MultimodalGraph make_graph(RoadwayData r, GtfsFeed feed = {}, NetworkParams p = {}) {
  return MultimodalGraph::build(std::move(r), std::move(feed), p);
}

// Upper tail of the chi-square distribution with k degrees of freedom.
inline double chi2_sf(double x, int k) {
  const double a = 0.5 * k, z = 0.5 * x;
  if (z <= 0.0) return 1.0;
  const double lg = std::lgamma(a);
  if (z < a + 1.0) {
    double term = 1.0 / a, sum = term;
    for (int n = 1; n < 1000; ++n) {
      term *= z / (a + n);
      sum += term;
      if (term < sum * 1e-15) break;
    }
    return 1.0 - sum * std::exp(-z + a * std::log(z) - lg);
  }
  // Lentz continued fraction for Q(a, z).
  double b = z + 1.0 - a, c = 1e300, d = 1.0 / b, h = d;
  for (int i = 1; i < 1000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < 1e-300) d = 1e-300;
    c = b + an / c;
    if (std::fabs(c) < 1e-300) c = 1e-300;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-15) break;
  }
  return std::exp(-z + a * std::log(z) - lg) * h;
}

// Pearson statistic. Cells with expected count below 5 are merged, smallest
// first, until every group reaches 5.
struct ChiSquare {
  double stat = 0.0;
  int dof = 0;
  double p_value = 1.0;
};

inline ChiSquare chi_square(const std::vector<long long>& observed, const std::vector<double>& prob, long long n) {
  std::vector<std::size_t> order(prob.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return prob[a] < prob[b]; });
  std::vector<std::pair<double, double>> groups;  // expected, observed
  double e = 0.0, o = 0.0;
  for (std::size_t i : order) {
    e += prob[i] * static_cast<double>(n);
    o += static_cast<double>(observed[i]);
    if (e >= 5.0) {
      groups.emplace_back(e, o);
      e = o = 0.0;
    }
  }
  if (e > 0.0 || o > 0.0) {
    if (groups.empty()) groups.emplace_back(e, o);
    else {
      groups.back().first += e;
      groups.back().second += o;
    }
  }
  ChiSquare out;
  for (const auto& [ge, go] : groups)
    out.stat += ge > 0.0 ? (go - ge) * (go - ge) / ge : (go > 0.0 ? 1e300 : 0.0);
  out.dof = std::max(1, static_cast<int>(groups.size()) - 1);
  out.p_value = chi2_sf(out.stat, out.dof);
  return out;
}

}  // namespace tstest
