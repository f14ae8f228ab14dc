#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

namespace transitsim {

// Seconds since midnight of the simulated day.
using Seconds = double;

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr int kBinSeconds = 900;
inline constexpr int kBinsPerDay = 96;
inline constexpr double kDaySeconds = 86400.0;

inline int time_bin(Seconds t) {
  if (!(t > 0.0)) return 0;
  const int b = static_cast<int>(t / kBinSeconds);
  return b >= kBinsPerDay ? kBinsPerDay - 1 : b;
}

// User-facing input problems: bad config, malformed or missing files.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Internal invariant broken during simulation (e.g. event deadlock).
class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// 64-bit FNV-1a; used for config and artifact fingerprints.
inline std::uint64_t fnv1a(std::string_view data,
                           std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v);

// splitmix64 finalizer; combines keys into independent substream seeds.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t a,
                                 std::uint64_t b = 0, std::uint64_t c = 0) {
  return mix64(mix64(mix64(seed ^ 0x5eedULL) ^ a) ^ mix64(b + 0x1234567ULL) ^
               mix64(c + 0x89abcdefULL));
}

// Portable random stream: the std:: distributions are implementation
// defined, so sampling is done here on top of splitmix64 output.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    return n == 0 ? 0 : static_cast<std::uint64_t>(uniform() * static_cast<double>(n)) % n;
  }

  double normal() {
    // Box-Muller, one value per call.
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  double lognormal(double median, double sigma) {
    return median * std::exp(sigma * normal());
  }

  int poisson(double lambda) {
    if (lambda <= 0.0) return 0;
    if (lambda > 30.0) {
      const double x = std::round(lambda + std::sqrt(lambda) * normal());
      return x < 0.0 ? 0 : static_cast<int>(x);
    }
    const double limit = std::exp(-lambda);
    int k = 0;
    double p = uniform();
    while (p > limit) {
      ++k;
      p *= uniform();
    }
    return k;
  }

 private:
  std::uint64_t state_;
};

std::string format_hms(Seconds t);

}  // namespace transitsim
