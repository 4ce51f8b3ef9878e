#pragma once

// Shared scalar types, error hierarchy and deterministic RNG helpers.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace stgcs {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Inclusive containment tolerance used for all boundary comparisons.
// Sets produced by decomposition intentionally share faces; closed
// halfspaces keep the graph connected across them.
inline constexpr double kTol = 1e-9;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Caller violated an interface contract (e.g. dimension mismatch).
struct DimensionError : Error {
  using Error::Error;
};

// The LP back-end failed to converge or returned an inconsistent status.
struct SolverError : Error {
  using Error::Error;
};

// A bounding box was requested for a set unbounded in some coordinate.
struct UnboundedSetError : Error {
  using Error::Error;
};

// A trajectory to be reserved leaves the free space of the graph.
struct CoverageError : Error {
  using Error::Error;
};

// Malformed instance/solution files or inconsistent input geometry.
struct InputError : Error {
  using Error::Error;
};

// A space-time state: spatial position plus a time stamp in seconds.
struct State {
  Vec p;
  double t = 0.0;

  State() = default;
  State(Vec position, double time) : p(std::move(position)), t(time) {}
};

inline State make_state(std::initializer_list<double> p, double t) {
  Vec v(static_cast<Eigen::Index>(p.size()));
  Eigen::Index i = 0;
  for (double c : p) v[i++] = c;
  return State(std::move(v), t);
}

// Directed space-time line segment; y.t >= x.t always.
struct Segment {
  State x;
  State y;

  Segment() = default;
  Segment(State a, State b) : x(std::move(a)), y(std::move(b)) {}

  double duration() const { return y.t - x.t; }

  // Position at absolute time t, clamped to the segment's time span.
  Vec position_at(double t) const {
    const double dur = duration();
    if (dur <= 0.0) return x.p;
    double s = (t - x.t) / dur;
    s = std::min(1.0, std::max(0.0, s));
    return x.p + s * (y.p - x.p);
  }
};

// RNG helpers built directly on the mt19937_64 output stream so results
// are identical across standard library implementations.
inline double uniform01(std::mt19937_64& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

inline double uniform_real(std::mt19937_64& g, double lo, double hi) {
  return lo + (hi - lo) * uniform01(g);
}

// Unbiased integer in [0, n).
inline std::uint64_t uniform_index(std::mt19937_64& g, std::uint64_t n) {
  if (n <= 1) return 0;
  const std::uint64_t bound = ~std::uint64_t{0} - ~std::uint64_t{0} % n;
  std::uint64_t v;
  do {
    v = g();
  } while (v >= bound);
  return v % n;
}

template <typename T>
void shuffle_inplace(std::vector<T>& items, std::mt19937_64& g) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(uniform_index(g, i));
    std::swap(items[i - 1], items[j]);
  }
}

inline std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t v) {
  // splitmix64-style mixing
  v += 0x9e3779b97f4a7c15ull + seed;
  v = (v ^ (v >> 30)) * 0xbf58476d1ce4e5b9ull;
  v = (v ^ (v >> 27)) * 0x94d049bb133111ebull;
  return v ^ (v >> 31);
}

inline std::uint64_t hash_double(std::uint64_t seed, double x) {
  std::uint64_t bits;
  static_assert(sizeof(bits) == sizeof(x));
  std::memcpy(&bits, &x, sizeof(bits));
  return hash_combine(seed, bits);
}

}  // namespace stgcs
