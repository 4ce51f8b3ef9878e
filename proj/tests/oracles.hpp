#pragma once

// Test-only reference planners, independent of the library's optimization
// path. The grid oracle runs a time-stepped breadth-first search with
// 8-connected + wait moves over cells of size v_max * dt; a move is legal iff
// both endpoints lie in one common convex set (convexity then guarantees the
// whole step segment is collision-free). Its cost upper-bounds the true
// optimum by at most the discretization slack.

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "stgcs/geom.hpp"

namespace testing_oracles {

using stgcs::HPoly;
using stgcs::State;
using stgcs::Vec;

// Space-time sets (d = 2 spatial dims + time). Start/goal must be aligned to
// the grid induced by start.p and cell sizes v_max * dt.
inline std::optional<double> grid_plan(const std::vector<HPoly>& sets,
                                       const State& start, const Vec& goal,
                                       const Vec& vmax, double dt, double t_limit) {
  if (sets.empty() || sets.size() > 64) throw std::runtime_error("grid_plan: set count");
  const double cx = vmax[0] * dt;
  const double cy = vmax[1] * dt;

  // Spatial bounds of the union.
  double lo0 = 1e300, lo1 = 1e300, hi0 = -1e300, hi1 = -1e300;
  for (const auto& s : sets) {
    const auto [lo, hi] = s.bounding_box();
    lo0 = std::min(lo0, lo[0]);
    lo1 = std::min(lo1, lo[1]);
    hi0 = std::max(hi0, hi[0]);
    hi1 = std::max(hi1, hi[1]);
  }
  const int ix_min = static_cast<int>(std::ceil((lo0 - start.p[0]) / cx - 1e-9));
  const int ix_max = static_cast<int>(std::floor((hi0 - start.p[0]) / cx + 1e-9));
  const int iy_min = static_cast<int>(std::ceil((lo1 - start.p[1]) / cy - 1e-9));
  const int iy_max = static_cast<int>(std::floor((hi1 - start.p[1]) / cy + 1e-9));
  const int nx = ix_max - ix_min + 1;
  const int ny = iy_max - iy_min + 1;
  if (nx <= 0 || ny <= 0) return std::nullopt;
  const std::size_t ncells = static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny);

  const auto cell_index = [&](int ix, int iy) {
    return static_cast<std::size_t>(ix - ix_min) * static_cast<std::size_t>(ny) +
           static_cast<std::size_t>(iy - iy_min);
  };
  const int gx = static_cast<int>(std::llround((goal[0] - start.p[0]) / cx));
  const int gy = static_cast<int>(std::llround((goal[1] - start.p[1]) / cy));
  if (std::abs(start.p[0] + gx * cx - goal[0]) > 1e-9 ||
      std::abs(start.p[1] + gy * cy - goal[1]) > 1e-9)
    throw std::runtime_error("grid_plan: goal not grid-aligned");
  if (gx < ix_min || gx > ix_max || gy < iy_min || gy > iy_max) return std::nullopt;
  const std::size_t goal_cell = cell_index(gx, gy);

  const auto membership = [&](double t, std::vector<std::uint64_t>& mask) {
    std::size_t c = 0;
    Vec q(3);
    q[2] = t;
    for (int ix = ix_min; ix <= ix_max; ++ix) {
      q[0] = start.p[0] + ix * cx;
      for (int iy = iy_min; iy <= iy_max; ++iy, ++c) {
        q[1] = start.p[1] + iy * cy;
        std::uint64_t m = 0;
        for (std::size_t s = 0; s < sets.size(); ++s)
          if (sets[s].contains(q, 1e-9)) m |= (std::uint64_t{1} << s);
        mask[c] = m;
      }
    }
  };

  std::vector<std::uint64_t> mask0(ncells), mask1(ncells);
  membership(start.t, mask0);
  std::vector<std::uint8_t> frontier(ncells, 0), next(ncells, 0);
  const std::size_t start_cell = cell_index(0, 0);
  if (mask0[start_cell] == 0) return std::nullopt;
  frontier[start_cell] = 1;

  const int max_steps = static_cast<int>(std::ceil((t_limit - start.t) / dt));
  for (int step = 0; step <= max_steps; ++step) {
    if (frontier[goal_cell] && mask0[goal_cell]) return step * dt;
    if (step == max_steps) break;
    const double t1 = start.t + (step + 1) * dt;
    membership(t1, mask1);
    std::fill(next.begin(), next.end(), 0);
    std::size_t c = 0;
    for (int ix = ix_min; ix <= ix_max; ++ix) {
      for (int iy = iy_min; iy <= iy_max; ++iy, ++c) {
        if (!frontier[c] || mask0[c] == 0) continue;
        for (int dx = -1; dx <= 1; ++dx) {
          const int tx = ix + dx;
          if (tx < ix_min || tx > ix_max) continue;
          for (int dy = -1; dy <= 1; ++dy) {
            const int ty = iy + dy;
            if (ty < iy_min || ty > iy_max) continue;
            const std::size_t tc = cell_index(tx, ty);
            if (next[tc]) continue;
            if (mask0[c] & mask1[tc]) next[tc] = 1;
          }
        }
      }
    }
    frontier.swap(next);
    mask0.swap(mask1);
  }
  return std::nullopt;
}

}  // namespace testing_oracles
