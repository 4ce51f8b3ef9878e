#pragma once

// Multi-robot coordination on a shared space-time graph: exact trajectory-pair
// collision detection, sequential planning over a fixed priority order,
// random-priority planning, priority-based search over the priority tree,
// plus solution validation and cost metrics.
//
// Robots are axis-aligned hypercubes; two trajectories collide when the
// max-norm distance between their centers drops below the safety radius.
// All pairwise comparisons extend both trajectories to the full horizon
// [0, t_max] with the stay-at-start / stay-at-goal conventions, matching the
// reservation semantics, so "collision-free" and "reservable" coincide.

#include <algorithm>
#include <array>
#include <chrono>
#include <cstring>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "common.hpp"
#include "ecd.hpp"
#include "gcsprog.hpp"
#include "stgraph.hpp"

namespace stgcs {

// ---------------------------------------------------------------------------
// Instance and solution types.

struct RobotSpec {
  State x_start;
  Vec p_goal;
};

struct MrmpInstance {
  SpaceTimeGraph graph;  // static free space with dynamic obstacles reserved
  std::vector<RobotSpec> robots;
  VelocityBounds vb;
  double safe_radius = 0.5;      // required pairwise max-norm separation
  double time_budget_s = 150.0;  // wall-clock budget for rp / pbs
  SolveParams solve_params;
};

struct SolutionMetrics {
  double soc = 0.0;       // sum of per-robot arrival costs
  double makespan = 0.0;  // max per-robot arrival cost
  double runtime_s = 0.0;
  std::string method;
};

struct Solution {
  std::vector<Trajectory> trajectories;  // raw plans: last state = goal arrival
  SolutionMetrics metrics;
  int nodes_expanded = 0;     // sp: 1; rp: orders tried; pbs: nodes popped
  int graph_edges_final = 0;  // edges of the fully reserved graph
  std::uint64_t seed = 0;
};

struct MrmpResult {
  std::optional<Solution> solution;
  int failed_robot = -1;  // first robot that could not be planned, if any
  std::string failure;
  std::vector<std::pair<int, int>> pbs_prec;  // final priority pairs (pbs only)

  bool ok() const { return solution.has_value(); }
};

// ---------------------------------------------------------------------------
// Exact first-collision detection.
//
// Both trajectories are piecewise linear, so on each interval of the merged
// breakpoint timeline the difference dp(t) is affine and the separation
// f(t) = max_k |dp_k(t)| is convex piecewise linear. Its minima can only
// move across candidate points: interval ends, roots of dp_k(t) = 0, and
// crossings |dp_j(t)| = |dp_k(t)|. Between consecutive candidates f is
// affine, so scanning candidates in time order finds the earliest violation;
// bisection then pins the crossing of the threshold to 1e-9.

inline std::optional<double> collide(const Trajectory& t1, const Trajectory& t2,
                                     double r, double t_max) {
  const Trajectory c1 = canonicalize(t1, t_max);
  const Trajectory c2 = canonicalize(t2, t_max);
  const double thresh = r - 1e-9;

  std::vector<double> times;
  times.reserve(c1.states.size() + c2.states.size());
  for (const auto& s : c1.states) times.push_back(s.t);
  for (const auto& s : c2.states) times.push_back(s.t);
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end(),
                          [](double a, double b) { return std::abs(a - b) <= 1e-12; }),
              times.end());

  const int d = static_cast<int>(c1.states.front().p.size());
  std::vector<double> cand;
  for (std::size_t seg = 0; seg + 1 < times.size(); ++seg) {
    const double a = times[seg], b = times[seg + 1];
    const double len = b - a;
    if (len <= 1e-12) continue;
    const Vec q = c1.position_at(a) - c2.position_at(a);
    const Vec w = ((c1.position_at(b) - c2.position_at(b)) - q) / len;
    const auto f = [&](double s) { return (q + s * w).cwiseAbs().maxCoeff(); };

    cand.clear();
    cand.push_back(0.0);
    cand.push_back(len);
    for (int k = 0; k < d; ++k) {
      if (std::abs(w[k]) > 1e-15) {
        const double s = -q[k] / w[k];
        if (s > 0.0 && s < len) cand.push_back(s);
      }
    }
    for (int j = 0; j < d; ++j) {
      for (int k = j + 1; k < d; ++k) {
        for (const double sign : {1.0, -1.0}) {
          const double denom = w[j] - sign * w[k];
          if (std::abs(denom) <= 1e-15) continue;
          const double s = -(q[j] - sign * q[k]) / denom;
          if (s > 0.0 && s < len) cand.push_back(s);
        }
      }
    }
    std::sort(cand.begin(), cand.end());

    bool have_prev = false;
    double prev_s = 0.0;
    for (const double s : cand) {
      if (f(s) < thresh) {
        if (!have_prev) return a;  // violating already at the interval start
        double lo = prev_s, hi = s;
        while (hi - lo > 1e-9) {
          const double mid = 0.5 * (lo + hi);
          (f(mid) < thresh ? hi : lo) = mid;
        }
        return a + hi;
      }
      have_prev = true;
      prev_s = s;
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Metrics.

struct SocMakespan {
  double soc = 0.0;
  double makespan = 0.0;
};

// Per-robot time cost = arrival time at the goal minus the start time, taken
// from the raw trajectory (whose last state is the goal arrival, before any
// stay-forever extension).
inline SocMakespan metrics(const std::vector<Trajectory>& trajectories) {
  SocMakespan m;
  for (const auto& t : trajectories) {
    if (t.states.empty()) throw InputError("metrics: empty trajectory");
    const double cost = t.arrival_time() - t.start_time();
    m.soc += cost;
    m.makespan = std::max(m.makespan, cost);
  }
  return m;
}

// ---------------------------------------------------------------------------
// Validation: an independent acceptance oracle over a claimed solution.

struct Violation {
  std::string kind;  // "count", "start", "goal", "velocity", "free-space",
                     // "collision", "sampled-collision"
  int robot_a = -1;
  int robot_b = -1;
  double time = std::numeric_limits<double>::quiet_NaN();
  std::string detail;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

inline ValidationReport validate(const Solution& sol, const MrmpInstance& inst) {
  ValidationReport rep;
  const double t_max = inst.graph.t_max();
  const double r = inst.safe_radius;
  const int n = static_cast<int>(inst.robots.size());
  if (static_cast<int>(sol.trajectories.size()) != n) {
    rep.violations.push_back({"count", -1, -1, 0.0, "trajectory count mismatch"});
    return rep;
  }

  std::vector<Trajectory> canon(n);
  for (int i = 0; i < n; ++i) {
    const Trajectory& t = sol.trajectories[i];
    if (t.states.empty()) {
      rep.violations.push_back({"count", i, -1, 0.0, "empty trajectory"});
      return rep;
    }
    canon[i] = canonicalize(t, t_max);

    // Boundary conditions.
    const RobotSpec& rs = inst.robots[i];
    if ((t.states.front().p - rs.x_start.p).cwiseAbs().maxCoeff() > 1e-6 ||
        std::abs(t.states.front().t - rs.x_start.t) > 1e-6)
      rep.violations.push_back(
          {"start", i, -1, t.states.front().t, "trajectory does not begin at the start state"});
    if ((t.states.back().p - rs.p_goal).cwiseAbs().maxCoeff() > 1e-6)
      rep.violations.push_back(
          {"goal", i, -1, t.states.back().t, "trajectory does not end at the goal position"});

    // Velocity bounds per linear piece (stay extensions are zero-velocity).
    for (std::size_t s = 0; s + 1 < canon[i].states.size(); ++s) {
      const Segment seg{canon[i].states[s], canon[i].states[s + 1]};
      if (seg.duration() <= 1e-12) continue;
      const Vec v = (seg.y.p - seg.x.p) / seg.duration();
      for (int k = 0; k < v.size(); ++k) {
        if (v[k] > inst.vb.v_max[k] + 1e-6 || v[k] < inst.vb.v_min[k] - 1e-6) {
          rep.violations.push_back(
              {"velocity", i, -1, seg.x.t,
               "segment velocity outside bounds in coordinate " + std::to_string(k)});
          break;
        }
      }
    }

    // Containment in the original static free space.
    if (const auto bad = first_uncovered_time(inst.graph.base_sets(), t, t_max))
      rep.violations.push_back(
          {"free-space", i, -1, *bad, "trajectory leaves the static free space"});
  }

  // Exact pairwise separation, then an independent dense-sampling re-check.
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (const auto c = collide(sol.trajectories[i], sol.trajectories[j], r, t_max))
        rep.violations.push_back(
            {"collision", i, j, *c, "max-norm separation drops below the safety radius"});
      for (double t = 0.0; t <= t_max + 1e-12; t += 1e-3) {
        const double sep =
            (canon[i].position_at(t) - canon[j].position_at(t)).cwiseAbs().maxCoeff();
        if (sep < r - 1e-9) {
          rep.violations.push_back(
              {"sampled-collision", i, j, t, "sampled separation below the safety radius"});
          break;
        }
      }
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Planner internals.

namespace mrmpdetail {

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Edge count of the instance graph after reserving every trajectory in robot
// index order; reported as a size statistic of the final reserved graph.
inline int final_edge_count(const MrmpInstance& inst,
                            const std::vector<Trajectory>& trajs) {
  SpaceTimeGraph g = inst.graph;
  for (const auto& t : trajs) g = reserve(g, {t, inst.safe_radius});
  return g.num_edges();
}

inline Solution make_solution(const MrmpInstance& inst, std::vector<Trajectory> trajs,
                              std::string method, double runtime_s, int nodes_expanded,
                              int graph_edges_final) {
  Solution s;
  s.trajectories = std::move(trajs);
  const SocMakespan m = metrics(s.trajectories);
  s.metrics.soc = m.soc;
  s.metrics.makespan = m.makespan;
  s.metrics.runtime_s = runtime_s;
  s.metrics.method = std::move(method);
  s.nodes_expanded = nodes_expanded;
  s.graph_edges_final = graph_edges_final;
  s.seed = inst.solve_params.rng_seed;
  return s;
}

struct OrderedPlan {
  std::vector<Trajectory> trajs;
  int failed_robot = -1;  // -1 on success
  int final_edges = 0;    // edges of the working graph after all reservations

  bool ok() const { return failed_robot < 0; }
};

// One sequential-planning pass: plan each robot in the given order, reserving
// every planned trajectory before the next robot plans.
inline OrderedPlan plan_in_order(const MrmpInstance& inst, const std::vector<int>& order) {
  OrderedPlan out;
  out.trajs.resize(inst.robots.size());
  SpaceTimeGraph g = inst.graph;
  for (const int idx : order) {
    const RobotSpec& rs = inst.robots[static_cast<std::size_t>(idx)];
    const PlanResult res = solve_stgcs(g, rs.x_start, rs.p_goal, inst.vb, inst.solve_params);
    if (!res.ok()) {
      out.failed_robot = idx;
      return out;
    }
    out.trajs[static_cast<std::size_t>(idx)] = res.trajectory;
    g = reserve(g, {res.trajectory, inst.safe_radius});
  }
  out.final_edges = g.num_edges();
  return out;
}

}  // namespace mrmpdetail

// ---------------------------------------------------------------------------
// Sequential planning over a fixed priority order.

inline MrmpResult sp(const MrmpInstance& inst, const std::vector<int>& order) {
  const auto t0 = std::chrono::steady_clock::now();
  const int n = static_cast<int>(inst.robots.size());
  std::vector<int> sorted_order = order;
  std::sort(sorted_order.begin(), sorted_order.end());
  for (int i = 0; i < n; ++i)
    if (static_cast<int>(order.size()) != n || sorted_order[static_cast<std::size_t>(i)] != i)
      throw InputError("sp: order must be a permutation of the robot indices");

  auto pass = mrmpdetail::plan_in_order(inst, order);
  if (!pass.ok())
    return {std::nullopt, pass.failed_robot,
            "sp: no feasible trajectory for robot " + std::to_string(pass.failed_robot),
            {}};
  MrmpResult res;
  res.solution = mrmpdetail::make_solution(inst, std::move(pass.trajs), "sp",
                                           mrmpdetail::seconds_since(t0), 1,
                                           pass.final_edges);
  return res;
}

// Sequential planning in robot index order.
inline MrmpResult sp(const MrmpInstance& inst) {
  std::vector<int> order(inst.robots.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  return sp(inst, order);
}

// ---------------------------------------------------------------------------
// Random-priority planning: keep drawing unused priority orders uniformly at
// random (seeded) and run one sequential pass per order until a pass succeeds,
// the wall-clock budget runs out, or every order has been tried.

inline MrmpResult rp(const MrmpInstance& inst) {
  const auto t0 = std::chrono::steady_clock::now();
  const int n = static_cast<int>(inst.robots.size());
  std::mt19937_64 rng(inst.solve_params.rng_seed ^ 0x9e3779b97f4a7c15ull);

  double total_orders = 1.0;
  for (int i = 2; i <= n; ++i) total_orders = std::min(total_orders * i, 1e18);

  std::set<std::vector<int>> seen;
  int tried = 0;
  while (mrmpdetail::seconds_since(t0) < inst.time_budget_s &&
         static_cast<double>(seen.size()) < total_orders) {
    std::vector<int> order(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
    shuffle_inplace(order, rng);
    while (seen.count(order) &&
           mrmpdetail::seconds_since(t0) < inst.time_budget_s)
      shuffle_inplace(order, rng);
    if (seen.count(order)) break;  // budget expired while redrawing
    seen.insert(order);
    ++tried;

    auto pass = mrmpdetail::plan_in_order(inst, order);
    if (pass.ok()) {
      MrmpResult res;
      res.solution = mrmpdetail::make_solution(inst, std::move(pass.trajs), "rp",
                                               mrmpdetail::seconds_since(t0), tried,
                                               pass.final_edges);
      return res;
    }
  }
  return {std::nullopt, -1, "rp: fail to find a solution", {}};
}

// ---------------------------------------------------------------------------
// Priority-based search over the tree of partial priority orders.

namespace mrmpdetail {

using PrecSet = std::vector<std::pair<int, int>>;  // (higher, lower) pairs

// All robots above (ancestors) or below (descendants) of the seed in the
// transitive closure of the priority pairs.
inline std::set<int> reachable(const PrecSet& prec, int seed, bool downstream) {
  std::set<int> out;
  std::vector<int> frontier{seed};
  while (!frontier.empty()) {
    const int v = frontier.back();
    frontier.pop_back();
    for (const auto& [hi, lo] : prec) {
      const int from = downstream ? hi : lo;
      const int to = downstream ? lo : hi;
      if (from == v && !out.count(to)) {
        out.insert(to);
        frontier.push_back(to);
      }
    }
  }
  return out;
}

// Topological order of the members of L under the priority pairs, smallest
// robot index first among the ready ones.
inline std::vector<int> topo_order(const std::set<int>& members, const PrecSet& prec) {
  std::map<int, int> indeg;
  for (const int v : members) indeg[v] = 0;
  for (const auto& [hi, lo] : prec)
    if (members.count(hi) && members.count(lo)) ++indeg[lo];
  std::vector<int> out;
  std::set<int> ready;
  for (const auto& [v, deg] : indeg)
    if (deg == 0) ready.insert(v);
  while (!ready.empty()) {
    const int v = *ready.begin();
    ready.erase(ready.begin());
    out.push_back(v);
    for (const auto& [hi, lo] : prec)
      if (hi == v && members.count(lo) && --indeg[lo] == 0) ready.insert(lo);
  }
  return out;  // shorter than |members| iff the pairs contain a cycle
}

inline void append_bytes(std::string& key, const void* src, std::size_t len) {
  key.append(static_cast<const char*>(src), len);
}

// Exact memo key for a single-robot solve: the robot index plus the full
// geometry of every reserved higher-priority trajectory, in robot order.
inline std::string solve_key(int robot, const std::vector<int>& higher_sorted,
                             const std::vector<Trajectory>& trajs) {
  std::string key;
  append_bytes(key, &robot, sizeof(robot));
  for (const int k : higher_sorted) {
    append_bytes(key, &k, sizeof(k));
    for (const auto& s : trajs[static_cast<std::size_t>(k)].states) {
      for (int c = 0; c < s.p.size(); ++c) append_bytes(key, &s.p[c], sizeof(double));
      append_bytes(key, &s.t, sizeof(double));
    }
  }
  return key;
}

}  // namespace mrmpdetail

inline MrmpResult pbs(const MrmpInstance& inst, bool reverse_children = false) {
  using mrmpdetail::PrecSet;
  const auto t0 = std::chrono::steady_clock::now();
  const int n = static_cast<int>(inst.robots.size());
  const double t_max = inst.graph.t_max();
  const double r = inst.safe_radius;

  // Single-robot solves are deterministic in (robot, reserved trajectories),
  // so results are memoized across tree nodes under that exact key.
  std::map<std::string, PlanResult> cache;
  const auto solve_with = [&](int robot, const std::vector<int>& higher_sorted,
                              const std::vector<Trajectory>& trajs) -> const PlanResult& {
    const std::string key = mrmpdetail::solve_key(robot, higher_sorted, trajs);
    if (const auto it = cache.find(key); it != cache.end()) return it->second;
    SpaceTimeGraph g = inst.graph;
    for (const int k : higher_sorted)
      g = reserve(g, {trajs[static_cast<std::size_t>(k)], inst.safe_radius});
    const RobotSpec& rs = inst.robots[static_cast<std::size_t>(robot)];
    return cache.emplace(key, solve_stgcs(g, rs.x_start, rs.p_goal, inst.vb,
                                          inst.solve_params))
        .first->second;
  };

  struct Node {
    PrecSet prec;
    std::vector<Trajectory> trajs;
  };

  // Replan, in topological order, every robot at or below `seed_robot` that
  // collides with some higher-priority robot, each against a fresh graph with
  // all its higher-priority trajectories reserved.
  const auto update_node = [&](Node& node, int seed_robot) -> bool {
    std::set<int> members = mrmpdetail::reachable(node.prec, seed_robot, true);
    members.insert(seed_robot);
    const std::vector<int> order = mrmpdetail::topo_order(members, node.prec);
    if (order.size() != members.size()) return false;  // defensive: cyclic
    for (const int j : order) {
      const std::set<int> above = mrmpdetail::reachable(node.prec, j, false);
      bool colliding = false;
      for (const int k : above) {
        if (collide(node.trajs[static_cast<std::size_t>(k)],
                    node.trajs[static_cast<std::size_t>(j)], r, t_max)) {
          colliding = true;
          break;
        }
      }
      if (!colliding) continue;
      const std::vector<int> higher_sorted(above.begin(), above.end());
      const PlanResult& res = solve_with(j, higher_sorted, node.trajs);
      if (!res.ok()) return false;
      node.trajs[static_cast<std::size_t>(j)] = res.trajectory;
    }
    return true;
  };

  // Root: independent single-robot plans on the shared graph.
  Node root;
  root.trajs.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const PlanResult& res = solve_with(i, {}, root.trajs);
    if (!res.ok())
      return {std::nullopt, i,
              "pbs: no feasible trajectory for robot " + std::to_string(i) +
                  " in the obstacle-only graph",
              {}};
    root.trajs[static_cast<std::size_t>(i)] = res.trajectory;
  }

  std::vector<Node> stack;
  stack.push_back(std::move(root));
  int expanded = 0;
  while (!stack.empty()) {
    if (mrmpdetail::seconds_since(t0) > inst.time_budget_s)
      return {std::nullopt, -1, "pbs: time budget exhausted", {}};
    Node node = std::move(stack.back());
    stack.pop_back();
    ++expanded;

    // First pairwise collision: earliest time, then smallest index pair.
    double best_t = std::numeric_limits<double>::infinity();
    int ci = -1, cj = -1;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        const auto c = collide(node.trajs[static_cast<std::size_t>(i)],
                               node.trajs[static_cast<std::size_t>(j)], r, t_max);
        if (c && *c < best_t - 1e-12) {
          best_t = *c;
          ci = i;
          cj = j;
        }
      }
    }
    if (ci < 0) {
      MrmpResult res;
      res.solution = mrmpdetail::make_solution(
          inst, node.trajs, "pbs", mrmpdetail::seconds_since(t0), expanded,
          mrmpdetail::final_edge_count(inst, node.trajs));
      res.pbs_prec = node.prec;
      return res;
    }

    // Two children per collision; pushed so that by default the (cj above ci)
    // child is explored first under the LIFO stack.
    std::array<std::pair<int, int>, 2> child_pairs{{{ci, cj}, {cj, ci}}};
    if (reverse_children) std::swap(child_pairs[0], child_pairs[1]);
    for (const auto& [hi, lo] : child_pairs) {
      Node child;
      child.prec = node.prec;
      child.prec.emplace_back(hi, lo);
      child.trajs = node.trajs;
      if (update_node(child, lo)) stack.push_back(std::move(child));
    }
  }
  return {std::nullopt, -1, "pbs: fail to find a solution", {}};
}

}  // namespace stgcs
