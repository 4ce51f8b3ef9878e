#pragma once

// The ST-GCS optimization layer.
//
//  * restriction: fix a vertex path, solve the time-minimizing convex program
//    over per-vertex entry/exit states (membership, continuity, minimum dwell
//    eps, componentwise velocity bounds, boundary conditions).
//  * relaxation: the flow LP over the directed arc expansion with
//    perspective-scaled set membership; its optimum lower-bounds every path
//    restriction.
//  * round_paths: loop-erased random walks biased by the fractional flows,
//    plus the deterministic greedy max-flow path.
//  * solve_stgcs: terminals -> relaxation -> rounding -> best restriction
//    (heuristic), or exhaustive simple-path enumeration for small graphs.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "common.hpp"
#include "geom.hpp"
#include "lp.hpp"
#include "stgraph.hpp"

namespace stgcs {

struct VelocityBounds {
  Vec v_min;  // componentwise < 0
  Vec v_max;  // componentwise > 0

  static VelocityBounds symmetric(const Vec& vmax) { return {-vmax, vmax}; }
  static VelocityBounds uniform(int d, double vmax) {
    return symmetric(Vec::Constant(d, vmax));
  }

  void check(int d) const {
    if (v_min.size() != d || v_max.size() != d)
      throw DimensionError("VelocityBounds: dimension mismatch");
    for (int k = 0; k < d; ++k)
      if (!(v_min[k] < 0.0 && v_max[k] > 0.0))
        throw InputError("VelocityBounds: need v_min < 0 < v_max per dimension");
  }
};

struct GraphPath {
  std::vector<VertexId> vertices;  // simple; consecutive pairs are edges

  bool operator<(const GraphPath& o) const { return vertices < o.vertices; }
  bool operator==(const GraphPath& o) const { return vertices == o.vertices; }
};

struct Trajectory {
  std::vector<State> states;  // strictly increasing time stamps

  bool empty() const { return states.empty(); }
  double start_time() const { return states.front().t; }
  double arrival_time() const { return states.back().t; }

  // Position at time t under the stay-at-endpoint conventions.
  Vec position_at(double t) const {
    if (states.empty()) throw InputError("Trajectory::position_at: empty");
    if (t <= states.front().t) return states.front().p;
    if (t >= states.back().t) return states.back().p;
    for (std::size_t i = 1; i < states.size(); ++i) {
      if (t <= states[i].t) {
        const State& a = states[i - 1];
        const State& b = states[i];
        const double dur = b.t - a.t;
        if (dur <= 0.0) return b.p;
        const double s = (t - a.t) / dur;
        return a.p + s * (b.p - a.p);
      }
    }
    return states.back().p;
  }
};

// Directed arc in the augmented flow graph. kSigma/kTau are the virtual
// terminals.
inline constexpr VertexId kSigma = -1;
inline constexpr VertexId kTau = -2;

struct FlowArc {
  VertexId from = 0;
  VertexId to = 0;
};

struct FlowSolution {
  std::vector<FlowArc> arcs;  // construction order: sigma arcs, real arcs, tau arcs
  std::vector<double> flow;   // aligned with arcs, each in [0,1]
  double lower_bound = std::numeric_limits<double>::quiet_NaN();
};

enum class SolveMode { kHeuristic, kExhaustive };

struct SolveParams {
  double epsilon = 1e-3;   // minimum per-set dwell, seconds
  int path_budget = 0;     // <= 0: auto = ceil(1e3 * ln|E|)
  std::uint64_t rng_seed = 0;
  SolveMode mode = SolveMode::kHeuristic;
  int restriction_retries = 1;  // extra rounding rounds (re-seeded) on failure
};

enum class FailReason {
  kNone,
  kNoStartVertex,   // start state inside an obstacle / reserved region
  kNoGoalVertex,    // goal cannot be held until t_max anywhere
  kNoPath,          // terminals exist but are not connected
  kNoFeasiblePath,  // no sampled path admitted a feasible restriction
};

inline const char* to_string(FailReason r) {
  switch (r) {
    case FailReason::kNone: return "ok";
    case FailReason::kNoStartVertex: return "no_start_vertex";
    case FailReason::kNoGoalVertex: return "no_goal_vertex";
    case FailReason::kNoPath: return "no_path";
    case FailReason::kNoFeasiblePath: return "no_feasible_path";
  }
  return "unknown";
}

struct PlanResult {
  Trajectory trajectory;
  double cost = std::numeric_limits<double>::quiet_NaN();
  double lower_bound = std::numeric_limits<double>::quiet_NaN();
  int paths_tried = 0;
  int feasible_paths = 0;
  FailReason fail = FailReason::kNoFeasiblePath;

  bool ok() const { return fail == FailReason::kNone; }
};

// ---------------------------------------------------------------------------
// Convex restriction over a fixed path.

// Solves min sum_v (y_v.t - x_v.t) subject to per-vertex membership,
// continuity y_u = x_{u+1}, dwell >= eps, velocity bounds, x_{first} = x_start
// and y_{last}.p = p_goal. Returns the chained trajectory and its cost
// (arrival time minus start time), or nothing when the path is infeasible.
inline std::optional<std::pair<Trajectory, double>> restriction(
    const SpaceTimeGraph& g, const GraphPath& path, const State& x_start,
    const Vec& p_goal, const VelocityBounds& vb, double eps) {
  const int d = g.dim();
  vb.check(d);
  if (path.vertices.empty()) return std::nullopt;
  const int K = static_cast<int>(path.vertices.size());
  const int nd = d + 1;
  // Variables: x_i at i*2*nd, y_i at i*2*nd + nd.
  lp::Problem prob(2 * nd * K);
  const auto xvar = [&](int i, int j) { return 2 * nd * i + j; };
  const auto yvar = [&](int i, int j) { return 2 * nd * i + nd + j; };

  for (int i = 0; i < K; ++i) {
    const HPoly& X = g.vertex(path.vertices[i]);
    // Membership of both endpoints.
    for (int r = 0; r < X.rows(); ++r) {
      std::vector<int> cx, cy;
      std::vector<double> vx, vy;
      for (int j = 0; j < nd; ++j) {
        if (X.A()(r, j) != 0.0) {
          cx.push_back(xvar(i, j));
          cy.push_back(yvar(i, j));
          vx.push_back(X.A()(r, j));
          vy.push_back(X.A()(r, j));
        }
      }
      prob.add_ineq(cx, vx, X.b()[r]);
      prob.add_ineq(cy, vy, X.b()[r]);
    }
    // Dwell: y.t - x.t >= eps.
    prob.add_ineq({xvar(i, d), yvar(i, d)}, {1.0, -1.0}, -eps);
    // Velocity bounds, componentwise.
    for (int k = 0; k < d; ++k) {
      prob.add_ineq({yvar(i, k), xvar(i, k), yvar(i, d), xvar(i, d)},
                    {1.0, -1.0, -vb.v_max[k], vb.v_max[k]}, 0.0);
      prob.add_ineq({yvar(i, k), xvar(i, k), yvar(i, d), xvar(i, d)},
                    {-1.0, 1.0, vb.v_min[k], -vb.v_min[k]}, 0.0);
    }
    // Objective: dwell time.
    prob.add_cost(yvar(i, d), 1.0);
    prob.add_cost(xvar(i, d), -1.0);
    // Continuity with the next vertex.
    if (i + 1 < K)
      for (int j = 0; j < nd; ++j)
        prob.add_eq({yvar(i, j), xvar(i + 1, j)}, {1.0, -1.0}, 0.0);
  }
  // Boundary conditions.
  for (int j = 0; j < d; ++j) {
    prob.add_eq({xvar(0, j)}, {1.0}, x_start.p[j]);
    prob.add_eq({yvar(K - 1, j)}, {1.0}, p_goal[j]);
  }
  prob.add_eq({xvar(0, d)}, {1.0}, x_start.t);

  const auto sol = lp::solve(prob);
  if (sol.status == lp::Status::kInfeasible) return std::nullopt;
  if (!sol.ok()) throw SolverError("restriction: LP did not converge");

  Trajectory traj;
  traj.states.reserve(static_cast<std::size_t>(K) + 1);
  Vec p(d);
  for (int j = 0; j < d; ++j) p[j] = sol.x[xvar(0, j)];
  traj.states.emplace_back(p, sol.x[xvar(0, d)]);
  for (int i = 0; i < K; ++i) {
    for (int j = 0; j < d; ++j) p[j] = sol.x[yvar(i, j)];
    traj.states.emplace_back(p, sol.x[yvar(i, d)]);
  }
  return std::make_pair(std::move(traj), sol.obj);
}

// ---------------------------------------------------------------------------
// Flow relaxation with perspective constraints.

namespace gcsdetail {

// Variable layout per arc: [phi, copies...]; real arcs carry three point
// copies (x_u, y_u==x_v, y_v), terminal arcs two (the endpoint's x and y).
struct ArcVars {
  FlowArc arc;
  int base = 0;    // phi index
  int ncopies = 0; // 2 or 3
};

inline void add_membership(lp::Problem& prob, const HPoly& X, int copy_base,
                           int phi, int nd) {
  for (int r = 0; r < X.rows(); ++r) {
    std::vector<int> cols;
    std::vector<double> vals;
    for (int j = 0; j < nd; ++j) {
      if (X.A()(r, j) != 0.0) {
        cols.push_back(copy_base + j);
        vals.push_back(X.A()(r, j));
      }
    }
    cols.push_back(phi);
    vals.push_back(-X.b()[r]);
    prob.add_ineq(cols, vals, 0.0);
  }
}

inline void add_dwell_velocity(lp::Problem& prob, int xc, int yc, int phi,
                               const VelocityBounds& vb, double eps, int d) {
  // x.t - y.t + eps*phi <= 0
  prob.add_ineq({xc + d, yc + d, phi}, {1.0, -1.0, eps}, 0.0);
  for (int k = 0; k < d; ++k) {
    prob.add_ineq({yc + k, xc + k, yc + d, xc + d},
                  {1.0, -1.0, -vb.v_max[k], vb.v_max[k]}, 0.0);
    prob.add_ineq({yc + k, xc + k, yc + d, xc + d},
                  {-1.0, 1.0, vb.v_min[k], -vb.v_min[k]}, 0.0);
  }
}

}  // namespace gcsdetail

// Builds and solves the GCS flow LP. sources/sinks come from stgraph's
// terminal lookups; arcs outside the sigma-tau reachable subgraph are pruned
// before assembly. Returns nothing when the terminals are disconnected.
inline std::optional<FlowSolution> relaxation(
    const SpaceTimeGraph& g, const std::vector<VertexId>& sources,
    const std::vector<SpaceTimeGraph::GoalVertex>& sinks, const State& x_start,
    const Vec& p_goal, const VelocityBounds& vb, double eps) {
  const int d = g.dim();
  vb.check(d);
  if (sources.empty() || sinks.empty()) return std::nullopt;
  const int nd = d + 1;

  // Directed adjacency over real vertices.
  std::map<VertexId, std::vector<VertexId>> adj;
  for (const auto& [u, v] : g.edges()) {
    adj[u].push_back(v);
    adj[v].push_back(u);
  }

  // Reachability pruning.
  std::set<VertexId> fwd;
  {
    std::vector<VertexId> stack(sources.begin(), sources.end());
    while (!stack.empty()) {
      const VertexId v = stack.back();
      stack.pop_back();
      if (!fwd.insert(v).second) continue;
      auto it = adj.find(v);
      if (it != adj.end())
        for (VertexId w : it->second) stack.push_back(w);
    }
  }
  std::set<VertexId> bwd;
  {
    std::vector<VertexId> stack;
    for (const auto& s : sinks) stack.push_back(s.id);
    while (!stack.empty()) {
      const VertexId v = stack.back();
      stack.pop_back();
      if (!bwd.insert(v).second) continue;
      auto it = adj.find(v);
      if (it != adj.end())
        for (VertexId w : it->second) stack.push_back(w);
    }
  }
  std::set<VertexId> keep;
  for (VertexId v : fwd)
    if (bwd.count(v)) keep.insert(v);
  bool connected = false;
  for (const auto& s : sinks)
    if (keep.count(s.id)) connected = true;
  if (!connected) return std::nullopt;

  // Arc list in deterministic order.
  std::vector<gcsdetail::ArcVars> arcs;
  for (VertexId s : sources)
    if (keep.count(s)) arcs.push_back({{kSigma, s}, 0, 2});
  for (const auto& [u, v] : g.edges()) {
    if (!keep.count(u) || !keep.count(v)) continue;
    arcs.push_back({{u, v}, 0, 3});
    arcs.push_back({{v, u}, 0, 3});
  }
  for (const auto& s : sinks)
    if (keep.count(s.id)) arcs.push_back({{s.id, kTau}, 0, 2});
  if (arcs.empty()) return std::nullopt;

  int nvars = 0;
  for (auto& a : arcs) {
    a.base = nvars;
    nvars += 1 + a.ncopies * nd;
  }
  lp::Problem prob(nvars);

  // Per-arc constraints and objective.
  for (const auto& a : arcs) {
    const int phi = a.base;
    prob.add_box(phi, 0.0, 1.0);
    const int c0 = a.base + 1;
    const int c1 = c0 + nd;
    const int c2 = c1 + nd;
    if (a.arc.from == kSigma) {
      const HPoly& Xs = g.vertex(a.arc.to);
      gcsdetail::add_membership(prob, Xs, c0, phi, nd);
      gcsdetail::add_membership(prob, Xs, c1, phi, nd);
      gcsdetail::add_dwell_velocity(prob, c0, c1, phi, vb, eps, d);
      // Start condition: x-copy = phi * x_start.
      for (int j = 0; j < d; ++j)
        prob.add_eq({c0 + j, phi}, {1.0, -x_start.p[j]}, 0.0);
      prob.add_eq({c0 + d, phi}, {1.0, -x_start.t}, 0.0);
    } else if (a.arc.to == kTau) {
      const HPoly& Xg = g.vertex(a.arc.from);
      gcsdetail::add_membership(prob, Xg, c0, phi, nd);
      gcsdetail::add_membership(prob, Xg, c1, phi, nd);
      gcsdetail::add_dwell_velocity(prob, c0, c1, phi, vb, eps, d);
      // Goal condition: y-copy position = phi * p_goal.
      for (int j = 0; j < d; ++j)
        prob.add_eq({c1 + j, phi}, {1.0, -p_goal[j]}, 0.0);
      // Final vertex dwell enters the objective.
      prob.add_cost(c1 + d, 1.0);
      prob.add_cost(c0 + d, -1.0);
    } else {
      const HPoly& Xu = g.vertex(a.arc.from);
      const HPoly& Xv = g.vertex(a.arc.to);
      gcsdetail::add_membership(prob, Xu, c0, phi, nd);
      gcsdetail::add_membership(prob, Xu, c1, phi, nd);
      gcsdetail::add_membership(prob, Xv, c1, phi, nd);
      gcsdetail::add_membership(prob, Xv, c2, phi, nd);
      gcsdetail::add_dwell_velocity(prob, c0, c1, phi, vb, eps, d);
      gcsdetail::add_dwell_velocity(prob, c1, c2, phi, vb, eps, d);
      // Source vertex dwell enters the objective.
      prob.add_cost(c1 + d, 1.0);
      prob.add_cost(c0 + d, -1.0);
    }
  }

  // Flow and scaled-point conservation at real vertices; unit source flow.
  {
    std::vector<int> cols;
    std::vector<double> vals;
    for (std::size_t i = 0; i < arcs.size(); ++i) {
      if (arcs[i].arc.from == kSigma) {
        cols.push_back(arcs[i].base);
        vals.push_back(1.0);
      }
    }
    prob.add_eq(cols, vals, 1.0);
    // No matching sink-inflow row: summing the per-vertex flow-conservation
    // rows against the source row already forces unit inflow at the sink, and
    // keeping the dependent row would make the equality block rank-deficient.
  }
  for (VertexId v : keep) {
    std::vector<int> fcols;
    std::vector<double> fvals;
    // x-part/y-part conservation rows, one per coordinate.
    std::vector<std::vector<int>> xc(static_cast<std::size_t>(nd)), yc(static_cast<std::size_t>(nd));
    std::vector<std::vector<double>> xv(static_cast<std::size_t>(nd)), yv(static_cast<std::size_t>(nd));
    for (const auto& a : arcs) {
      const int c0 = a.base + 1;
      const int c1 = c0 + nd;
      const int c2 = c1 + nd;
      if (a.arc.to == v) {
        fcols.push_back(a.base);
        fvals.push_back(1.0);
        const int xin = a.arc.from == kSigma ? c0 : c1;   // v's x-copy on an in-arc
        const int yin = a.arc.from == kSigma ? c1 : c2;   // v's y-copy
        for (int j = 0; j < nd; ++j) {
          xc[j].push_back(xin + j);
          xv[j].push_back(1.0);
          yc[j].push_back(yin + j);
          yv[j].push_back(1.0);
        }
      } else if (a.arc.from == v) {
        fcols.push_back(a.base);
        fvals.push_back(-1.0);
        for (int j = 0; j < nd; ++j) {
          xc[j].push_back(c0 + j);
          xv[j].push_back(-1.0);
          yc[j].push_back(c1 + j);
          yv[j].push_back(-1.0);
        }
      }
    }
    if (fcols.empty()) continue;
    prob.add_eq(fcols, fvals, 0.0);
    for (int j = 0; j < nd; ++j) {
      prob.add_eq(xc[j], xv[j], 0.0);
      prob.add_eq(yc[j], yv[j], 0.0);
    }
    // Throughput <= 1: sum of in-flows.
    std::vector<int> icols;
    std::vector<double> ivals;
    for (const auto& a : arcs)
      if (a.arc.to == v) {
        icols.push_back(a.base);
        ivals.push_back(1.0);
      }
    if (!icols.empty()) prob.add_ineq(icols, ivals, 1.0);
  }

  // Reserved graphs make this flow relaxation heavily degenerate: carved
  // vertex sets carry near-parallel rows and every unused edge contributes a
  // block of tight perspective rows, so the duality gap bottoms out around
  // the percent level while both residuals close fine. Neither consumer of
  // this solve needs the gap: the flows only weight randomized path
  // sampling, and the reported bound is the dual objective, which dual
  // feasibility certifies regardless of the remaining gap. So demand tight
  // residuals but accept a loose gap rather than failing the whole solve.
  lp::Settings settings;
  settings.max_iter = 150;
  settings.accept_tol = 1e-4;
  settings.accept_gap = 0.25;
  const auto sol = lp::solve(prob, settings);
  if (sol.status == lp::Status::kInfeasible) return std::nullopt;
  if (!sol.ok()) throw SolverError("relaxation: LP did not converge");

  FlowSolution out;
  out.lower_bound = sol.obj_dual;
  out.arcs.reserve(arcs.size());
  out.flow.reserve(arcs.size());
  for (const auto& a : arcs) {
    out.arcs.push_back(a.arc);
    out.flow.push_back(std::clamp(sol.x[a.base], 0.0, 1.0));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Randomized path rounding.

// Loop-erased random walks from sigma, arc choice proportional to flow
// (arcs below 1e-6 excluded); the deterministic greedy max-flow path comes
// first; duplicates are dropped. Returns at most `budget` simple paths with
// the virtual terminals stripped.
inline std::vector<GraphPath> round_paths(const FlowSolution& flows, int budget,
                                          std::uint64_t rng_seed) {
  constexpr double kFlowCutoff = 1e-6;
  std::vector<GraphPath> out;
  if (budget < 1 || flows.arcs.empty()) return out;

  std::map<VertexId, std::vector<std::size_t>> outgoing;
  for (std::size_t i = 0; i < flows.arcs.size(); ++i)
    if (flows.flow[i] >= kFlowCutoff) outgoing[flows.arcs[i].from].push_back(i);

  std::set<std::vector<VertexId>> seen;
  const auto emit = [&](const std::vector<VertexId>& walk) {
    // walk excludes sigma and tau already.
    if (walk.empty()) return false;
    if (!seen.insert(walk).second) return false;
    out.push_back(GraphPath{walk});
    return true;
  };

  // Greedy: highest-flow arc at every step, loop-erased.
  {
    std::vector<VertexId> walk;
    VertexId cur = kSigma;
    bool reached = false;
    for (int step = 0; step < 10000; ++step) {
      auto it = outgoing.find(cur);
      if (it == outgoing.end()) break;
      std::size_t best = it->second.front();
      for (std::size_t idx : it->second)
        if (flows.flow[idx] > flows.flow[best]) best = idx;
      const VertexId nxt = flows.arcs[best].to;
      if (nxt == kTau) {
        reached = true;
        break;
      }
      auto pos = std::find(walk.begin(), walk.end(), nxt);
      if (pos != walk.end())
        walk.erase(pos + 1, walk.end());
      else
        walk.push_back(nxt);
      cur = nxt;
    }
    if (reached) emit(walk);
  }

  std::mt19937_64 rng(rng_seed);
  const long max_attempts = 64L * budget + 64;
  for (long attempt = 0; attempt < max_attempts && static_cast<int>(out.size()) < budget;
       ++attempt) {
    std::vector<VertexId> walk;
    VertexId cur = kSigma;
    bool reached = false;
    for (int step = 0; step < 10000; ++step) {
      auto it = outgoing.find(cur);
      if (it == outgoing.end()) break;
      double total = 0.0;
      for (std::size_t idx : it->second) total += flows.flow[idx];
      double pick = uniform01(rng) * total;
      std::size_t chosen = it->second.back();
      for (std::size_t idx : it->second) {
        pick -= flows.flow[idx];
        if (pick <= 0.0) {
          chosen = idx;
          break;
        }
      }
      const VertexId nxt = flows.arcs[chosen].to;
      if (nxt == kTau) {
        reached = true;
        break;
      }
      auto pos = std::find(walk.begin(), walk.end(), nxt);
      if (pos != walk.end())
        walk.erase(pos + 1, walk.end());
      else
        walk.push_back(nxt);
      cur = nxt;
    }
    if (reached) emit(walk);
  }
  return out;
}

// ---------------------------------------------------------------------------
// End-to-end single-robot solve.

inline int auto_path_budget(int num_edges) {
  if (num_edges <= 1) return 1;
  return static_cast<int>(std::ceil(1e3 * std::log(static_cast<double>(num_edges))));
}

namespace gcsdetail {

// All simple paths from any source to any sink, depth-first, capped.
inline std::vector<GraphPath> enumerate_paths(const SpaceTimeGraph& g,
                                              const std::vector<VertexId>& sources,
                                              const std::set<VertexId>& sinks,
                                              std::size_t cap = 100000) {
  std::map<VertexId, std::vector<VertexId>> adj;
  for (const auto& [u, v] : g.edges()) {
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  for (auto& [_, nbrs] : adj) std::sort(nbrs.begin(), nbrs.end());

  std::vector<GraphPath> out;
  std::set<std::vector<VertexId>> seen;
  std::vector<VertexId> path;
  std::set<VertexId> on_path;

  const std::function<void(VertexId)> dfs = [&](VertexId v) {
    path.push_back(v);
    on_path.insert(v);
    if (sinks.count(v) && seen.insert(path).second) {
      if (out.size() >= cap) throw InputError("exhaustive: path cap exceeded");
      out.push_back(GraphPath{path});
    }
    auto it = adj.find(v);
    if (it != adj.end())
      for (VertexId w : it->second)
        if (!on_path.count(w)) dfs(w);
    on_path.erase(v);
    path.pop_back();
  };
  for (VertexId s : sources) dfs(s);
  return out;
}

}  // namespace gcsdetail

inline PlanResult solve_stgcs(const SpaceTimeGraph& g, const State& x_start,
                              const Vec& p_goal, const VelocityBounds& vb,
                              const SolveParams& params = {}) {
  PlanResult res;
  const auto sources = g.start_vertices(x_start);
  if (sources.empty()) {
    res.fail = FailReason::kNoStartVertex;
    return res;
  }
  const auto goals = g.goal_vertices(p_goal);
  if (goals.empty()) {
    res.fail = FailReason::kNoGoalVertex;
    return res;
  }

  double best_cost = std::numeric_limits<double>::infinity();
  Trajectory best;
  const auto evaluate = [&](const GraphPath& path) {
    ++res.paths_tried;
    std::optional<std::pair<Trajectory, double>> r;
    try {
      r = restriction(g, path, x_start, p_goal, vb, params.epsilon);
    } catch (const SolverError&) {
      return;  // treat a numerically failed candidate as infeasible
    }
    if (!r) return;
    ++res.feasible_paths;
    if (r->second < best_cost - 1e-12) {
      best_cost = r->second;
      best = std::move(r->first);
    }
  };

  if (params.mode == SolveMode::kExhaustive) {
    std::set<VertexId> sink_ids;
    for (const auto& s : goals) sink_ids.insert(s.id);
    const auto candidates = gcsdetail::enumerate_paths(g, sources, sink_ids);
    if (candidates.empty()) {
      res.fail = FailReason::kNoPath;
      return res;
    }
    for (const auto& path : candidates) evaluate(path);
  } else {
    const auto flows = relaxation(g, sources, goals, x_start, p_goal, vb, params.epsilon);
    if (!flows) {
      res.fail = FailReason::kNoPath;
      return res;
    }
    res.lower_bound = flows->lower_bound;
    const int budget = params.path_budget > 0 ? params.path_budget
                                              : auto_path_budget(g.num_edges());
    // Extra rounds (re-seeded) only when no feasible restriction emerged yet.
    std::set<GraphPath> tried;
    const int rounds = std::max(1, params.restriction_retries);
    for (int round = 0; round < rounds && res.feasible_paths == 0; ++round) {
      const auto paths = round_paths(
          *flows, budget, hash_combine(params.rng_seed, static_cast<std::uint64_t>(round)));
      for (const auto& p : paths) {
        if (!tried.insert(p).second) continue;
        evaluate(p);
      }
    }
  }

  if (res.feasible_paths == 0) {
    res.fail = FailReason::kNoFeasiblePath;
    return res;
  }
  res.trajectory = std::move(best);
  res.cost = best_cost;
  res.fail = FailReason::kNone;
  return res;
}

}  // namespace stgcs
