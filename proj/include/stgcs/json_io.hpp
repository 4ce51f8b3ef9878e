#pragma once

// JSON serialization for the core planner types.
//
// Schemas (stable, consumed by the command-line tools and test fixtures):
//   polytope    {"A": [[...], ...], "b": [...]}          row-major A
//   state       {"p": [...], "t": <number>}
//   trajectory  {"states": [state, ...]}
//   reservation {"trajectory": trajectory, "apothem": <number>}
//   graph       {"t_max": ..., "d": ..., "vertices": {"<id>": polytope},
//                "edges": [[u, v], ...]}
//   solution    {"trajectories": [trajectory, ...], "metrics": {...},
//                "method": "sp|rp|pbs", "seed": <int>}
//   plan report {"cost", "lower_bound", "paths_tried", "feasible_paths",
//                "mode", "seed"}
//
// Readers validate shape and types and throw InputError with the offending
// context; writers emit keys in sorted order so identical values always
// serialize to identical bytes.

// Require explicit get<T>() calls: implicit conversions out of a json value
// compile against unrelated overloads and only fail at runtime.
#define JSON_USE_IMPLICIT_CONVERSIONS 0
#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "common.hpp"
#include "ecd.hpp"
#include "geom.hpp"
#include "gcsprog.hpp"
#include "mrmp.hpp"
#include "stgraph.hpp"

namespace stgcs {

using Json = nlohmann::json;

// --- Low-level helpers. ------------------------------------------------------

inline const Json& json_field(const Json& j, const char* key, const char* ctx) {
  if (!j.is_object())
    throw InputError(std::string(ctx) + ": expected an object");
  const auto it = j.find(key);
  if (it == j.end())
    throw InputError(std::string(ctx) + ": missing field \"" + key + "\"");
  return *it;
}

inline double json_number(const Json& j, const char* ctx) {
  if (!j.is_number())
    throw InputError(std::string(ctx) + ": expected a number");
  return j.get<double>();
}

inline double json_finite(const Json& j, const char* ctx) {
  const double v = json_number(j, ctx);
  if (!std::isfinite(v))
    throw InputError(std::string(ctx) + ": expected a finite number");
  return v;
}

inline Json vec_to_json(const Vec& v) {
  Json arr = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

inline Vec vec_from_json(const Json& j, const char* ctx) {
  if (!j.is_array())
    throw InputError(std::string(ctx) + ": expected an array of numbers");
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = json_finite(j[i], ctx);
  return v;
}

// --- Polytopes. --------------------------------------------------------------

inline Json hpoly_to_json(const HPoly& P) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < P.A().rows(); ++i)
    rows.push_back(vec_to_json(Vec(P.A().row(i).transpose())));
  return Json{{"A", rows}, {"b", vec_to_json(P.b())}};
}

inline HPoly hpoly_from_json(const Json& j) {
  const Json& ja = json_field(j, "A", "polytope");
  const Json& jb = json_field(j, "b", "polytope");
  if (!ja.is_array() || ja.empty())
    throw InputError("polytope: \"A\" must be a nonempty array of rows");
  const Vec first = vec_from_json(ja[0], "polytope row");
  Mat A(static_cast<Eigen::Index>(ja.size()), first.size());
  A.row(0) = first.transpose();
  for (std::size_t i = 1; i < ja.size(); ++i) {
    const Vec row = vec_from_json(ja[i], "polytope row");
    if (row.size() != first.size())
      throw InputError("polytope: rows of \"A\" have inconsistent lengths");
    A.row(static_cast<Eigen::Index>(i)) = row.transpose();
  }
  const Vec b = vec_from_json(jb, "polytope rhs");
  if (b.size() != A.rows())
    throw InputError("polytope: \"b\" length must match the number of rows of \"A\"");
  return HPoly(A, b);
}

// --- States and trajectories. ------------------------------------------------

inline Json state_to_json(const State& x) {
  return Json{{"p", vec_to_json(x.p)}, {"t", x.t}};
}

inline State state_from_json(const Json& j) {
  State x;
  x.p = vec_from_json(json_field(j, "p", "state"), "state position");
  x.t = json_finite(json_field(j, "t", "state"), "state time");
  return x;
}

inline Json trajectory_to_json(const Trajectory& traj) {
  Json states = Json::array();
  for (const State& x : traj.states) states.push_back(state_to_json(x));
  return Json{{"states", states}};
}

inline Trajectory trajectory_from_json(const Json& j) {
  const Json& js = json_field(j, "states", "trajectory");
  if (!js.is_array()) throw InputError("trajectory: \"states\" must be an array");
  Trajectory traj;
  traj.states.reserve(js.size());
  for (const Json& s : js) traj.states.push_back(state_from_json(s));
  for (std::size_t i = 0; i + 1 < traj.states.size(); ++i) {
    if (traj.states[i].p.size() != traj.states[i + 1].p.size())
      throw InputError("trajectory: states have inconsistent dimensions");
    if (traj.states[i + 1].t < traj.states[i].t - kTol)
      throw InputError("trajectory: state times must be nondecreasing");
  }
  return traj;
}

// --- Reservations. -----------------------------------------------------------

inline Json reservation_to_json(const Reservation& res) {
  return Json{{"trajectory", trajectory_to_json(res.trajectory)},
              {"apothem", res.tube_apothem}};
}

inline Reservation reservation_from_json(const Json& j) {
  Reservation res;
  res.trajectory = trajectory_from_json(json_field(j, "trajectory", "reservation"));
  res.tube_apothem = json_finite(json_field(j, "apothem", "reservation"), "reservation apothem");
  if (res.tube_apothem <= 0.0)
    throw InputError("reservation: \"apothem\" must be positive");
  if (res.trajectory.states.empty())
    throw InputError("reservation: trajectory must have at least one state");
  return res;
}

// --- Graphs (debug/fixture output). ------------------------------------------

inline Json graph_to_json(const SpaceTimeGraph& g) {
  Json verts = Json::object();
  int d = 0;
  for (const auto& [id, set] : g.vertices()) {
    verts[std::to_string(id)] = hpoly_to_json(set);
    d = set.dim() - 1;
  }
  Json edges = Json::array();
  for (const auto& [u, v] : g.edges()) edges.push_back(Json::array({u, v}));
  return Json{{"t_max", g.t_max()}, {"d", d}, {"vertices", verts}, {"edges", edges}};
}

// --- Solutions and planning reports. -----------------------------------------

inline Json solution_to_json(const Solution& sol) {
  Json trajs = Json::array();
  for (const Trajectory& t : sol.trajectories) trajs.push_back(trajectory_to_json(t));
  const Json metrics{{"soc", sol.metrics.soc},
                     {"makespan", sol.metrics.makespan},
                     {"runtime_s", sol.metrics.runtime_s},
                     {"nodes_expanded", sol.nodes_expanded},
                     {"graph_edges_final", sol.graph_edges_final}};
  return Json{{"trajectories", trajs},
              {"metrics", metrics},
              {"method", sol.metrics.method},
              {"seed", sol.seed}};
}

inline Solution solution_from_json(const Json& j) {
  Solution sol;
  const Json& jt = json_field(j, "trajectories", "solution");
  if (!jt.is_array()) throw InputError("solution: \"trajectories\" must be an array");
  for (const Json& t : jt) sol.trajectories.push_back(trajectory_from_json(t));
  const Json& jm = json_field(j, "metrics", "solution");
  sol.metrics.soc = json_finite(json_field(jm, "soc", "solution metrics"), "soc");
  sol.metrics.makespan =
      json_finite(json_field(jm, "makespan", "solution metrics"), "makespan");
  sol.metrics.runtime_s =
      json_finite(json_field(jm, "runtime_s", "solution metrics"), "runtime_s");
  if (jm.contains("nodes_expanded"))
    sol.nodes_expanded = jm["nodes_expanded"].get<int>();
  if (jm.contains("graph_edges_final"))
    sol.graph_edges_final = jm["graph_edges_final"].get<int>();
  const Json& method = json_field(j, "method", "solution");
  if (!method.is_string()) throw InputError("solution: \"method\" must be a string");
  sol.metrics.method = method.get<std::string>();
  const Json& seed = json_field(j, "seed", "solution");
  if (!seed.is_number_integer() && !seed.is_number_unsigned())
    throw InputError("solution: \"seed\" must be an integer");
  sol.seed = seed.get<std::uint64_t>();
  return sol;
}

inline Json plan_report_to_json(const PlanResult& res, SolveMode mode,
                                std::uint64_t seed) {
  return Json{{"cost", res.cost},
              {"lower_bound", res.lower_bound},
              {"paths_tried", res.paths_tried},
              {"feasible_paths", res.feasible_paths},
              {"mode", mode == SolveMode::kExhaustive ? "exhaustive" : "heuristic"},
              {"seed", seed}};
}

// --- File round trips. ---------------------------------------------------------

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open file: " + path);
  try {
    Json j;
    in >> j;
    return j;
  } catch (const Json::exception& e) {
    throw InputError("malformed JSON in " + path + ": " + e.what());
  }
}

inline void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open file for writing: " + path);
  out << j.dump(2) << "\n";
  if (!out) throw InputError("failed to write file: " + path);
}

}  // namespace stgcs
