#pragma once

// Benchmark plumbing: the versioned instance file schema, the shipped map
// catalog, seeded random instance generation, the benchmark matrix runner
// with CSV output, and an SVG renderer for 2-D solutions.
//
// Instance schema (version 1):
//   {"schema": 1, "d": <int>, "map": [polytope, ...], "t_max": <number>,
//    "v_min": [...], "v_max": [...], "safe_radius": <number>,
//    "robots": [{"start": state, "goal": [...]}, ...],
//    "dynamic_obstacles": [reservation, ...], "seed": <int>}

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "common.hpp"
#include "ecd.hpp"
#include "geom.hpp"
#include "gcsprog.hpp"
#include "json_io.hpp"
#include "mrmp.hpp"
#include "stgraph.hpp"

namespace stgcs {

// ---------------------------------------------------------------------------
// Instance files.

struct InstanceFile {
  int d = 0;
  std::vector<HPoly> map;  // spatial free-space cover
  double t_max = 0.0;
  Vec v_min;
  Vec v_max;
  double safe_radius = 0.5;
  std::vector<RobotSpec> robots;
  std::vector<Reservation> dynamic_obstacles;
  std::uint64_t seed = 0;
};

inline Json instance_to_json(const InstanceFile& f) {
  Json map = Json::array();
  for (const HPoly& set : f.map) map.push_back(hpoly_to_json(set));
  Json robots = Json::array();
  for (const RobotSpec& r : f.robots)
    robots.push_back(Json{{"start", state_to_json(r.x_start)}, {"goal", vec_to_json(r.p_goal)}});
  Json obstacles = Json::array();
  for (const Reservation& r : f.dynamic_obstacles) obstacles.push_back(reservation_to_json(r));
  return Json{{"schema", 1},
              {"d", f.d},
              {"map", map},
              {"t_max", f.t_max},
              {"v_min", vec_to_json(f.v_min)},
              {"v_max", vec_to_json(f.v_max)},
              {"safe_radius", f.safe_radius},
              {"robots", robots},
              {"dynamic_obstacles", obstacles},
              {"seed", f.seed}};
}

inline InstanceFile instance_from_json(const Json& j) {
  const Json& schema = json_field(j, "schema", "instance");
  if (!schema.is_number_integer() || schema.get<int>() != 1)
    throw InputError("instance: unsupported schema version (expected 1)");

  InstanceFile f;
  const Json& jd = json_field(j, "d", "instance");
  if (!jd.is_number_integer() || jd.get<int>() < 1)
    throw InputError("instance: \"d\" must be a positive integer");
  f.d = jd.get<int>();

  const Json& jmap = json_field(j, "map", "instance");
  if (!jmap.is_array() || jmap.empty())
    throw InputError("instance: \"map\" must be a nonempty array of polytopes");
  for (const Json& js : jmap) {
    HPoly set = hpoly_from_json(js);
    if (set.dim() != f.d)
      throw InputError("instance: map set dimension does not match \"d\"");
    if (set.is_empty()) throw InputError("instance: map contains an empty set");
    f.map.push_back(std::move(set));
  }

  f.t_max = json_finite(json_field(j, "t_max", "instance"), "instance t_max");
  if (f.t_max <= 0.0) throw InputError("instance: \"t_max\" must be positive");

  f.v_min = vec_from_json(json_field(j, "v_min", "instance"), "instance v_min");
  f.v_max = vec_from_json(json_field(j, "v_max", "instance"), "instance v_max");
  if (f.v_min.size() != f.d || f.v_max.size() != f.d)
    throw InputError("instance: velocity bounds must have length \"d\"");
  for (int k = 0; k < f.d; ++k)
    if (!(f.v_min[k] < 0.0 && f.v_max[k] > 0.0))
      throw InputError("instance: require v_min < 0 < v_max per coordinate");

  f.safe_radius =
      json_finite(json_field(j, "safe_radius", "instance"), "instance safe_radius");
  if (f.safe_radius <= 0.0) throw InputError("instance: \"safe_radius\" must be positive");

  const Json& jr = json_field(j, "robots", "instance");
  if (!jr.is_array() || jr.empty())
    throw InputError("instance: \"robots\" must be a nonempty array");
  for (const Json& r : jr) {
    RobotSpec spec;
    spec.x_start = state_from_json(json_field(r, "start", "robot"));
    spec.p_goal = vec_from_json(json_field(r, "goal", "robot"), "robot goal");
    if (spec.x_start.p.size() != f.d || spec.p_goal.size() != f.d)
      throw InputError("instance: robot start/goal dimension does not match \"d\"");
    if (spec.x_start.t < 0.0 || spec.x_start.t > f.t_max)
      throw InputError("instance: robot start time outside [0, t_max]");
    f.robots.push_back(std::move(spec));
  }
  for (std::size_t a = 0; a < f.robots.size(); ++a)
    for (std::size_t b = a + 1; b < f.robots.size(); ++b) {
      const Vec d = f.robots[a].x_start.p - f.robots[b].x_start.p;
      if (d.cwiseAbs().maxCoeff() < f.safe_radius - 1e-9)
        throw InputError("instance: robot starts closer than the safe radius");
    }

  const Json& jo = json_field(j, "dynamic_obstacles", "instance");
  if (!jo.is_array()) throw InputError("instance: \"dynamic_obstacles\" must be an array");
  for (const Json& o : jo) {
    Reservation res = reservation_from_json(o);
    if (res.trajectory.states.front().p.size() != f.d)
      throw InputError("instance: obstacle dimension does not match \"d\"");
    f.dynamic_obstacles.push_back(std::move(res));
  }

  const Json& js = json_field(j, "seed", "instance");
  if (!js.is_number_integer() && !js.is_number_unsigned())
    throw InputError("instance: \"seed\" must be an integer");
  f.seed = js.get<std::uint64_t>();
  return f;
}

inline void save_instance(const InstanceFile& f, const std::string& path) {
  write_json_file(path, instance_to_json(f));
}

inline InstanceFile read_instance_file(const std::string& path) {
  return instance_from_json(read_json_file(path));
}

// Build the ready-to-plan instance: space-time graph over the map sets with
// every dynamic obstacle reserved.
inline MrmpInstance to_instance(const InstanceFile& f) {
  MrmpInstance inst;
  inst.graph = build_graph(f.map, f.t_max);
  for (std::size_t i = 0; i < f.dynamic_obstacles.size(); ++i) {
    try {
      inst.graph = reserve(inst.graph, f.dynamic_obstacles[i]);
    } catch (const CoverageError& e) {
      throw InputError("instance: dynamic obstacle " + std::to_string(i) +
                       " leaves the map free space (" + e.what() + ")");
    }
  }
  inst.robots = f.robots;
  inst.vb = VelocityBounds{f.v_min, f.v_max};
  inst.safe_radius = f.safe_radius;
  inst.solve_params.rng_seed = f.seed;
  return inst;
}

inline MrmpInstance load_instance(const std::string& path) {
  return to_instance(read_instance_file(path));
}

// ---------------------------------------------------------------------------
// Map catalog.

struct MapDef {
  std::string name;
  std::vector<HPoly> sets;
  double v_max = 1.0;        // symmetric per-dimension speed bound
  double safe_radius = 0.5;
  double t_max = 50.0;
  std::vector<Reservation> obstacles;
};

namespace benchdetail {

inline Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

inline HPoly box2(double x0, double y0, double x1, double y1) {
  return HPoly::box(v2(x0, y0), v2(x1, y1));
}

inline Reservation moving_square(double x0, double y0, double x1, double y1,
                                 double t0, double t1, double apothem) {
  Reservation res;
  res.trajectory.states = {State{v2(x0, y0), t0}, State{v2(x1, y1), t1}};
  res.tube_apothem = apothem;
  return res;
}

}  // namespace benchdetail

inline const std::vector<MapDef>& map_catalog() {
  using benchdetail::box2;
  using benchdetail::moving_square;
  static const std::vector<MapDef> catalog = [] {
    std::vector<MapDef> maps;

    // One open room; slow robots.
    maps.push_back(MapDef{"empty", {box2(0, 0, 10, 10)}, 0.5, 0.5, 50.0, {}});

    // Two rooms joined by two corridors through a central wall, with four
    // squares sweeping vertical lanes at constant velocity.
    maps.push_back(MapDef{"simple_like",
                          {box2(0, 0, 4.5, 10), box2(5.5, 0, 10, 10),
                           box2(4, 2, 6, 3), box2(4, 7, 6, 8)},
                          1.0,
                          0.5,
                          50.0,
                          {moving_square(1.5, 1, 1.5, 9, 0, 50, 0.3),
                           moving_square(3, 9, 3, 1, 0, 50, 0.3),
                           moving_square(7, 1, 7, 9, 0, 50, 0.3),
                           moving_square(8.5, 9, 8.5, 1, 0, 50, 0.3)}});

    // A 3x3 grid of rooms; rows fully connected by corridors, columns
    // connected through the middle column.
    {
      MapDef def{"complex_like", {}, 1.0, 0.5, 50.0, {}};
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          def.sets.push_back(box2(0.4 + 3.2 * i, 0.4 + 3.2 * j, 2.8 + 3.2 * i,
                                  2.8 + 3.2 * j));
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 3; ++j)
          def.sets.push_back(box2(2.6 + 3.2 * i, 1.3 + 3.2 * j, 3.8 + 3.2 * i,
                                  1.9 + 3.2 * j));
      for (int j = 0; j < 2; ++j)
        def.sets.push_back(box2(4.5, 2.6 + 3.2 * j, 5.1, 3.8 + 3.2 * j));
      maps.push_back(std::move(def));
    }

    // One-robot-wide corridor with a niche refuge near the left end.
    maps.push_back(MapDef{"corridor",
                          {box2(0, 0, 6, 0.4), box2(0.8, 0, 1.2, 1.2)},
                          1.0,
                          0.5,
                          40.0,
                          {}});

    // Open square room for the four-robot swap fixture.
    maps.push_back(MapDef{"swap4", {box2(0, 0, 8, 8)}, 1.0, 0.5, 50.0, {}});
    return maps;
  }();
  return catalog;
}

inline const MapDef& find_map(const std::string& name) {
  for (const MapDef& def : map_catalog())
    if (def.name == name) return def;
  std::string names;
  for (const MapDef& def : map_catalog()) names += (names.empty() ? "" : ", ") + def.name;
  throw InputError("unknown map \"" + name + "\" (available: " + names + ")");
}

// ---------------------------------------------------------------------------
// Random instance generation.

namespace benchdetail {

// Uniform point in a set: uniform over its bounding box, rejecting outside
// points. Counts attempts against the caller's rejection budget.
inline Vec sample_point(const HPoly& set, const std::pair<Vec, Vec>& bbox,
                        std::mt19937_64& rng, long& budget) {
  while (budget > 0) {
    --budget;
    Vec p(set.dim());
    for (int k = 0; k < set.dim(); ++k)
      p[k] = uniform_real(rng, bbox.first[k], bbox.second[k]);
    if (set.contains(p)) return p;
  }
  throw InputError("gen: sampling budget exhausted (map too crowded)");
}

inline bool separated(const Vec& p, const std::vector<Vec>& others, double min_sep) {
  for (const Vec& q : others)
    if ((p - q).cwiseAbs().maxCoeff() < min_sep) return false;
  return true;
}

}  // namespace benchdetail

// Generate `count` random instances of `n` robots on a catalog map.
//
// Starts are sampled uniformly over the spatial sets at t = 0 with pairwise
// inf-norm separation >= 2 * safe_radius (so the initial configuration is
// collision-free by construction); goals likewise, and each goal must be
// reachable (a stay-at-goal vertex exists in the obstacle-reserved graph).
// Robots are drawn sequentially from one per-instance seeded stream, so for a
// fixed (seed, instance index) the first n robots agree across calls with
// different n: instance families are nested.
inline std::vector<InstanceFile> gen_instances(const std::string& map_name, int n,
                                               int count, std::uint64_t seed) {
  if (n < 1) throw InputError("gen: need at least one robot");
  if (count < 0) throw InputError("gen: negative instance count");
  const MapDef& def = find_map(map_name);

  // Shared geometry: the obstacle-reserved graph used for reachability tests.
  SpaceTimeGraph graph = build_graph(def.sets, def.t_max);
  for (const Reservation& res : def.obstacles) graph = reserve(graph, res);

  std::vector<std::pair<Vec, Vec>> bboxes;
  bboxes.reserve(def.sets.size());
  for (const HPoly& set : def.sets) bboxes.push_back(set.bounding_box());

  const int d = def.sets.front().dim();
  const double min_sep = 2.0 * def.safe_radius;

  std::vector<InstanceFile> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int id = 0; id < count; ++id) {
    const std::uint64_t inst_seed = hash_combine(seed, static_cast<std::uint64_t>(id));
    std::mt19937_64 rng(inst_seed);
    long budget = 100000;

    InstanceFile f;
    f.d = d;
    f.map = def.sets;
    f.t_max = def.t_max;
    f.v_max = Vec::Constant(d, def.v_max);
    f.v_min = -f.v_max;
    f.safe_radius = def.safe_radius;
    f.dynamic_obstacles = def.obstacles;
    f.seed = inst_seed;

    std::vector<Vec> starts, goals;
    for (int r = 0; r < n; ++r) {
      RobotSpec spec;
      for (;;) {
        const std::size_t si = uniform_index(rng, def.sets.size());
        const Vec p = benchdetail::sample_point(def.sets[si], bboxes[si], rng, budget);
        if (!benchdetail::separated(p, starts, min_sep)) continue;
        if (graph.start_vertices(State{p, 0.0}).empty()) continue;
        spec.x_start = State{p, 0.0};
        starts.push_back(p);
        break;
      }
      for (;;) {
        const std::size_t si = uniform_index(rng, def.sets.size());
        const Vec p = benchdetail::sample_point(def.sets[si], bboxes[si], rng, budget);
        if (!benchdetail::separated(p, goals, min_sep)) continue;
        if (graph.goal_vertices(p).empty()) continue;
        spec.p_goal = p;
        goals.push_back(p);
        break;
      }
      f.robots.push_back(std::move(spec));
    }
    out.push_back(std::move(f));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Benchmark matrix runner.

struct BenchRow {
  std::string map;
  int n = 0;
  int instance_id = 0;
  std::string method;
  bool success = false;
  double runtime_s = 0.0;
  double soc = std::numeric_limits<double>::quiet_NaN();       // present iff success
  double makespan = std::numeric_limits<double>::quiet_NaN();  // present iff success
  int nodes_expanded = -1;                                     // present iff success
  int graph_edges_final = -1;                                  // present iff success
};

struct BenchMatrix {
  std::vector<std::string> maps;
  std::vector<int> robot_counts;
  std::vector<std::string> methods;  // subset of {"sp", "rp", "pbs"}
  int instances = 12;
  std::uint64_t seed = 0;
  double budget_s = 150.0;
};

inline MrmpResult run_method(const std::string& method, const MrmpInstance& inst) {
  if (method == "sp") return sp(inst);
  if (method == "rp") return rp(inst);
  if (method == "pbs") return pbs(inst);
  throw InputError("unknown method \"" + method + "\" (expected sp, rp, or pbs)");
}

inline std::vector<BenchRow> run_bench(const BenchMatrix& matrix) {
  for (const std::string& m : matrix.methods)
    if (m != "sp" && m != "rp" && m != "pbs")
      throw InputError("unknown method \"" + m + "\" (expected sp, rp, or pbs)");
  std::vector<BenchRow> rows;
  for (const std::string& map_name : matrix.maps) {
    for (const int n : matrix.robot_counts) {
      const std::vector<InstanceFile> files =
          gen_instances(map_name, n, matrix.instances, matrix.seed);
      for (int id = 0; id < static_cast<int>(files.size()); ++id) {
        MrmpInstance inst = to_instance(files[static_cast<std::size_t>(id)]);
        inst.time_budget_s = matrix.budget_s;
        for (const std::string& method : matrix.methods) {
          BenchRow row;
          row.map = map_name;
          row.n = n;
          row.instance_id = id;
          row.method = method;
          const auto t0 = std::chrono::steady_clock::now();
          try {
            const MrmpResult res = run_method(method, inst);
            if (res.ok()) {
              row.success = true;
              row.runtime_s = res.solution->metrics.runtime_s;
              row.soc = res.solution->metrics.soc;
              row.makespan = res.solution->metrics.makespan;
              row.nodes_expanded = res.solution->nodes_expanded;
              row.graph_edges_final = res.solution->graph_edges_final;
            }
          } catch (const SolverError&) {
            // A numerical failure inside one cell must not abort the matrix.
          }
          if (!row.success)
            row.runtime_s = std::chrono::duration<double>(
                                std::chrono::steady_clock::now() - t0)
                                .count();
          rows.push_back(std::move(row));
        }
      }
    }
  }
  return rows;
}

namespace benchdetail {

inline std::string fmt_g6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

inline std::string csv_number(double v) {
  return std::isfinite(v) ? fmt_g6(v) : std::string();
}

inline std::string csv_count(int v) { return v >= 0 ? std::to_string(v) : std::string(); }

}  // namespace benchdetail

inline constexpr const char* kBenchCsvHeader =
    "map,n,instance_id,method,success,runtime_s,soc,makespan,nodes_expanded,"
    "graph_edges_final";

inline std::string bench_csv(const std::vector<BenchRow>& rows) {
  using benchdetail::csv_count;
  using benchdetail::csv_number;
  std::string out = std::string(kBenchCsvHeader) + "\n";
  for (const BenchRow& r : rows) {
    out += r.map + "," + std::to_string(r.n) + "," + std::to_string(r.instance_id) + "," +
           r.method + "," + (r.success ? "true" : "false") + "," +
           csv_number(r.runtime_s) + "," + csv_number(r.soc) + "," +
           csv_number(r.makespan) + "," + csv_count(r.nodes_expanded) + "," +
           csv_count(r.graph_edges_final) + "\n";
  }
  return out;
}

// Per-(map, n, method) aggregation. Means are taken over the instances solved
// by every included method of the cell's (map, n) group; a method solving
// fewer than 3 instances (when 12 or more ran) is excluded from that
// intersection and reports no means.
struct BenchSummary {
  std::string map;
  int n = 0;
  std::string method;
  int solved = 0;
  int total = 0;
  bool included = false;
  double mean_runtime_s = std::numeric_limits<double>::quiet_NaN();
  double mean_soc = std::numeric_limits<double>::quiet_NaN();
  double mean_makespan = std::numeric_limits<double>::quiet_NaN();
};

inline std::vector<BenchSummary> summarize_bench(const std::vector<BenchRow>& rows) {
  std::map<std::pair<std::string, int>, std::map<std::string, std::vector<const BenchRow*>>>
      groups;
  for (const BenchRow& r : rows) groups[{r.map, r.n}][r.method].push_back(&r);

  std::vector<BenchSummary> out;
  for (const auto& [key, methods] : groups) {
    // Which instances does each method solve, and who participates?
    std::map<std::string, std::set<int>> solved_ids;
    for (const auto& [method, cells] : methods)
      for (const BenchRow* r : cells)
        if (r->success) solved_ids[method].insert(r->instance_id);

    std::set<int> intersection;
    bool first = true;
    std::map<std::string, bool> included;
    for (const auto& [method, cells] : methods) {
      const int total = static_cast<int>(cells.size());
      const int solved = static_cast<int>(solved_ids[method].size());
      const bool in = total < 12 ? solved > 0 : solved >= 3;
      included[method] = in;
      if (!in) continue;
      if (first) {
        intersection = solved_ids[method];
        first = false;
      } else {
        std::set<int> next;
        std::set_intersection(intersection.begin(), intersection.end(),
                              solved_ids[method].begin(), solved_ids[method].end(),
                              std::inserter(next, next.begin()));
        intersection = std::move(next);
      }
    }

    for (const auto& [method, cells] : methods) {
      BenchSummary s;
      s.map = key.first;
      s.n = key.second;
      s.method = method;
      s.total = static_cast<int>(cells.size());
      s.solved = static_cast<int>(solved_ids[method].size());
      s.included = included[method];
      if (s.included && !intersection.empty()) {
        double rt = 0.0, soc = 0.0, mk = 0.0;
        int cnt = 0;
        for (const BenchRow* r : cells)
          if (r->success && intersection.count(r->instance_id)) {
            rt += r->runtime_s;
            soc += r->soc;
            mk += r->makespan;
            ++cnt;
          }
        if (cnt > 0) {
          s.mean_runtime_s = rt / cnt;
          s.mean_soc = soc / cnt;
          s.mean_makespan = mk / cnt;
        }
      }
      out.push_back(std::move(s));
    }
  }
  return out;
}

inline std::string summary_csv(const std::vector<BenchSummary>& summaries) {
  using benchdetail::csv_number;
  std::string out = "map,n,method,solved,total,included,mean_runtime_s,mean_soc,mean_makespan\n";
  for (const BenchSummary& s : summaries) {
    out += s.map + "," + std::to_string(s.n) + "," + s.method + "," +
           std::to_string(s.solved) + "," + std::to_string(s.total) + "," +
           (s.included ? "true" : "false") + "," + csv_number(s.mean_runtime_s) + "," +
           csv_number(s.mean_soc) + "," + csv_number(s.mean_makespan) + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// SVG rendering (2-D only).

namespace benchdetail {

using Pt = std::pair<double, double>;

// Vertices of a bounded 2-D polytope: pairwise constraint intersections that
// satisfy every halfspace, in counterclockwise order.
inline std::vector<Pt> polygon_vertices(const HPoly& P) {
  const Mat& A = P.A();
  const Vec& b = P.b();
  std::vector<Pt> pts;
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = i + 1; j < A.rows(); ++j) {
      const double det = A(i, 0) * A(j, 1) - A(i, 1) * A(j, 0);
      if (std::abs(det) < 1e-12) continue;
      const double x = (b[i] * A(j, 1) - b[j] * A(i, 1)) / det;
      const double y = (A(i, 0) * b[j] - A(j, 0) * b[i]) / det;
      Vec p(2);
      p << x, y;
      if (((A * p - b).array() <= 1e-7).all()) pts.emplace_back(x, y);
    }
  // Dedupe.
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const Pt& a, const Pt& b) {
                          return std::abs(a.first - b.first) < 1e-9 &&
                                 std::abs(a.second - b.second) < 1e-9;
                        }),
            pts.end());
  if (pts.size() < 3) return pts;
  double cx = 0.0, cy = 0.0;
  for (const Pt& p : pts) {
    cx += p.first;
    cy += p.second;
  }
  cx /= static_cast<double>(pts.size());
  cy /= static_cast<double>(pts.size());
  std::sort(pts.begin(), pts.end(), [cx, cy](const Pt& a, const Pt& b) {
    return std::atan2(a.second - cy, a.first - cx) < std::atan2(b.second - cy, b.first - cx);
  });
  return pts;
}

// Andrew monotone-chain convex hull, counterclockwise.
inline std::vector<Pt> convex_hull(std::vector<Pt> pts) {
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  const std::size_t n = pts.size();
  if (n < 3) return pts;
  const auto cross = [](const Pt& o, const Pt& a, const Pt& b) {
    return (a.first - o.first) * (b.second - o.second) -
           (a.second - o.second) * (b.first - o.first);
  };
  std::vector<Pt> hull(2 * n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  for (std::size_t i = n - 1, t = k + 1; i > 0; --i) {
    while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i - 1]) <= 0) --k;
    hull[k++] = pts[i - 1];
  }
  hull.resize(k - 1);
  return hull;
}

inline std::string fmt_pt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

}  // namespace benchdetail

// Render a 2-D solution over its instance: free-space sets, projected
// dynamic-obstacle tubes, and one polyline per robot with state markers whose
// opacity decreases with time. The output is a pure function of the inputs.
inline std::string render_svg(const Solution& sol, const InstanceFile& inst) {
  using benchdetail::fmt_pt;
  using benchdetail::Pt;
  if (inst.d != 2) throw InputError("svg: only 2-D instances can be rendered");

  Vec lo = Vec::Constant(2, std::numeric_limits<double>::infinity());
  Vec hi = Vec::Constant(2, -std::numeric_limits<double>::infinity());
  for (const HPoly& set : inst.map) {
    const auto [slo, shi] = set.bounding_box();
    lo = lo.cwiseMin(slo);
    hi = hi.cwiseMax(shi);
  }
  const double pad = 0.5;
  const double scale = 60.0;
  const double w = (hi[0] - lo[0] + 2 * pad) * scale;
  const double h = (hi[1] - lo[1] + 2 * pad) * scale;
  const auto X = [&](double x) { return (x - lo[0] + pad) * scale; };
  const auto Y = [&](double y) { return (hi[1] - y + pad) * scale; };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt_pt(w) +
         "\" height=\"" + fmt_pt(h) + "\" viewBox=\"0 0 " + fmt_pt(w) + " " + fmt_pt(h) +
         "\">\n";
  svg += "<rect x=\"0\" y=\"0\" width=\"" + fmt_pt(w) + "\" height=\"" + fmt_pt(h) +
         "\" fill=\"#ffffff\"/>\n";

  for (const HPoly& set : inst.map) {
    const std::vector<Pt> poly = benchdetail::polygon_vertices(set);
    if (poly.size() < 3) continue;
    svg += "<polygon class=\"set\" points=\"";
    for (std::size_t i = 0; i < poly.size(); ++i) {
      if (i) svg += " ";
      svg += fmt_pt(X(poly[i].first)) + "," + fmt_pt(Y(poly[i].second));
    }
    svg += "\" fill=\"#eef2f7\" stroke=\"#99a4b0\" stroke-width=\"1\"/>\n";
  }

  for (const Reservation& res : inst.dynamic_obstacles) {
    const auto& st = res.trajectory.states;
    for (std::size_t i = 0; i + 1 < st.size() || (st.size() == 1 && i == 0); ++i) {
      const Vec& a = st[i].p;
      const Vec& b = st[std::min(i + 1, st.size() - 1)].p;
      std::vector<Pt> corners;
      for (const double sx : {-res.tube_apothem, res.tube_apothem})
        for (const double sy : {-res.tube_apothem, res.tube_apothem}) {
          corners.emplace_back(a[0] + sx, a[1] + sy);
          corners.emplace_back(b[0] + sx, b[1] + sy);
        }
      const std::vector<Pt> hull = benchdetail::convex_hull(corners);
      if (hull.size() < 3) continue;
      svg += "<polygon class=\"obstacle\" points=\"";
      for (std::size_t k = 0; k < hull.size(); ++k) {
        if (k) svg += " ";
        svg += fmt_pt(X(hull[k].first)) + "," + fmt_pt(Y(hull[k].second));
      }
      svg += "\" fill=\"#d08770\" fill-opacity=\"0.35\" stroke=\"none\"/>\n";
      if (st.size() == 1) break;
    }
  }

  static const std::array<const char*, 10> palette = {
      "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
      "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

  double t0 = std::numeric_limits<double>::infinity();
  double t1 = -std::numeric_limits<double>::infinity();
  for (const Trajectory& traj : sol.trajectories)
    for (const State& s : traj.states) {
      t0 = std::min(t0, s.t);
      t1 = std::max(t1, s.t);
    }
  const double span = t1 > t0 ? t1 - t0 : 1.0;

  for (std::size_t r = 0; r < sol.trajectories.size(); ++r) {
    const Trajectory& traj = sol.trajectories[r];
    if (traj.states.empty()) continue;
    const char* color = palette[r % palette.size()];
    svg += "<polyline class=\"robot\" points=\"";
    for (std::size_t i = 0; i < traj.states.size(); ++i) {
      if (i) svg += " ";
      svg += fmt_pt(X(traj.states[i].p[0])) + "," + fmt_pt(Y(traj.states[i].p[1]));
    }
    svg += std::string("\" fill=\"none\" stroke=\"") + color +
           "\" stroke-width=\"2\" stroke-opacity=\"0.85\"/>\n";
    for (const State& s : traj.states) {
      const double opacity = 0.9 - 0.75 * (s.t - t0) / span;
      svg += "<circle cx=\"" + fmt_pt(X(s.p[0])) + "\" cy=\"" + fmt_pt(Y(s.p[1])) +
             "\" r=\"4\" fill=\"" + color + "\" fill-opacity=\"" + fmt_pt(opacity) +
             "\"/>\n";
    }
  }

  svg += "</svg>\n";
  return svg;
}

inline void emit_svg(const Solution& sol, const InstanceFile& inst,
                     const std::string& path) {
  const std::string svg = render_svg(sol, inst);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open file for writing: " + path);
  out << svg;
  if (!out) throw InputError("failed to write file: " + path);
}

}  // namespace stgcs
