#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "oracles.hpp"
#include "stgcs/gcsprog.hpp"

using namespace stgcs;

namespace {

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

HPoly sq(double x0, double y0, double x1, double y1) {
  return HPoly::box(v2(x0, y0), v2(x1, y1));
}

// Every segment must have endpoints in one common vertex set, obey the
// velocity bounds and advance time by at least eps.
void check_trajectory(const SpaceTimeGraph& g, const Trajectory& traj,
                      const State& x_start, const Vec& p_goal,
                      const VelocityBounds& vb, double eps) {
  REQUIRE(traj.states.size() >= 2);
  CHECK((traj.states.front().p - x_start.p).cwiseAbs().maxCoeff() < 1e-7);
  CHECK(std::abs(traj.states.front().t - x_start.t) < 1e-7);
  CHECK((traj.states.back().p - p_goal).cwiseAbs().maxCoeff() < 1e-7);
  const int d = g.dim();
  for (std::size_t i = 1; i < traj.states.size(); ++i) {
    const State& a = traj.states[i - 1];
    const State& b = traj.states[i];
    const double dt = b.t - a.t;
    CHECK(dt >= eps - 1e-9);
    for (int k = 0; k < d; ++k) {
      const double dp = b.p[k] - a.p[k];
      CHECK(dp <= vb.v_max[k] * dt + 1e-9);
      CHECK(dp >= vb.v_min[k] * dt - 1e-9);
    }
    Vec qa(d + 1), qb(d + 1);
    qa << a.p, a.t;
    qb << b.p, b.t;
    bool common = false;
    for (const auto& [id, set] : g.vertices())
      common = common || (set.contains(qa, 1e-7) && set.contains(qb, 1e-7));
    CHECK(common);
  }
}

}  // namespace

TEST_CASE("gcsprog: restriction on a single box vertex") {
  const auto g = build_graph({sq(0, 0, 1, 1)}, 50.0);
  const VertexId v = g.vertices().begin()->first;
  const auto vb = VelocityBounds::uniform(2, 0.5);
  const State start = make_state({0, 0}, 0.0);

  const auto r = restriction(g, GraphPath{{v}}, start, v2(1, 1), vb, 1e-3);
  REQUIRE(r.has_value());
  CHECK(r->second == Catch::Approx(2.0).margin(1e-6));
  CHECK(r->first.states.back().t == Catch::Approx(2.0).margin(1e-6));
  CHECK((r->first.states.back().p - v2(1, 1)).cwiseAbs().maxCoeff() < 1e-6);

  // Degenerate query: goal equals the start position; the minimum dwell
  // makes the cheapest trajectory an eps-long wait.
  const auto rr = restriction(g, GraphPath{{v}}, start, v2(0, 0), vb, 1e-3);
  REQUIRE(rr.has_value());
  CHECK(rr->second == Catch::Approx(1e-3).margin(1e-7));

  // Unreachable boundary condition: start outside the vertex set.
  CHECK_FALSE(
      restriction(g, GraphPath{{v}}, make_state({2, 2}, 0.0), v2(1, 1), vb, 1e-3).has_value());
}

TEST_CASE("gcsprog: two-set detour costs more than the straight line") {
  // L-shaped free space: a vertical bar and a horizontal bar overlapping in
  // the corner square [0,1]^2; the route must pass through the overlap.
  const HPoly A = sq(0, 0, 1, 3);
  const HPoly B = sq(0, 0, 3, 1);
  const auto g = build_graph({A, B}, 50.0);
  REQUIRE(g.num_edges() == 1);
  std::vector<VertexId> ids;
  for (const auto& [id, _] : g.vertices()) ids.push_back(id);
  const auto vb = VelocityBounds::uniform(2, 1.0);
  const State start = make_state({0.5, 2.5}, 0.0);
  const Vec goal = v2(2.5, 0.5);

  const auto r = restriction(g, GraphPath{{ids[0], ids[1]}}, start, goal, vb, 1e-3);
  REQUIRE(r.has_value());
  // Optimal corner waypoint is (1,1): 1.5 s per leg.
  CHECK(r->second == Catch::Approx(3.0).margin(1e-5));
  // Strictly exceeds the free-space straight-line bound max|dp|/vmax = 2.
  CHECK(r->second > 2.0 + 0.5);
  check_trajectory(g, r->first, start, goal, vb, 1e-3);

  // Independent time-stepped grid search upper-bounds the optimum.
  const auto oracle = testing_oracles::grid_plan(
      {extrude_time(A, 0, 50), extrude_time(B, 0, 50)}, start, goal, vb.v_max, 0.01, 20.0);
  REQUIRE(oracle.has_value());
  CHECK(r->second <= *oracle + 1e-6);
  CHECK(r->second >= *oracle - 0.1);
}

TEST_CASE("gcsprog: relaxation is tight on a unique path") {
  const HPoly A = sq(0, 0, 2, 1);
  const HPoly B = sq(1.5, 0, 3.5, 1);
  const HPoly C = sq(3, 0, 5, 1);
  const auto g = build_graph({A, B, C}, 50.0);
  const auto vb = VelocityBounds::uniform(2, 1.0);
  const State start = make_state({0.5, 0.5}, 0.0);
  const Vec goal = v2(4.5, 0.5);
  const auto srcs = g.start_vertices(start);
  const auto snks = g.goal_vertices(goal);
  REQUIRE(srcs.size() == 1);
  REQUIRE(!snks.empty());

  const auto flows = relaxation(g, srcs, snks, start, goal, vb, 1e-3);
  REQUIRE(flows.has_value());

  // The only sigma-tau route is A-B-C; its flow is integral.
  for (std::size_t i = 0; i < flows->arcs.size(); ++i) {
    const double f = flows->flow[i];
    CHECK((f < 1e-5 || f > 1.0 - 1e-5));
  }

  std::vector<VertexId> path;
  for (const auto& [id, _] : g.vertices()) path.push_back(id);
  const auto r = restriction(g, GraphPath{path}, start, goal, vb, 1e-3);
  REQUIRE(r.has_value());
  CHECK(flows->lower_bound == Catch::Approx(r->second).margin(1e-5));

  // Integral flows round to exactly one path: the support.
  const auto paths = round_paths(*flows, 16, 123);
  REQUIRE(paths.size() == 1);
  CHECK(paths[0].vertices == path);
}

TEST_CASE("gcsprog: symmetric corridors split flow and round to both") {
  const HPoly S = sq(0, -1.5, 1, 1.5);
  const HPoly U = sq(0, 0.5, 4, 1.5);
  const HPoly D = sq(0, -1.5, 4, -0.5);
  const HPoly T = sq(3, -1.5, 4, 1.5);
  const auto g = build_graph({S, U, D, T}, 50.0);
  const auto vb = VelocityBounds::uniform(2, 1.0);
  const State start = make_state({0.5, 0.0}, 0.0);
  const Vec goal = v2(3.5, 0.0);

  VertexId sid = -1, uid = -1, did = -1, tid = -1;
  for (const auto& [id, set] : g.vertices()) {
    if (set.contains((Vec(3) << 0.5, 0.0, 1.0).finished())) sid = id;
    if (set.contains((Vec(3) << 2.0, 1.0, 1.0).finished())) uid = id;
    if (set.contains((Vec(3) << 2.0, -1.0, 1.0).finished())) did = id;
    if (set.contains((Vec(3) << 3.5, 0.0, 1.0).finished())) tid = id;
  }
  REQUIRE((sid >= 0 && uid >= 0 && did >= 0 && tid >= 0));

  const auto flows =
      relaxation(g, g.start_vertices(start), g.goal_vertices(goal), start, goal, vb, 1e-3);
  REQUIRE(flows.has_value());

  const auto ru = restriction(g, GraphPath{{sid, uid, tid}}, start, goal, vb, 1e-3);
  const auto rd = restriction(g, GraphPath{{sid, did, tid}}, start, goal, vb, 1e-3);
  REQUIRE(ru.has_value());
  REQUIRE(rd.has_value());
  CHECK(ru->second == Catch::Approx(rd->second).margin(1e-6));  // mirror symmetry
  CHECK(flows->lower_bound <= ru->second + 1e-5);

  // Seeded rounding with budget 16 discovers both corridor paths.
  const auto paths = round_paths(*flows, 16, 2026);
  bool saw_u = false, saw_d = false;
  for (const auto& p : paths) {
    if (p.vertices == std::vector<VertexId>{sid, uid, tid}) saw_u = true;
    if (p.vertices == std::vector<VertexId>{sid, did, tid}) saw_d = true;
  }
  CHECK(saw_u);
  CHECK(saw_d);

  // Budget 1 returns only the deterministic greedy path.
  const auto one = round_paths(*flows, 1, 2026);
  REQUIRE(one.size() == 1);
}

TEST_CASE("gcsprog: lower bound below every simple path on random fixtures") {
  std::mt19937_64 rng(61);
  int built = 0;
  for (int rep = 0; rep < 12 && built < 5; ++rep) {
    // Random connected-ish strip of overlapping boxes.
    std::vector<HPoly> sets;
    double x = 0.0;
    const int n = 3 + static_cast<int>(uniform_index(rng, 4));
    for (int i = 0; i < n; ++i) {
      const double w = uniform_real(rng, 1.0, 2.0);
      const double y0 = uniform_real(rng, -0.4, 0.0);
      sets.push_back(sq(x, y0, x + w, y0 + uniform_real(rng, 1.0, 1.6)));
      x += w * uniform_real(rng, 0.5, 0.8);
    }
    const auto g = build_graph(sets, 50.0);
    const auto vb = VelocityBounds::uniform(2, 1.0);
    const State start = make_state({0.5, 0.5}, 0.0);
    const Vec goal = v2(std::floor(x * 2) / 2.0, 0.5);
    const auto srcs = g.start_vertices(start);
    const auto snks = g.goal_vertices(goal);
    if (srcs.empty() || snks.empty()) continue;
    const auto flows = relaxation(g, srcs, snks, start, goal, vb, 1e-3);
    if (!flows) continue;

    SolveParams ex;
    ex.mode = SolveMode::kExhaustive;
    const auto best = solve_stgcs(g, start, goal, vb, ex);
    if (!best.ok()) continue;
    ++built;
    CHECK(flows->lower_bound <= best.cost + 1e-6);

    SolveParams heur;
    heur.rng_seed = 99 + static_cast<std::uint64_t>(rep);
    const auto h = solve_stgcs(g, start, goal, vb, heur);
    REQUIRE(h.ok());
    CHECK(h.cost >= h.lower_bound - 1e-6);
    CHECK(h.cost >= best.cost - 1e-9);  // exhaustive is the path-optimal reference
    check_trajectory(g, h.trajectory, start, goal, vb, 1e-3);
  }
  REQUIRE(built >= 3);
}

TEST_CASE("gcsprog: empty-map analytic optimum and determinism") {
  const auto g = build_graph({sq(0, 0, 10, 10)}, 50.0);
  const auto vb = VelocityBounds::uniform(2, 0.5);
  std::mt19937_64 rng(71);
  for (int rep = 0; rep < 10; ++rep) {
    const State start =
        State(v2(uniform_real(rng, 0, 10), uniform_real(rng, 0, 10)), 0.0);
    const Vec goal = v2(uniform_real(rng, 0, 10), uniform_real(rng, 0, 10));
    const double analytic =
        std::max((goal - start.p).cwiseAbs().maxCoeff() / 0.5, 1e-3);
    SolveParams params;
    params.rng_seed = 5;
    const auto h = solve_stgcs(g, start, goal, vb, params);
    REQUIRE(h.ok());
    CHECK(h.cost == Catch::Approx(analytic).margin(1e-6));
    SolveParams ex = params;
    ex.mode = SolveMode::kExhaustive;
    const auto e = solve_stgcs(g, start, goal, vb, ex);
    REQUIRE(e.ok());
    CHECK(e.cost == Catch::Approx(analytic).margin(1e-6));
  }

  // Identical inputs and seed give identical outputs.
  const State start = make_state({1, 1}, 0.0);
  const Vec goal = v2(8, 4);
  SolveParams params;
  params.rng_seed = 42;
  const auto a = solve_stgcs(g, start, goal, vb, params);
  const auto b = solve_stgcs(g, start, goal, vb, params);
  REQUIRE(a.ok());
  REQUIRE(b.ok());
  REQUIRE(a.trajectory.states.size() == b.trajectory.states.size());
  for (std::size_t i = 0; i < a.trajectory.states.size(); ++i) {
    CHECK(a.trajectory.states[i].t == b.trajectory.states[i].t);
    CHECK((a.trajectory.states[i].p - b.trajectory.states[i].p).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("gcsprog: restriction cost invariant under time translation") {
  const auto g = build_graph({sq(0, 0, 10, 10)}, 50.0);
  const VertexId v = g.vertices().begin()->first;
  const auto vb = VelocityBounds::uniform(2, 1.0);
  const auto r0 =
      restriction(g, GraphPath{{v}}, make_state({1, 1}, 0.0), v2(6, 3), vb, 1e-3);
  const auto r7 =
      restriction(g, GraphPath{{v}}, make_state({1, 1}, 7.0), v2(6, 3), vb, 1e-3);
  REQUIRE(r0.has_value());
  REQUIRE(r7.has_value());
  CHECK(r0->second == Catch::Approx(r7->second).margin(1e-8));
  CHECK(r7->first.states.back().t == Catch::Approx(7.0 + r0->second).margin(1e-7));
}

TEST_CASE("gcsprog: failure reasons") {
  const auto g0 = build_graph({sq(0, 0, 4, 4)}, 50.0);
  const auto vb = VelocityBounds::uniform(2, 1.0);

  // Start outside the free space.
  const auto r1 = solve_stgcs(g0, make_state({9, 9}, 0.0), v2(1, 1), vb, {});
  CHECK_FALSE(r1.ok());
  CHECK(r1.fail == FailReason::kNoStartVertex);

  // Goal line blocked near the horizon: nothing can stay at the goal.
  auto g = g0;
  const VertexId root = g.vertices().begin()->first;
  const HPoly& X = g.vertex(root);
  Vec tN(3), xN(3);
  tN << 0, 0, 1;
  xN << 1, 0, 0;
  const HPoly below = X.with_halfspace({tN, 10.0});
  const HPoly mid_left =
      X.with_halfspace({-tN, -10.0}).with_halfspace({xN, 1.5});
  const HPoly mid_right =
      X.with_halfspace({-tN, -10.0}).with_halfspace({-xN, -2.5});
  g.replace_vertex(root, {below, mid_left, mid_right});
  const auto r2 = solve_stgcs(g, make_state({1, 1}, 0.0), v2(2.0, 2.0), vb, {});
  CHECK_FALSE(r2.ok());
  CHECK(r2.fail == FailReason::kNoGoalVertex);

  // Disconnected terminals.
  const auto g2 = build_graph({sq(0, 0, 1, 1), sq(3, 3, 4, 4)}, 50.0);
  const auto r3 = solve_stgcs(g2, make_state({0.5, 0.5}, 0.0), v2(3.5, 3.5), vb, {});
  CHECK_FALSE(r3.ok());
  CHECK(r3.fail == FailReason::kNoPath);
}
