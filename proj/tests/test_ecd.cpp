#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>
#include <vector>

#include "stgcs/ecd.hpp"

using namespace stgcs;

namespace {

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

Vec v3(double a, double b, double c) {
  Vec v(3);
  v << a, b, c;
  return v;
}

Trajectory make_traj(std::initializer_list<std::pair<std::pair<double, double>, double>> pts) {
  Trajectory t;
  for (const auto& [p, tt] : pts) t.states.push_back({v2(p.first, p.second), tt});
  return t;
}

HPoly spatial_box(double x0, double y0, double x1, double y1) {
  return HPoly::box(v2(x0, y0), v2(x1, y1));
}

}  // namespace

TEST_CASE("ecd: canonicalize pads both ends and keeps interior breakpoints") {
  const Trajectory t = make_traj({{{0, 0}, 5.0}, {{1, 0}, 6.0}});
  const Trajectory c = canonicalize(t, 50.0);
  REQUIRE(c.states.size() == 4);
  CHECK(c.states[0].p == v2(0, 0));
  CHECK(c.states[0].t == 0.0);
  CHECK(c.states[1].p == v2(0, 0));
  CHECK(c.states[1].t == 5.0);
  CHECK(c.states[2].p == v2(1, 0));
  CHECK(c.states[2].t == 6.0);
  CHECK(c.states[3].p == v2(1, 0));
  CHECK(c.states[3].t == 50.0);

  // Already spanning [0, t_max]: unchanged.
  const Trajectory full = make_traj({{{0, 0}, 0.0}, {{2, 1}, 50.0}});
  const Trajectory cf = canonicalize(full, 50.0);
  REQUIRE(cf.states.size() == 2);
  CHECK(cf.states[0].t == 0.0);
  CHECK(cf.states[1].t == 50.0);
}

TEST_CASE("ecd: canonicalize turns a single state into a pure wait column") {
  const Trajectory t = make_traj({{{2, 2}, 10.0}});
  const Trajectory c = canonicalize(t, 50.0);
  REQUIRE(c.states.size() >= 2);
  CHECK(c.states.front().t == 0.0);
  CHECK(c.states.back().t == 50.0);
  for (const auto& s : c.states) CHECK((s.p - v2(2, 2)).cwiseAbs().maxCoeff() == 0.0);
  // The zero-velocity interior breakpoint is merged away.
  CHECK(c.states.size() == 2);
}

TEST_CASE("ecd: canonicalize rejects bad input") {
  CHECK_THROWS_AS(canonicalize(Trajectory{}, 50.0), InputError);
  CHECK_THROWS_AS(canonicalize(make_traj({{{0, 0}, 60.0}}), 50.0), InputError);
}

TEST_CASE("ecd: vertex segment sequence maps pieces to covering sets") {
  // Two abutting boxes sharing the face x = 2.
  const std::vector<HPoly> sets = {spatial_box(0, 0, 2, 1), spatial_box(2, 0, 4, 1)};
  const auto g = build_graph(sets, 10.0);

  SECTION("one segment inside one set -> one tuple") {
    Trajectory t = make_traj({{{0.5, 0.5}, 0.0}, {{1.5, 0.5}, 10.0}});
    const auto seq = vertex_segment_sequence(g, t);
    REQUIRE(seq.size() == 1);
    CHECK(seq[0].seg.x.t == 0.0);
    CHECK(seq[0].seg.y.t == 10.0);
  }

  SECTION("crossing the shared face splits at the crossing time") {
    Trajectory t = make_traj({{{1, 0.5}, 0.0}, {{3, 0.5}, 10.0}});
    const auto seq = vertex_segment_sequence(g, t);
    REQUIRE(seq.size() == 2);
    // Crossing x = 2 happens at t = 5.
    CHECK(seq[0].seg.x.t == Catch::Approx(0.0).margin(1e-9));
    CHECK(seq[0].seg.y.t == Catch::Approx(5.0).margin(1e-9));
    CHECK(seq[1].seg.x.t == Catch::Approx(5.0).margin(1e-9));
    CHECK(seq[1].seg.y.t == Catch::Approx(10.0).margin(1e-9));
    CHECK(seq[0].vertex_id != seq[1].vertex_id);
  }

  SECTION("riding the shared face emits a tuple from both sets") {
    Trajectory t = make_traj({{{2, 0.25}, 0.0}, {{2, 0.75}, 10.0}});
    const auto seq = vertex_segment_sequence(g, t);
    REQUIRE(seq.size() == 2);
    CHECK(seq[0].vertex_id != seq[1].vertex_id);
    for (const auto& vs : seq) {
      CHECK(vs.seg.x.t == Catch::Approx(0.0).margin(1e-9));
      CHECK(vs.seg.y.t == Catch::Approx(10.0).margin(1e-9));
    }
  }

  SECTION("leaving the free space raises a coverage error") {
    Trajectory t = make_traj({{{3, 0.5}, 0.0}, {{5, 0.5}, 10.0}});
    CHECK_THROWS_AS(vertex_segment_sequence(g, t), CoverageError);
  }
}

namespace {

// Strict/loose membership helpers for the partition checks.
int strict_count(const std::vector<HPoly>& kids, const Vec& q, double tol) {
  int c = 0;
  for (const auto& k : kids)
    if (k.contains(q, -tol)) ++c;
  return c;
}

int loose_count(const std::vector<HPoly>& kids, const Vec& q, double tol) {
  int c = 0;
  for (const auto& k : kids)
    if (k.contains(q, tol)) ++c;
  return c;
}

}  // namespace

TEST_CASE("ecd: decompose_one of an interior tuple gives exactly six sets") {
  const HPoly X = extrude_time(spatial_box(0, 0, 10, 10), 0.0, 50.0);
  const Segment seg{{v2(2, 2), 10.0}, {v2(4, 2), 14.0}};
  const double r = 0.5;
  const auto kids = decompose_one(X, seg, r);
  REQUIRE(kids.size() == 6);

  // Monte-Carlo partition check: a sample of X strictly inside the removed
  // region (the tube over its time band) lies in no child; a sample strictly
  // inside a child lies in exactly that one child and not in the tube.
  const HPoly tube = segment_tube(seg, r);
  std::mt19937_64 rng(20240817u);
  const double tol = 1e-7;
  int in_tube = 0, in_child = 0;
  for (int i = 0; i < 10000; ++i) {
    const Vec q = v3(uniform_real(rng, 0.0, 10.0), uniform_real(rng, 0.0, 10.0),
                     uniform_real(rng, 0.0, 50.0));
    REQUIRE(X.contains(q));
    const int cs = strict_count(kids, q, tol);
    const bool ts = tube.contains(q, -tol);
    CHECK(cs <= 1);
    CHECK_FALSE((cs >= 1 && ts));
    // Conservation: everything is covered by children or the tube band.
    CHECK(loose_count(kids, q, tol) + (tube.contains(q, tol) ? 1 : 0) >= 1);
    in_tube += ts ? 1 : 0;
    in_child += cs;
  }
  CHECK(in_tube > 0);    // samples did probe the removed region
  CHECK(in_child > 9000);  // and the bulk of the set lies in the children

  // Children are nonempty, bounded subsets of X.
  for (const auto& k : kids) {
    CHECK_FALSE(k.is_empty());
    CHECK_NOTHROW(k.bounding_box());
    const auto ball = k.chebyshev();
    CHECK(X.contains(ball.center, 1e-7));
  }
}

TEST_CASE("ecd: decompose_one keeps zero-duration end bands as facets") {
  // The set's time extent equals the segment's span, so the below/above bands
  // collapse to the two time facets; they are kept as (measure-zero) sets.
  const HPoly X = extrude_time(spatial_box(0, 0, 10, 10), 10.0, 14.0);
  const Segment seg{{v2(2, 2), 10.0}, {v2(4, 2), 14.0}};
  const auto kids = decompose_one(X, seg, 0.5);
  REQUIRE(kids.size() == 6);
  int flat = 0;
  for (const auto& k : kids) {
    const auto [lo, hi] = k.bounding_box();
    if (hi[2] - lo[2] <= 1e-9) ++flat;
  }
  CHECK(flat == 2);
}

TEST_CASE("ecd: decompose_one with an oversized tube leaves only the end bands") {
  const HPoly X = extrude_time(spatial_box(0.4, 0.4, 0.6, 0.6), 0.0, 10.0);
  const Segment seg{{v2(0.5, 0.5), 2.0}, {v2(0.5, 0.5), 3.0}};
  const auto kids = decompose_one(X, seg, 0.5);  // tube shadow covers the set
  REQUIRE(kids.size() == 2);
  const auto [lo0, hi0] = kids[0].bounding_box();
  const auto [lo1, hi1] = kids[1].bounding_box();
  CHECK(hi0[2] <= 2.0 + 1e-9);
  CHECK(lo1[2] >= 3.0 - 1e-9);
}

TEST_CASE("ecd: decompose_one rejects degenerate input") {
  const HPoly X = extrude_time(spatial_box(0, 0, 1, 1), 0.0, 1.0);
  CHECK_THROWS_AS(decompose_one(X, Segment{{v2(0.5, 0.5), 1.0}, {v2(0.5, 0.5), 1.0}}, 0.1),
                  InputError);
  CHECK_THROWS_AS(decompose_one(X, Segment{{v2(0.5, 0.5), 0.0}, {v2(0.5, 0.5), 1.0}}, 0.0),
                  InputError);
}

TEST_CASE("ecd: reserving a stationary robot carves the column out") {
  const auto g = build_graph({spatial_box(0, 0, 10, 10)}, 50.0);
  Reservation res;
  res.trajectory = make_traj({{{5, 5}, 0.0}});
  res.tube_apothem = 0.5;
  const auto g2 = reserve(g, res);

  // Four slices around the column plus the two (degenerate) time facets.
  CHECK(g2.num_vertices() == 6);

  // No remaining set meets the open tube: probe strictly inside the column.
  const Vec inside = v3(5.0, 5.0, 25.0);
  for (const auto& [id, set] : g2.vertices()) CHECK_FALSE(set.contains(inside, -1e-7));
  // Points just outside the column stay covered.
  int covering = 0;
  for (const auto& [id, set] : g2.vertices())
    if (set.contains(v3(4.4, 5.0, 25.0), 1e-9)) ++covering;
  CHECK(covering >= 1);
}

TEST_CASE("ecd: reserving the same trajectory twice is a no-op") {
  const auto g = build_graph({spatial_box(0, 0, 6, 2)}, 20.0);
  Reservation res;
  res.trajectory = make_traj({{{0.5, 0.5}, 0.0}, {{5.5, 0.5}, 5.0}});
  res.tube_apothem = 0.5;
  const auto g1 = reserve(g, res);
  const auto g2 = reserve(g1, res);

  REQUIRE(g2.num_vertices() == g1.num_vertices());
  REQUIRE(g2.num_edges() == g1.num_edges());
  REQUIRE(g2.edges() == g1.edges());
  for (const auto& [id, set] : g1.vertices()) {
    const HPoly& other = g2.vertex(id);
    REQUIRE(other.rows() == set.rows());
    CHECK((other.A() - set.A()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((other.b() - set.b()).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("ecd: reserve rejects trajectories that leave the free space") {
  const auto g = build_graph({spatial_box(0, 0, 10, 10)}, 50.0);
  Reservation res;
  res.trajectory = make_traj({{{5, 5}, 0.0}, {{15, 5}, 10.0}});
  res.tube_apothem = 0.5;
  CHECK_THROWS_AS(reserve(g, res), CoverageError);
}

TEST_CASE("ecd: graph edges remain sound and complete after reserve") {
  const auto g = build_graph({spatial_box(0, 0, 6, 2)}, 20.0);
  Reservation res;
  res.trajectory = make_traj({{{0.5, 0.5}, 0.0}, {{5.5, 0.5}, 5.0}});
  res.tube_apothem = 0.5;
  const auto g2 = reserve(g, res);

  std::vector<VertexId> ids;
  for (const auto& [id, _] : g2.vertices()) ids.push_back(id);
  for (std::size_t i = 0; i < ids.size(); ++i)
    for (std::size_t j = i + 1; j < ids.size(); ++j) {
      const bool overlap =
          !g2.vertex(ids[i]).intersected(g2.vertex(ids[j])).is_empty();
      CHECK(g2.has_edge(ids[i], ids[j]) == overlap);
    }
}

TEST_CASE("ecd: a second robot planned after a reservation keeps its distance") {
  // Head-on pair in a two-lane corridor; the first robot's straight line is
  // reserved, the second must dodge through the upper lane.
  const auto g = build_graph({spatial_box(0, 0, 6, 2)}, 40.0);
  const VelocityBounds vb = VelocityBounds::uniform(2, 1.0);
  const double r = 0.5;

  SolveParams params;
  params.rng_seed = 7;
  const auto plan1 = solve_stgcs(g, State{v2(0.5, 0.5), 0.0}, v2(5.5, 0.5), vb, params);
  REQUIRE(plan1.ok());
  CHECK(plan1.cost == Catch::Approx(5.0).margin(1e-5));

  const auto g2 = reserve(g, Reservation{plan1.trajectory, r});
  const auto plan2 = solve_stgcs(g2, State{v2(5.5, 0.5), 0.0}, v2(0.5, 0.5), vb, params);
  REQUIRE(plan2.ok());
  CHECK(plan2.cost > 5.0);  // forced detour or wait

  // Dense sampling: the pair never gets closer than r in the max norm.
  double min_sep = std::numeric_limits<double>::infinity();
  for (double t = 0.0; t <= 40.0 + 1e-9; t += 1e-3) {
    const Vec d = plan1.trajectory.position_at(t) - plan2.trajectory.position_at(t);
    min_sep = std::min(min_sep, d.cwiseAbs().maxCoeff());
  }
  CHECK(min_sep >= r - 1e-6);
}
