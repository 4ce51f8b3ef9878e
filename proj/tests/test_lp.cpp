#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "stgcs/lp.hpp"

using namespace stgcs;

TEST_CASE("lp: bounded box maximization") {
  lp::Problem p(2);
  p.set_cost(0, -1.0);
  p.set_cost(1, -1.0);
  p.add_box(0, 0.0, 1.0);
  p.add_box(1, 0.0, 2.0);
  auto sol = lp::solve(p);
  REQUIRE(sol.ok());
  CHECK(sol.obj == Catch::Approx(-3.0).margin(1e-8));
  CHECK(sol.x[0] == Catch::Approx(1.0).margin(1e-7));
  CHECK(sol.x[1] == Catch::Approx(2.0).margin(1e-7));
}

TEST_CASE("lp: equality plus bounds, unique vertex optimum") {
  // min x  s.t.  x + y = 1,  0 <= x,y <= 5   ->  (0, 1)
  lp::Problem p(2);
  p.set_cost(0, 1.0);
  p.add_eq({0, 1}, {1.0, 1.0}, 1.0);
  p.add_box(0, 0.0, 5.0);
  p.add_box(1, 0.0, 5.0);
  auto sol = lp::solve(p);
  REQUIRE(sol.ok());
  CHECK(sol.obj == Catch::Approx(0.0).margin(1e-8));
  CHECK(sol.x[0] == Catch::Approx(0.0).margin(1e-7));
  CHECK(sol.x[1] == Catch::Approx(1.0).margin(1e-7));
}

TEST_CASE("lp: infeasible system yields a Farkas certificate") {
  // x <= 0 and x >= 1 cannot hold together.
  lp::Problem p(1);
  p.add_ineq({0}, {1.0}, 0.0);
  p.add_ineq({0}, {-1.0}, -1.0);
  auto sol = lp::solve(p);
  REQUIRE(sol.status == lp::Status::kInfeasible);
  // Certificate: z >= 0, G'z ~ 0, h'z < 0.
  REQUIRE(sol.z.size() == 2);
  CHECK(sol.z.minCoeff() >= -1e-9);
  const double gz = sol.z[0] * 1.0 + sol.z[1] * (-1.0);
  const double hz = sol.z[0] * 0.0 + sol.z[1] * (-1.0);
  CHECK(std::abs(gz) <= 1e-6);
  CHECK(hz < -1e-8);
}

TEST_CASE("lp: unbounded below yields an improving ray") {
  lp::Problem p(2);
  p.set_cost(0, -1.0);
  p.add_ineq({0}, {-1.0}, 0.0);  // x >= 0
  p.add_box(1, 0.0, 1.0);
  auto sol = lp::solve(p);
  REQUIRE(sol.status == lp::Status::kUnbounded);
  CHECK(sol.x[0] > 1e-3);  // ray moves x up, objective down
}

TEST_CASE("lp: largest inscribed ball of the unit square") {
  // Variables (cx, cy, r); rows a'c + r <= b for unit-norm faces.
  lp::Problem p(3);
  p.set_cost(2, -1.0);
  p.add_ineq({0, 2}, {1.0, 1.0}, 1.0);
  p.add_ineq({0, 2}, {-1.0, 1.0}, 0.0);
  p.add_ineq({1, 2}, {1.0, 1.0}, 1.0);
  p.add_ineq({1, 2}, {-1.0, 1.0}, 0.0);
  auto sol = lp::solve(p);
  REQUIRE(sol.ok());
  CHECK(sol.obj == Catch::Approx(-0.5).margin(1e-8));
  CHECK(sol.x[0] == Catch::Approx(0.5).margin(1e-7));
  CHECK(sol.x[1] == Catch::Approx(0.5).margin(1e-7));
  CHECK(sol.x[2] == Catch::Approx(0.5).margin(1e-7));
}

TEST_CASE("lp: vacuous and contradictory zero rows") {
  {
    lp::Problem p(1);
    p.set_cost(0, 1.0);
    p.add_ineq({}, {}, 1.0);  // 0 <= 1: vacuous
    p.add_box(0, -2.0, 2.0);
    auto sol = lp::solve(p);
    REQUIRE(sol.ok());
    CHECK(sol.x[0] == Catch::Approx(-2.0).margin(1e-7));
  }
  {
    lp::Problem p(1);
    p.add_ineq({}, {}, -1.0);  // 0 <= -1: impossible
    auto sol = lp::solve(p);
    REQUIRE(sol.status == lp::Status::kInfeasible);
  }
  {
    lp::Problem p(1);
    p.add_eq({}, {}, 0.5);  // 0 == 0.5: impossible
    auto sol = lp::solve(p);
    REQUIRE(sol.status == lp::Status::kInfeasible);
  }
}

TEST_CASE("lp: equalities only (no natural inequality rows)") {
  lp::Problem p(2);
  p.add_eq({0, 1}, {1.0, 1.0}, 2.0);
  p.add_eq({0, 1}, {1.0, -1.0}, 0.0);
  auto sol = lp::solve(p);
  REQUIRE(sol.ok());
  CHECK(sol.x[0] == Catch::Approx(1.0).margin(1e-6));
  CHECK(sol.x[1] == Catch::Approx(1.0).margin(1e-6));
}

TEST_CASE("lp: badly scaled rows are equilibrated") {
  lp::Problem p(2);
  p.set_cost(0, -1.0);
  p.set_cost(1, -1.0);
  p.add_ineq({0}, {1e6}, 1e6);     // x <= 1
  p.add_ineq({0}, {-1e-6}, 0.0);   // x >= 0
  p.add_ineq({1}, {1e-6}, 2e-6);   // y <= 2
  p.add_ineq({1}, {-1e6}, 0.0);    // y >= 0
  auto sol = lp::solve(p);
  REQUIRE(sol.ok());
  CHECK(sol.x[0] == Catch::Approx(1.0).margin(1e-6));
  CHECK(sol.x[1] == Catch::Approx(2.0).margin(1e-6));
}

TEST_CASE("lp: equality with inequality and known duals") {
  // min -x1 - 2 x2  s.t.  x1 + x2 = 1, x >= 0   ->  (0, 1), obj -2
  lp::Problem p(2);
  p.set_cost(0, -1.0);
  p.set_cost(1, -2.0);
  p.add_eq({0, 1}, {1.0, 1.0}, 1.0);
  p.add_ineq({0}, {-1.0}, 0.0);
  p.add_ineq({1}, {-1.0}, 0.0);
  auto sol = lp::solve(p);
  REQUIRE(sol.ok());
  CHECK(sol.obj == Catch::Approx(-2.0).margin(1e-8));
  CHECK(sol.x[0] == Catch::Approx(0.0).margin(1e-7));
  CHECK(sol.x[1] == Catch::Approx(1.0).margin(1e-7));
}

TEST_CASE("lp: random box programs satisfy strong duality") {
  std::mt19937_64 rng(20260814ull);
  for (int rep = 0; rep < 20; ++rep) {
    const int n = 5 + static_cast<int>(uniform_index(rng, 46));
    lp::Problem p(n);
    Vec lo(n), hi(n), c(n);
    for (int i = 0; i < n; ++i) {
      lo[i] = uniform_real(rng, -10.0, 0.0);
      hi[i] = lo[i] + uniform_real(rng, 0.1, 20.0);
      c[i] = uniform_real(rng, -5.0, 5.0);
      p.set_cost(i, c[i]);
      p.add_box(i, lo[i], hi[i]);
    }
    auto sol = lp::solve(p);
    REQUIRE(sol.ok());
    double expect = 0.0;
    for (int i = 0; i < n; ++i) expect += c[i] >= 0 ? c[i] * lo[i] : c[i] * hi[i];
    CHECK(sol.obj == Catch::Approx(expect).margin(1e-6 * (1.0 + std::abs(expect))));
    // Dual feasibility: c + G'z = 0 with z >= 0 (rows are +/- e_i).
    CHECK(sol.z.minCoeff() >= -1e-8);
    for (int i = 0; i < n; ++i) {
      const double gd = c[i] + sol.z[2 * i] - sol.z[2 * i + 1];
      CHECK(std::abs(gd) <= 1e-6);
    }
  }
}

TEST_CASE("lp: degenerate duplicated rows") {
  lp::Problem p(2);
  p.set_cost(0, -1.0);
  for (int k = 0; k < 8; ++k) p.add_ineq({0, 1}, {1.0, 1.0}, 2.0);
  p.add_box(0, 0.0, 10.0);
  p.add_box(1, 0.0, 1.0);
  auto sol = lp::solve(p);
  REQUIRE(sol.ok());
  CHECK(sol.obj == Catch::Approx(-2.0).margin(1e-7));
  CHECK(sol.x[0] == Catch::Approx(2.0).margin(1e-6));
}
