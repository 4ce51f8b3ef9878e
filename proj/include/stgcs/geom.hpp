#pragma once

// H-representation polyhedral kernel: containment, emptiness (Chebyshev-radius
// LP), intersection, time extrusion, trajectory tubes, segment clipping and
// bounding boxes. All boundary comparisons are inclusive with tol = 1e-9; sets
// produced by decomposition intentionally share faces, and closed halfspaces
// keep graphs connected across them.

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "common.hpp"
#include "lp.hpp"

namespace stgcs {

// A single halfspace a.x <= b.
struct Halfspace {
  Vec a;
  double b = 0.0;
};

// The complementary closed halfspace a.x >= b, as an (a', b') row with
// a'.x <= b'. interior(outside(s)) never meets {x | a.x <= b}.
inline Halfspace outside(const Halfspace& s) { return {-s.a, -s.b}; }

class HPoly {
 public:
  HPoly() = default;

  // Whole space of the given dimension (no rows).
  explicit HPoly(int dim) : dim_(dim), A_(0, dim), b_(0) {
    if (dim <= 0) throw DimensionError("HPoly: dimension must be positive");
  }

  // Rows are rescaled to unit inf-norm so tolerance semantics stay uniform.
  // Vacuous zero rows (0 <= b, b >= 0) are dropped; contradictory zero rows
  // are canonicalized to 0 <= -1, making the set empty by construction.
  HPoly(const Mat& A, const Vec& b) : dim_(static_cast<int>(A.cols())) {
    if (A.rows() != b.size()) throw DimensionError("HPoly: A/b row mismatch");
    if (dim_ <= 0) throw DimensionError("HPoly: dimension must be positive");
    std::vector<std::pair<Vec, double>> rows;
    rows.reserve(static_cast<std::size_t>(A.rows()));
    bool contradiction = false;
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
      if (!A.row(i).allFinite() || !std::isfinite(b[i]))
        throw InputError("HPoly: non-finite row");
      const double m = A.row(i).cwiseAbs().maxCoeff();
      if (m < 1e-13) {
        if (b[i] < -kTol) contradiction = true;
        continue;
      }
      rows.emplace_back(A.row(i).transpose() / m, b[i] / m);
    }
    if (contradiction) rows.emplace_back(Vec::Zero(dim_), -1.0);
    A_.resize(static_cast<Eigen::Index>(rows.size()), dim_);
    b_.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      A_.row(static_cast<Eigen::Index>(i)) = rows[i].first.transpose();
      b_[static_cast<Eigen::Index>(i)] = rows[i].second;
    }
  }

  static HPoly box(const Vec& lo, const Vec& hi) {
    if (lo.size() != hi.size()) throw DimensionError("HPoly::box: lo/hi mismatch");
    const int d = static_cast<int>(lo.size());
    Mat A(2 * d, d);
    Vec b(2 * d);
    A.setZero();
    for (int k = 0; k < d; ++k) {
      A(2 * k, k) = 1.0;
      b[2 * k] = hi[k];
      A(2 * k + 1, k) = -1.0;
      b[2 * k + 1] = -lo[k];
    }
    return HPoly(A, b);
  }

  int dim() const { return dim_; }
  int rows() const { return static_cast<int>(A_.rows()); }
  const Mat& A() const { return A_; }
  const Vec& b() const { return b_; }

  bool contains(const Vec& x, double tol = kTol) const {
    if (x.size() != dim_) throw DimensionError("HPoly::contains: dimension mismatch");
    for (Eigen::Index i = 0; i < A_.rows(); ++i)
      if (A_.row(i).dot(x) > b_[i] + tol) return false;
    return true;
  }

  HPoly intersected(const HPoly& o) const {
    if (o.dim_ != dim_) throw DimensionError("HPoly::intersected: dimension mismatch");
    Mat A(A_.rows() + o.A_.rows(), dim_);
    Vec b(b_.size() + o.b_.size());
    A << A_, o.A_;
    b << b_, o.b_;
    return HPoly(A, b);
  }

  HPoly with_halfspace(const Halfspace& h) const {
    if (h.a.size() != dim_) throw DimensionError("HPoly::with_halfspace: dimension mismatch");
    Mat A(A_.rows() + 1, dim_);
    Vec b(b_.size() + 1);
    A << A_, h.a.transpose();
    b << b_, h.b;
    return HPoly(A, b);
  }

  struct Ball {
    double radius = -std::numeric_limits<double>::infinity();
    Vec center;
  };

  // Largest inscribed inf...2-norm ball: maximize r subject to
  // a_i.c + ||a_i||_2 r <= b_i, capped so the LP stays bounded. The sign of
  // the optimal radius decides emptiness; the center doubles as a witness.
  Ball chebyshev() const {
    if (rows() == 0) {
      Ball ball;
      ball.radius = kChebCap;
      ball.center = Vec::Zero(dim_);
      return ball;
    }
    lp::Problem prob(dim_ + 1);
    prob.set_cost(dim_, -1.0);
    std::vector<int> cols(dim_ + 1);
    std::vector<double> vals(dim_ + 1);
    for (int j = 0; j <= dim_; ++j) cols[j] = j;
    for (int i = 0; i < rows(); ++i) {
      for (int j = 0; j < dim_; ++j) vals[j] = A_(i, j);
      vals[dim_] = A_.row(i).norm();
      prob.add_ineq(cols, vals, b_[i]);
    }
    prob.add_ineq({dim_}, {1.0}, kChebCap);
    for (int j = 0; j < dim_; ++j) prob.add_box(j, -kCoordCap, kCoordCap);
    // Sets assembled from repeated intersections carry duplicate and
    // near-parallel rows, which caps the attainable LP accuracy in double
    // precision near 1e-6; the radius feeds comparisons against kTol on
    // unit-scale geometry, so that accuracy is ample.
    lp::Settings settings;
    settings.accept_tol = 1e-6;
    auto sol = lp::solve(prob, settings);
    if (sol.status == lp::Status::kInfeasible) return Ball{};
    if (!sol.ok()) throw SolverError("chebyshev: LP did not converge");
    Ball ball;
    ball.radius = sol.x[dim_];
    ball.center = sol.x.head(dim_);
    return ball;
  }

  // Empty iff even a ball of (tiny) negative radius cannot be centered
  // inside; measure-zero sets (radius ~ 0) count as nonempty.
  bool is_empty() const { return chebyshev().radius < -kTol; }

  // Tight axis-aligned bounds via 2*dim LPs.
  std::pair<Vec, Vec> bounding_box() const {
    Vec lo(dim_), hi(dim_);
    for (int j = 0; j < dim_; ++j) {
      for (int sense = 0; sense < 2; ++sense) {
        lp::Problem prob(dim_);
        prob.set_cost(j, sense == 0 ? 1.0 : -1.0);
        add_rows_to(prob, 0);
        auto sol = lp::solve(prob);
        if (sol.status == lp::Status::kUnbounded)
          throw UnboundedSetError("bounding_box: set unbounded in a coordinate");
        if (sol.status == lp::Status::kInfeasible)
          throw InputError("bounding_box: empty set");
        if (!sol.ok()) throw SolverError("bounding_box: LP did not converge");
        if (sense == 0)
          lo[j] = sol.obj;
        else
          hi[j] = -sol.obj;
      }
    }
    return {lo, hi};
  }

  // Optional normalization: drop rows the remaining rows already imply.
  // Duplicated/dominated rows (same normal, equal-or-looser bound) go first;
  // a surviving row is then removed only when its LP-maximal value stays
  // strictly below b (margin 1e-9), so the represented set never changes.
  HPoly without_redundant_rows() const {
    std::vector<bool> keep(static_cast<std::size_t>(rows()), true);
    for (int i = 0; i < rows(); ++i) {
      for (int j = 0; j < i && keep[static_cast<std::size_t>(i)]; ++j) {
        if (!keep[static_cast<std::size_t>(j)]) continue;
        if ((A_.row(i) - A_.row(j)).cwiseAbs().maxCoeff() <= 1e-12 &&
            b_[j] <= b_[i] + 1e-12)
          keep[static_cast<std::size_t>(i)] = false;
      }
    }
    for (int i = 0; i < rows(); ++i) {
      if (!keep[static_cast<std::size_t>(i)]) continue;
      lp::Problem prob(dim_);
      for (int j = 0; j < dim_; ++j) prob.set_cost(j, -A_(i, j));
      for (int k = 0; k < rows(); ++k) {
        if (k == i) continue;
        if (!keep[static_cast<std::size_t>(k)]) continue;
        add_row_to(prob, k, 0);
      }
      add_row_relaxed(prob, i, 1.0);
      for (int j = 0; j < dim_; ++j) prob.add_box(j, -kCoordCap, kCoordCap);
      auto sol = lp::solve(prob);
      if (!sol.ok()) continue;  // keep the row when in doubt
      if (-sol.obj <= b_[i] - 1e-9) keep[static_cast<std::size_t>(i)] = false;
    }
    int kept = 0;
    for (bool k : keep) kept += k ? 1 : 0;
    Mat A(kept, dim_);
    Vec b(kept);
    int w = 0;
    for (int i = 0; i < rows(); ++i) {
      if (!keep[static_cast<std::size_t>(i)]) continue;
      A.row(w) = A_.row(i);
      b[w] = b_[i];
      ++w;
    }
    return HPoly(A, b);
  }

  static constexpr double kChebCap = 1e6;
  static constexpr double kCoordCap = 1e6;

 private:
  void add_rows_to(lp::Problem& prob, int col_offset) const {
    for (int i = 0; i < rows(); ++i) add_row_to(prob, i, col_offset);
  }
  void add_row_to(lp::Problem& prob, int i, int col_offset) const {
    std::vector<int> cols;
    std::vector<double> vals;
    for (int j = 0; j < dim_; ++j) {
      if (A_(i, j) != 0.0) {
        cols.push_back(col_offset + j);
        vals.push_back(A_(i, j));
      }
    }
    prob.add_ineq(cols, vals, b_[i]);
  }
  void add_row_relaxed(lp::Problem& prob, int i, double slack) const {
    std::vector<int> cols;
    std::vector<double> vals;
    for (int j = 0; j < dim_; ++j) {
      if (A_(i, j) != 0.0) {
        cols.push_back(j);
        vals.push_back(A_(i, j));
      }
    }
    prob.add_ineq(cols, vals, b_[i] + slack);
  }

  int dim_ = 0;
  Mat A_;
  Vec b_;
};

// ---------------------------------------------------------------------------
// Free-function forms of the kernel operations.

inline bool contains(const HPoly& P, const Vec& x, double tol = kTol) {
  return P.contains(x, tol);
}

inline bool is_empty(const HPoly& P) { return P.is_empty(); }

inline HPoly intersect(const HPoly& P, const HPoly& Q) { return P.intersected(Q); }

// Extrude a spatial set along time: {(p,t) | p in S, t0 <= t <= t1}.
inline HPoly extrude_time(const HPoly& S, double t0, double t1) {
  if (t0 >= t1) throw InputError("extrude_time: t0 must be < t1");
  const int d = S.dim();
  Mat A(S.rows() + 2, d + 1);
  Vec b(S.rows() + 2);
  A.setZero();
  A.block(0, 0, S.rows(), d) = S.A();
  b.head(S.rows()) = S.b();
  A(S.rows(), d) = 1.0;
  b[S.rows()] = t1;
  A(S.rows() + 1, d) = -1.0;
  b[S.rows() + 1] = -t0;
  return HPoly(A, b);
}

// Sheared prism swept by the inf-norm square of apothem r moving along a
// space-time segment: two time faces plus, per spatial dimension k and sign s,
// the side face s*(p_k - v_k t) <= s*(x.p_k - v_k x.t) + r with
// v = (y.p - x.p) / (y.t - x.t).
inline HPoly segment_tube(const Segment& seg, double r) {
  const double dur = seg.y.t - seg.x.t;
  if (dur <= 0.0) throw InputError("segment_tube: degenerate segment");
  if (r <= 0.0) throw InputError("segment_tube: apothem must be positive");
  if (seg.x.p.size() != seg.y.p.size())
    throw DimensionError("segment_tube: endpoint dimension mismatch");
  const int d = static_cast<int>(seg.x.p.size());
  const Vec v = (seg.y.p - seg.x.p) / dur;
  Mat A(2 + 2 * d, d + 1);
  Vec b(2 + 2 * d);
  A.setZero();
  A(0, d) = 1.0;
  b[0] = seg.y.t;  // t <= y.t
  A(1, d) = -1.0;
  b[1] = -seg.x.t;  // t >= x.t
  int row = 2;
  for (int k = 0; k < d; ++k) {
    for (double sgn : {1.0, -1.0}) {
      A(row, k) = sgn;
      A(row, d) = -sgn * v[k];
      b[row] = sgn * (seg.x.p[k] - v[k] * seg.x.t) + r;
      ++row;
    }
  }
  return HPoly(A, b);
}

// The 2d shear faces of a tube (every row whose normal has a spatial
// component); excludes the two pure time faces.
inline std::vector<Halfspace> side_faces(const HPoly& tube) {
  std::vector<Halfspace> faces;
  const int d = tube.dim() - 1;
  for (int i = 0; i < tube.rows(); ++i) {
    if (tube.A().row(i).head(d).cwiseAbs().maxCoeff() > 1e-12)
      faces.push_back({tube.A().row(i).transpose(), tube.b()[i]});
  }
  return faces;
}

// Maximal parametric sub-segment of seg inside P, or nothing.
inline std::optional<Segment> clip_segment(const Segment& seg, const HPoly& P) {
  const int d = static_cast<int>(seg.x.p.size());
  if (P.dim() != d + 1) throw DimensionError("clip_segment: dimension mismatch");
  Vec ex(d + 1), ey(d + 1);
  ex << seg.x.p, seg.x.t;
  ey << seg.y.p, seg.y.t;
  const Vec dir = ey - ex;
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < P.rows(); ++i) {
    const double g = P.A().row(i).dot(dir);
    const double c0 = P.A().row(i).dot(ex) - P.b()[i];
    if (std::abs(g) < 1e-12) {
      if (c0 > kTol) return std::nullopt;
      continue;
    }
    const double s = -c0 / g;
    if (g > 0.0)
      hi = std::min(hi, s);
    else
      lo = std::max(lo, s);
  }
  if (lo > hi + 1e-12) return std::nullopt;
  lo = std::max(0.0, lo);
  hi = std::min(1.0, hi);
  if (lo > hi) return std::nullopt;
  auto at = [&](double s) {
    const Vec q = ex + s * dir;
    return State(q.head(d), q[d]);
  };
  return Segment(at(lo), at(hi));
}

inline std::pair<Vec, Vec> bounding_box(const HPoly& P) { return P.bounding_box(); }

inline HPoly remove_redundant(const HPoly& P) { return P.without_redundant_rows(); }

}  // namespace stgcs
