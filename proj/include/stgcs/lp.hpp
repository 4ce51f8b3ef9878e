#pragma once

// Sparse primal-dual interior point solver for linear programs of the form
//
//   minimize    c'x
//   subject to  G x <= h        (m inequality rows)
//               A x  = b        (p equality rows)
//
// Mehrotra predictor-corrector iteration on the regularized augmented system
//
//   [ G' diag(z/s) G + dp*I   A' ] [dx]   [q1]
//   [ A                      -dd*I] [dy] = [q2]
//
// factored with a sparse LDLT. The constraint matrix is Ruiz-equilibrated
// (alternating row/column rescaling toward unit inf-norm) before solving;
// dual/primal rays are detected and reported as infeasibility or
// unboundedness certificates. Accuracy is pushed to ~1e-10 in relative
// primal/dual residuals and complementarity gap, with a soft acceptance
// fallback for ill-conditioned instances.

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <vector>

#include "common.hpp"

namespace stgcs::lp {

enum class Status {
  kOptimal,
  kInfeasible,       // primal infeasible; (z, y) holds a Farkas certificate
  kUnbounded,        // primal unbounded; x holds an improving ray
  kNumericalFailure,
};

struct Solution {
  Status status = Status::kNumericalFailure;
  Vec x;  // primal point (optimal) or improving ray (unbounded)
  Vec z;  // inequality duals, >= 0; Farkas certificate when infeasible
  Vec y;  // equality duals; Farkas certificate when infeasible
  double obj = std::numeric_limits<double>::quiet_NaN();
  // Dual objective at the returned iterate. The dual point is feasible up to
  // the dual residual tolerance, so this is a certified lower bound on the
  // optimum even when the solve stops at the soft acceptance threshold.
  double obj_dual = std::numeric_limits<double>::quiet_NaN();
  int iterations = 0;

  bool ok() const { return status == Status::kOptimal; }
};

struct Settings {
  double tol = 1e-10;         // target relative accuracy
  double accept_tol = 1e-7;   // fall-back accuracy before declaring failure
  double accept_gap = -1.0;   // fall-back relative duality gap; < 0 means
                              // "same as accept_tol". Callers that only need
                              // a certified dual bound and near-feasible
                              // iterates can leave residual accuracy tight
                              // while tolerating a loose gap.
  int max_iter = 100;
  bool verbose = false;       // per-iteration convergence trace on stderr
};

class Problem {
 public:
  explicit Problem(int nvars) : n_(nvars), c_(Vec::Zero(nvars)) {
    if (nvars <= 0) throw DimensionError("lp::Problem: nvars must be positive");
  }

  int nvars() const { return n_; }
  int num_ineq() const { return static_cast<int>(ineq_rhs_.size()); }
  int num_eq() const { return static_cast<int>(eq_rhs_.size()); }

  void set_cost(int var, double coef) { c_[check_var(var)] = coef; }
  void add_cost(int var, double coef) { c_[check_var(var)] += coef; }
  const Vec& cost() const { return c_; }

  // sum_k vals[k] * x[cols[k]] <= rhs
  void add_ineq(const std::vector<int>& cols, const std::vector<double>& vals,
                double rhs) {
    append_row(ineq_cols_, ineq_vals_, ineq_starts_, cols, vals);
    ineq_rhs_.push_back(rhs);
  }

  // sum_k vals[k] * x[cols[k]] == rhs
  void add_eq(const std::vector<int>& cols, const std::vector<double>& vals,
              double rhs) {
    append_row(eq_cols_, eq_vals_, eq_starts_, cols, vals);
    eq_rhs_.push_back(rhs);
  }

  // lo <= x[var] <= hi as two inequality rows.
  void add_box(int var, double lo, double hi) {
    add_ineq({var}, {1.0}, hi);
    add_ineq({var}, {-1.0}, lo == 0.0 ? 0.0 : -lo);
  }

  friend Solution solve(const Problem& prob, const Settings& settings);

 private:
  int check_var(int var) const {
    if (var < 0 || var >= n_) throw DimensionError("lp::Problem: bad variable index");
    return var;
  }

  void append_row(std::vector<int>& cols, std::vector<double>& vals,
                  std::vector<std::size_t>& starts, const std::vector<int>& rcols,
                  const std::vector<double>& rvals) {
    if (rcols.size() != rvals.size())
      throw DimensionError("lp::Problem: cols/vals length mismatch");
    if (starts.empty()) starts.push_back(0);
    for (std::size_t k = 0; k < rcols.size(); ++k) {
      check_var(rcols[k]);
      cols.push_back(rcols[k]);
      vals.push_back(rvals[k]);
    }
    starts.push_back(cols.size());
  }

  int n_;
  Vec c_;
  std::vector<int> ineq_cols_, eq_cols_;
  std::vector<double> ineq_vals_, eq_vals_;
  std::vector<std::size_t> ineq_starts_, eq_starts_;  // CSR row starts
  std::vector<double> ineq_rhs_, eq_rhs_;
};

namespace detail {

using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

inline double steplen(const Vec& v, const Vec& dv) {
  double a = 1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (dv[i] < 0.0) a = std::min(a, -v[i] / dv[i]);
  return a;
}

}  // namespace detail

inline Solution solve(const Problem& prob, const Settings& settings = {}) {
  using detail::SpMat;
  const int n = prob.n_;
  const int m_orig = prob.num_ineq();
  const int p_orig = prob.num_eq();

  Solution out;
  out.x = Vec::Zero(n);
  out.z = Vec::Zero(m_orig);
  out.y = Vec::Zero(p_orig);

  // --- Row equilibration; zero rows resolved immediately. -------------------
  std::vector<detail::Triplet> gt, at;
  std::vector<double> h_v, b_v;
  std::vector<double> g_scale, a_scale;   // normalized row = original / scale
  std::vector<int> g_src, a_src;          // original row index per kept row

  for (int r = 0; r < m_orig; ++r) {
    const std::size_t s = prob.ineq_starts_[r], e = prob.ineq_starts_[r + 1];
    double mx = 0.0;
    for (std::size_t k = s; k < e; ++k) mx = std::max(mx, std::abs(prob.ineq_vals_[k]));
    if (mx < 1e-13) {
      if (prob.ineq_rhs_[r] < -1e-12) {
        // 0 <= h with h < 0: trivially infeasible, Farkas ray on this row.
        out.status = Status::kInfeasible;
        out.z[r] = 1.0;
        return out;
      }
      continue;  // vacuous row
    }
    const int nr = static_cast<int>(h_v.size());
    for (std::size_t k = s; k < e; ++k)
      gt.emplace_back(nr, prob.ineq_cols_[k], prob.ineq_vals_[k] / mx);
    h_v.push_back(prob.ineq_rhs_[r] / mx);
    g_scale.push_back(mx);
    g_src.push_back(r);
  }
  for (int r = 0; r < p_orig; ++r) {
    const std::size_t s = prob.eq_starts_.empty() ? 0 : prob.eq_starts_[r];
    const std::size_t e = prob.eq_starts_.empty() ? 0 : prob.eq_starts_[r + 1];
    double mx = 0.0;
    for (std::size_t k = s; k < e; ++k) mx = std::max(mx, std::abs(prob.eq_vals_[k]));
    if (mx < 1e-13) {
      if (std::abs(prob.eq_rhs_[r]) > 1e-12) {
        out.status = Status::kInfeasible;
        out.y[r] = prob.eq_rhs_[r] > 0 ? -1.0 : 1.0;
        return out;
      }
      continue;
    }
    const int nr = static_cast<int>(b_v.size());
    for (std::size_t k = s; k < e; ++k)
      at.emplace_back(nr, prob.eq_cols_[k], prob.eq_vals_[k] / mx);
    b_v.push_back(prob.eq_rhs_[r] / mx);
    a_scale.push_back(mx);
    a_src.push_back(r);
  }

  // Keep at least one inequality so the barrier machinery stays well-defined.
  bool dummy_row = false;
  if (h_v.empty()) {
    dummy_row = true;
    gt.emplace_back(0, 0, 1e-13);  // ~zero coefficient, generous rhs
    h_v.push_back(1.0);
    g_scale.push_back(1.0);
    g_src.push_back(-1);
  }

  const int m = static_cast<int>(h_v.size());
  const int p = static_cast<int>(b_v.size());

  SpMat G(m, n), A(p, n);
  G.setFromTriplets(gt.begin(), gt.end());
  if (p > 0) A.setFromTriplets(at.begin(), at.end());
  G.makeCompressed();
  A.makeCompressed();

  // Ruiz equilibration: alternately rescale rows and columns of the stacked
  // constraint matrix [G; A] toward unit inf-norm.  Mixed row/column scales
  // (tiny dwell rows against wide coordinate bounds) otherwise produce
  // scaling-matrix spreads that defeat the unpivoted factorization.
  Vec dr = Vec::Ones(m), da = Vec::Ones(p), dc = Vec::Ones(n);
  for (int pass = 0; pass < 10; ++pass) {
    Vec rmax = Vec::Zero(m), amax = Vec::Zero(p), cmax = Vec::Zero(n);
    for (int k = 0; k < G.outerSize(); ++k)
      for (SpMat::InnerIterator it(G, k); it; ++it) {
        const double v = std::abs(it.value());
        rmax[it.row()] = std::max(rmax[it.row()], v);
        cmax[it.col()] = std::max(cmax[it.col()], v);
      }
    for (int k = 0; k < A.outerSize(); ++k)
      for (SpMat::InnerIterator it(A, k); it; ++it) {
        const double v = std::abs(it.value());
        amax[it.row()] = std::max(amax[it.row()], v);
        cmax[it.col()] = std::max(cmax[it.col()], v);
      }
    double worst = 1.0;
    const auto track = [&worst](const Vec& v) {
      for (int i = 0; i < v.size(); ++i)
        if (v[i] > 0.0) worst = std::max({worst, v[i], 1.0 / v[i]});
    };
    track(rmax);
    track(amax);
    track(cmax);
    if (worst <= 4.0) break;
    const auto inv_sqrt = [](double v) { return v > 0.0 ? 1.0 / std::sqrt(v) : 1.0; };
    Vec sr = rmax.unaryExpr(inv_sqrt);
    const Vec sa = amax.unaryExpr(inv_sqrt);
    const Vec sc = cmax.unaryExpr(inv_sqrt);
    // The placeholder row's near-zero coefficient encodes a huge variable
    // bound; scaling it to unit size would poison the rhs magnitude.
    if (dummy_row) sr[0] = 1.0;
    G = sr.asDiagonal() * G * sc.asDiagonal();
    if (p > 0) A = sa.asDiagonal() * A * sc.asDiagonal();
    dr = dr.cwiseProduct(sr);
    da = da.cwiseProduct(sa);
    dc = dc.cwiseProduct(sc);
  }
  G.makeCompressed();
  A.makeCompressed();

  const Vec h = Eigen::Map<const Vec>(h_v.data(), m).cwiseProduct(dr);
  const Vec b = p > 0 ? Vec(Eigen::Map<const Vec>(b_v.data(), p).cwiseProduct(da)) : Vec(0);
  const Vec c = prob.c_.cwiseProduct(dc);
  const SpMat Gt = SpMat(G.transpose());
  const SpMat At = p > 0 ? SpMat(A.transpose()) : SpMat(n, 0);

  const double hn = 1.0 + (m > 0 ? h.cwiseAbs().maxCoeff() : 0.0);
  const double bn = 1.0 + (p > 0 ? b.cwiseAbs().maxCoeff() : 0.0);
  const double cn = 1.0 + (n > 0 ? c.cwiseAbs().maxCoeff() : 0.0);

  // --- Iterates. -------------------------------------------------------------
  Vec x = Vec::Zero(n), y = Vec::Zero(p);
  Vec s(m), z = Vec::Ones(m);
  for (int i = 0; i < m; ++i) s[i] = std::max(1.0, h[i]);

  auto finish = [&](Status st, const Vec& xx, const Vec& zz, const Vec& yy,
                    int iters) {
    out.status = st;
    out.x = dc.cwiseProduct(xx);
    out.iterations = iters;
    for (int i = 0; i < m; ++i)
      if (g_src[i] >= 0) out.z[g_src[i]] = zz[i] * dr[i] / g_scale[i];
    for (int i = 0; i < p; ++i) out.y[a_src[i]] = yy[i] * da[i] / a_scale[i];
    if (st == Status::kOptimal) {
      out.obj = prob.c_.dot(out.x);
      out.obj_dual = 0.0;
      if (m_orig > 0)
        out.obj_dual -=
            Eigen::Map<const Vec>(prob.ineq_rhs_.data(), m_orig).dot(out.z);
      if (p_orig > 0)
        out.obj_dual -= Eigen::Map<const Vec>(prob.eq_rhs_.data(), p_orig).dot(out.y);
    }
    return out;
  };

  Eigen::SimplicialLDLT<SpMat> ldlt;
  Eigen::SparseLU<SpMat> lu;
  bool analyzed = false;
  bool lu_analyzed = false;
  double delta = 1e-9;

  // The combined error compares the gap against its own (possibly looser)
  // budget by scaling it into accept_tol units, so one number drives both
  // the best-iterate tracking and the final acceptance test.
  const double accept_gap =
      settings.accept_gap < 0.0 ? settings.accept_tol : settings.accept_gap;
  const double gap_scale = settings.accept_tol / accept_gap;

  double best_err = std::numeric_limits<double>::infinity();
  Vec best_x = x, best_z = z, best_y = y;

  int iter = 0;
  for (; iter < settings.max_iter; ++iter) {
    const Vec gtz = Gt * z;
    const Vec aty = p > 0 ? Vec(At * y) : Vec(Vec::Zero(n));
    const Vec r_d = c + gtz + aty;
    const Vec r_g = G * x + s - h;
    const Vec r_a = p > 0 ? Vec(A * x - b) : Vec(0);
    const double mu = s.dot(z) / m;
    const double pobj = c.dot(x);
    const double dobj = -h.dot(z) - (p > 0 ? b.dot(y) : 0.0);

    // Scale the dual residual by the magnitude of the dual iterate's own
    // terms: on dual-degenerate problems the optimal multipliers can be
    // large, and only the relative cancellation error is meaningful.
    const double dn = std::max(
        {cn, n > 0 ? gtz.cwiseAbs().maxCoeff() : 0.0,
         n > 0 ? aty.cwiseAbs().maxCoeff() : 0.0});
    const double rd_n = r_d.cwiseAbs().maxCoeff();
    const double ra_n = p > 0 ? r_a.cwiseAbs().maxCoeff() : 0.0;
    const double pinf = std::max(r_g.cwiseAbs().maxCoeff() / hn, ra_n / bn);
    const double dinf = rd_n / dn;
    const double gap = s.dot(z) / (1.0 + std::abs(pobj) + std::abs(dobj));

    if (settings.verbose)
      std::fprintf(stderr,
                   "lp it %3d  mu %9.3e  pinf %9.3e  dinf %9.3e  gap %9.3e  delta %7.1e\n",
                   iter, mu, pinf, dinf, gap, delta);

    const double err = std::max({pinf, dinf, gap * gap_scale});
    if (err < best_err) {
      best_err = err;
      best_x = x;
      best_z = z;
      best_y = y;
    }
    if (err <= settings.tol) return finish(Status::kOptimal, x, z, y, iter);

    // Dual ray => primal infeasible. A scaled near-certificate of a feasible
    // problem can only violate by about res * |feasible point|, so a genuine
    // certificate must separate by a comfortable factor beyond that noise.
    const double beta =
        std::max(z.size() ? z.cwiseAbs().maxCoeff() : 0.0,
                 p > 0 ? y.cwiseAbs().maxCoeff() : 0.0);
    if (beta > 1e4) {
      const Vec zc = z / beta;
      const Vec yc = p > 0 ? Vec(y / beta) : Vec(0);
      const double res =
          (Gt * zc + (p > 0 ? Vec(At * yc) : Vec(Vec::Zero(n)))).cwiseAbs().maxCoeff();
      const double viol = h.dot(zc) + (p > 0 ? b.dot(yc) : 0.0);
      const double noise = res * (1.0 + x.cwiseAbs().sum());
      if (res <= 1e-9 && viol <= -std::max(1e-9, 10.0 * noise))
        return finish(Status::kInfeasible, x, zc, yc, iter);
    }
    // Primal ray => unbounded.
    const double gamma = x.size() ? x.cwiseAbs().maxCoeff() : 0.0;
    if (gamma > 1e7) {
      const Vec xc = x / gamma;
      const double ry = (G * xc).maxCoeff();
      const double ra = p > 0 ? (A * xc).cwiseAbs().maxCoeff() : 0.0;
      if (ry <= 1e-9 && ra <= 1e-9 && c.dot(xc) <= -1e-9)
        return finish(Status::kUnbounded, xc, z, y, iter);
    }

    // --- Assemble the augmented system (regularization added per attempt). ---
    Vec w(m);
    for (int i = 0; i < m; ++i) {
      double wi = z[i] / s[i];
      if (!std::isfinite(wi) || wi > 1e16) wi = 1e16;
      if (wi < 1e-16) wi = 1e-16;
      w[i] = wi;
    }
    SpMat H = SpMat(Gt * w.asDiagonal() * G);

    const int N = n + p;
    std::vector<detail::Triplet> mt;
    mt.reserve(H.nonZeros() + 2 * A.nonZeros() + N);
    for (int k = 0; k < H.outerSize(); ++k)
      for (SpMat::InnerIterator it(H, k); it; ++it)
        mt.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
    for (int k = 0; k < A.outerSize(); ++k)
      for (SpMat::InnerIterator it(A, k); it; ++it) {
        mt.emplace_back(n + static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
        mt.emplace_back(static_cast<int>(it.col()), n + static_cast<int>(it.row()), it.value());
      }
    const std::size_t base_nnz = mt.size();
    mt.resize(base_nnz + N);

    // Near convergence the scaled Hessian spans ~32 orders of magnitude; the
    // unpivoted LDLT can then fail outright or return directions that are
    // pure noise. Guard every solve with residual-checked refinement against
    // the unregularized system; when the LDLT direction is unusable, retry
    // the same system with a partial-pivoting LU before resorting to
    // stronger regularization (which trades dual accuracy for stability).
    bool stepped = false;
    for (; delta <= 1e-2 && !stepped; delta *= 100.0) {
      for (int i = 0; i < n; ++i) mt[base_nnz + i] = detail::Triplet(i, i, delta);
      for (int i = 0; i < p; ++i)
        mt[base_nnz + n + i] = detail::Triplet(n + i, n + i, -delta);
      SpMat M(N, N);
      M.setFromTriplets(mt.begin(), mt.end());
      M.makeCompressed();
      for (int method = 0; method < 2 && !stepped; ++method) {
        const bool use_lu = method == 1;
        if (use_lu) {
          if (!lu_analyzed) {
            lu.analyzePattern(M);
            lu_analyzed = true;
          }
          lu.factorize(M);
          if (lu.info() != Eigen::Success) {
            if (settings.verbose)
              std::fprintf(stderr, "lp it %3d  LU factorization failed, delta %7.1e\n", iter,
                           delta);
            continue;
          }
        } else {
          if (!analyzed) {
            ldlt.analyzePattern(M);
            analyzed = true;
          }
          ldlt.factorize(M);
          if (ldlt.info() != Eigen::Success) {
            if (settings.verbose)
              std::fprintf(stderr, "lp it %3d  factorization failed, delta %7.1e\n", iter, delta);
            continue;
          }
        }
        const auto solve_M = [&](const Vec& r) {
          return use_lu ? Vec(lu.solve(r)) : Vec(ldlt.solve(r));
        };

        auto kkt_solve = [&](const Vec& r_c_mod, Vec& dx, Vec& dy, Vec& ds, Vec& dz) {
          Vec rhs(N);
          Vec t(m);
          // Use the clipped w here as well: the recovery below divides by it,
          // so mixing in the exact z/s would leak the clipping error into the
          // dual row where the residual checks cannot see it.
          for (int i = 0; i < m; ++i) t[i] = w[i] * r_g[i] - r_c_mod[i] / s[i];
          rhs.head(n) = -r_d - Gt * t;
          if (p > 0) rhs.tail(p) = -r_a;
          Vec sol = solve_M(rhs);
          if (!sol.allFinite()) return false;
          // Refine against the unregularized system; apply a correction only
          // while it actually shrinks the residual.
          auto residual = [&](const Vec& v) {
            Vec res(N);
            res.head(n) = rhs.head(n) - H * v.head(n) -
                          (p > 0 ? Vec(At * v.tail(p)) : Vec(Vec::Zero(n)));
            if (p > 0) res.tail(p) = rhs.tail(p) - A * v.head(n);
            return res;
          };
          Vec res = residual(sol);
          double rn = res.cwiseAbs().maxCoeff();
          for (int ref = 0; ref < 4 && rn > 1e-13; ++ref) {
            const Vec cand = sol + solve_M(res);
            if (!cand.allFinite()) break;
            const Vec cres = residual(cand);
            const double crn = cres.cwiseAbs().maxCoeff();
            if (crn >= 0.9 * rn) break;
            sol = cand;
            res = cres;
            rn = crn;
          }
          dx = sol.head(n);
          dy = p > 0 ? Vec(sol.tail(p)) : Vec(0);
          const Vec gdx = G * dx;
          ds = -r_g - gdx;
          dz.resize(m);
          for (int i = 0; i < m; ++i)
            dz[i] = w[i] * (gdx[i] + r_g[i]) - r_c_mod[i] / s[i];
          if (!dx.allFinite() || !ds.allFinite() || !dz.allFinite()) return false;
          // Gate on the errors a step actually inherits: the next dual
          // residual is (1-a)*r_d + a*(r_d + G'dz + A'dy), and likewise for
          // the equality rows, so bounding these direction errors by the
          // current residual level keeps both from ever growing past the
          // acceptance budget. The mu term matters far from convergence,
          // where sloppy directions are harmless and may even be needed to
          // develop an infeasibility ray.
          double err_d = (r_d + Gt * dz + (p > 0 ? Vec(At * dy) : Vec(Vec::Zero(n))))
                             .cwiseAbs()
                             .maxCoeff();
          const double err_a = p > 0 ? (r_a + A * dx).cwiseAbs().maxCoeff() : 0.0;
          const double gate_d =
              std::max({rd_n, dn * settings.accept_tol, 0.05 * mu});
          const double gate_a =
              std::max({ra_n, bn * settings.accept_tol, 0.05 * mu});
          if (err_d > gate_d || err_a > gate_a) {
            if (settings.verbose)
              std::fprintf(stderr,
                           "    direction rejected: err %9.3e %9.3e  gate %9.3e %9.3e  lu %d\n",
                           err_d, err_a, gate_d, gate_a, use_lu ? 1 : 0);
            return false;
          }
          return true;
        };

        // Predictor.
        Vec dx_a, dy_a, ds_a, dz_a;
        if (!kkt_solve(s.cwiseProduct(z), dx_a, dy_a, ds_a, dz_a)) {
          if (settings.verbose)
            std::fprintf(stderr, "lp it %3d  predictor solve rejected, delta %7.1e\n", iter,
                         delta);
          continue;
        }
        const double ap_a = detail::steplen(s, ds_a);
        const double ad_a = detail::steplen(z, dz_a);
        const double mu_aff = (s + ap_a * ds_a).dot(z + ad_a * dz_a) / m;
        double sigma = mu > 0 ? std::pow(mu_aff / mu, 3) : 0.0;
        sigma = std::min(1.0, std::max(0.0, sigma));

        // Corrector. Near degenerate optima the second-order term can blow
        // up while the affine direction is still sound, so fall back to the
        // (already vetted) affine direction rather than discarding the
        // iteration.
        Vec r_c = s.cwiseProduct(z) + ds_a.cwiseProduct(dz_a) -
                  Vec::Constant(m, sigma * mu);
        Vec dx, dy, ds, dz;
        if (!kkt_solve(r_c, dx, dy, ds, dz)) {
          if (settings.verbose)
            std::fprintf(stderr, "lp it %3d  corrector rejected; affine step, delta %7.1e\n",
                         iter, delta);
          dx = dx_a;
          dy = dy_a;
          ds = ds_a;
          dz = dz_a;
        }

        const double eta = std::max(0.99, 1.0 - 10.0 * mu);
        const double ap = std::min(1.0, eta * detail::steplen(s, ds));
        const double ad = std::min(1.0, eta * detail::steplen(z, dz));
        if (ap < 1e-13 && ad < 1e-13) {
          if (settings.verbose)
            std::fprintf(stderr, "lp it %3d  stalled: ap %9.3e ad %9.3e, delta %7.1e\n", iter, ap,
                         ad, delta);
          continue;
        }

        x += ap * dx;
        s += ap * ds;
        y += ad * dy;
        z += ad * dz;
        for (int i = 0; i < m; ++i) {
          s[i] = std::max(s[i], 1e-300);
          z[i] = std::max(z[i], 1e-300);
        }
        stepped = true;
      }
    }
    if (!stepped) break;
    delta = std::max(delta / 100.0, 1e-9);  // undo the post-success bump
  }

  if (best_err <= settings.accept_tol)
    return finish(Status::kOptimal, best_x, best_z, best_y, iter);
  out.status = Status::kNumericalFailure;
  out.iterations = iter;
  (void)dummy_row;
  return out;
}

}  // namespace stgcs::lp
