#include "copostab/lp.hpp"

#include <cmath>
#include <vector>

#include "copostab/errors.hpp"
#include "copostab/linalg.hpp"
#include "copostab/tol.hpp"

namespace copostab {

void Polytope::add_eq(const Vector& row, double rhs) {
  if (static_cast<int>(row.size()) != n) throw DimensionError("equality row width");
  eq_lhs.append_row(row);
  eq_rhs.push_back(rhs);
}

void Polytope::add_ineq(const Vector& row, double rhs) {
  if (static_cast<int>(row.size()) != n) throw DimensionError("inequality row width");
  ineq_lhs.append_row(row);
  ineq_rhs.push_back(rhs);
}

bool Polytope::contains(const Vector& v, double tol) const {
  if (static_cast<int>(v.size()) != n) throw DimensionError("contains point width");
  for (int i = 0; i < n_eq(); ++i) {
    double s = -eq_rhs[i];
    for (int j = 0; j < n; ++j) s += eq_lhs(i, j) * v[j];
    if (std::abs(s) > tol) return false;
  }
  for (int i = 0; i < n_ineq(); ++i) {
    double s = -ineq_rhs[i];
    for (int j = 0; j < n; ++j) s += ineq_lhs(i, j) * v[j];
    if (s < -tol) return false;
  }
  return true;
}

namespace {

constexpr double kReducedCost = 1e-9;  // entering significance threshold
constexpr double kRatioPivot = 1e-9;   // ratio-test direction threshold
constexpr double kRatioSlack = 1e-9;   // Harris ratio-test expansion
constexpr int kStallLimit = 64;        // degenerate pivots before Bland

// Revised simplex on min cost.y, A y = b (b >= 0), y >= 0. The basis matrix
// is refactorized from the original column data at every iteration, so
// roundoff never accumulates across pivots; the LPs in this project are
// small enough that the extra factorizations are free.
//
// Pivot selection favors numerical stability: entering by most negative
// reduced cost and leaving by a two-pass ratio test that picks the largest
// pivot magnitude among near-tied rows. A long run of degenerate pivots
// switches the entering rule to Bland's (first eligible index), which
// guarantees escape from any cycle; the pivot budget is a final backstop.
struct RevisedSimplex {
  int m = 0;      // rows
  int cols = 0;   // total columns
  Matrix a;       // m x cols, original data
  Vector b;       // length m, nonnegative
  Vector cost;    // length cols
  std::vector<int> basis;
  Vector xb;      // basic values, kept in sync with basis

  Matrix basis_matrix() const {
    Matrix bm(m, m);
    for (int i = 0; i < m; ++i)
      for (int k = 0; k < m; ++k) bm(i, k) = a(i, basis[k]);
    return bm;
  }

  Vector column(int j) const {
    Vector col(m);
    for (int i = 0; i < m; ++i) col[i] = a(i, j);
    return col;
  }

  // Runs pivots over columns [0, col_limit). Returns true when optimal,
  // false when the objective is unbounded below.
  bool run(int col_limit) {
    const int max_pivots = 2000 + 200 * m;
    std::vector<bool> in_basis(cols, false);
    for (int j : basis) in_basis[j] = true;
    int stall = 0;
    for (int pivots = 0; pivots < max_pivots; ++pivots) {
      Matrix bm = basis_matrix();
      xb = solve_linear(bm, b);
      Vector cb(m);
      for (int k = 0; k < m; ++k) cb[k] = cost[basis[k]];
      Vector dual = solve_linear(transpose(bm), cb);

      const bool bland = stall >= kStallLimit;
      int enter = -1;
      double enter_rc = -kReducedCost;
      for (int j = 0; j < col_limit; ++j) {
        if (in_basis[j]) continue;
        double rc = cost[j];
        for (int i = 0; i < m; ++i) rc -= dual[i] * a(i, j);
        if (rc < enter_rc) {
          enter = j;
          if (bland) break;
          enter_rc = rc;
        }
      }
      if (enter < 0) return true;

      Vector dir = solve_linear(bm, column(enter));
      // Two-pass ratio test: find the tightest ratio with a little slack,
      // then take the largest pivot magnitude among rows inside the slack.
      double theta = -1.0;
      for (int i = 0; i < m; ++i) {
        if (dir[i] <= kRatioPivot) continue;
        double r = (std::max(xb[i], 0.0) + kRatioSlack) / dir[i];
        if (theta < 0.0 || r < theta) theta = r;
      }
      if (theta < 0.0) return false;
      int leave = -1;
      for (int i = 0; i < m; ++i) {
        if (dir[i] <= kRatioPivot) continue;
        if (std::max(xb[i], 0.0) / dir[i] > theta) continue;
        if (leave < 0 || dir[i] > dir[leave] ||
            (dir[i] == dir[leave] && basis[i] < basis[leave])) {
          leave = i;
        }
      }
      stall = std::max(xb[leave], 0.0) / dir[leave] < kRatioSlack ? stall + 1 : 0;
      in_basis[basis[leave]] = false;
      in_basis[enter] = true;
      basis[leave] = enter;
    }
    throw Error("simplex pivot budget exhausted");
  }

  void drop_rows(const std::vector<int>& keep) {
    Matrix na(static_cast<int>(keep.size()), cols);
    Vector nb(keep.size());
    std::vector<int> nbasis(keep.size());
    for (size_t r = 0; r < keep.size(); ++r) {
      for (int j = 0; j < cols; ++j) na(static_cast<int>(r), j) = a(keep[r], j);
      nb[r] = b[keep[r]];
      nbasis[r] = basis[keep[r]];
    }
    a = std::move(na);
    b = std::move(nb);
    basis = std::move(nbasis);
    m = static_cast<int>(keep.size());
  }
};

LpResult solve_impl(const Vector& c, const Polytope& p, bool need_opt) {
  const int n = p.dim();
  const int me = p.n_eq(), mg = p.n_ineq(), m = me + mg;
  LpResult res;

  if (n == 0) {
    for (double e : p.eq_rhs)
      if (std::abs(e) > tol::feas) return res;  // Infeasible
    for (double g : p.ineq_rhs)
      if (g > tol::feas) return res;
    res.status = LpStatus::Optimal;
    res.v = {};
    res.value = 0.0;
    return res;
  }

  // Standard form: v = v+ - v- splits the free variables, each inequality
  // row g.v >= g0 gains a surplus column, plus one artificial per row.
  const int nstruct = 2 * n + mg;
  RevisedSimplex s;
  s.m = m;
  s.cols = nstruct + m;
  s.a = Matrix(m, s.cols);
  s.b = Vector(m);
  double bmag = 0.0;
  for (int i = 0; i < m; ++i) {
    const bool is_eq = i < me;
    const int src = is_eq ? i : i - me;
    const Matrix& lhs = is_eq ? p.eq_lhs : p.ineq_lhs;
    double rhs = is_eq ? p.eq_rhs[src] : p.ineq_rhs[src];
    double flip = rhs < 0.0 ? -1.0 : 1.0;
    for (int j = 0; j < n; ++j) {
      s.a(i, j) = flip * lhs(src, j);
      s.a(i, n + j) = -flip * lhs(src, j);
    }
    if (!is_eq) s.a(i, 2 * n + src) = -flip;
    s.a(i, nstruct + i) = 1.0;
    s.b[i] = flip * rhs;
    bmag += s.b[i];
  }

  if (m > 0) {
    // Phase 1: minimize the artificial sum.
    s.cost = Vector(s.cols, 0.0);
    for (int i = 0; i < m; ++i) s.cost[nstruct + i] = 1.0;
    s.basis.resize(m);
    for (int i = 0; i < m; ++i) s.basis[i] = nstruct + i;
    s.run(s.cols);
    double art = 0.0;
    for (int k = 0; k < s.m; ++k)
      if (s.basis[k] >= nstruct) art += std::max(s.xb[k], 0.0);
    if (art > tol::feas * (1.0 + bmag)) return res;  // Infeasible

    // Evict artificials that linger in the basis at level zero; rows that
    // offer no structural pivot are redundant and dropped.
    for (int pass = 0; pass < m; ++pass) {
      int row = -1;
      for (int k = 0; k < s.m; ++k)
        if (s.basis[k] >= nstruct) {
          row = k;
          break;
        }
      if (row < 0) break;
      Matrix bm = s.basis_matrix();
      Vector e(s.m, 0.0);
      e[row] = 1.0;
      Vector w = solve_linear(transpose(bm), e);
      int piv = -1;
      for (int j = 0; j < nstruct && piv < 0; ++j) {
        bool used = false;
        for (int k = 0; k < s.m; ++k) used = used || s.basis[k] == j;
        if (used) continue;
        double entry = 0.0;
        for (int i = 0; i < s.m; ++i) entry += w[i] * s.a(i, j);
        if (std::abs(entry) > 1e-7) piv = j;
      }
      if (piv >= 0) {
        s.basis[row] = piv;
      } else {
        std::vector<int> keep;
        for (int k = 0; k < s.m; ++k)
          if (k != row) keep.push_back(k);
        s.drop_rows(keep);
      }
    }
  }

  auto extract = [&]() {
    Vector v(n, 0.0);
    Matrix bm = s.basis_matrix();
    Vector xb = s.m > 0 ? solve_linear(bm, s.b) : Vector();
    for (int k = 0; k < s.m; ++k) {
      int j = s.basis[k];
      if (j < n)
        v[j] += xb[k];
      else if (j < 2 * n)
        v[j - n] -= xb[k];
    }
    return v;
  };

  if (!need_opt) {
    res.status = LpStatus::Optimal;
    res.v = extract();
    res.value = dot(c, res.v);
    return res;
  }

  // Phase 2 over the structural columns only.
  s.cost = Vector(s.cols, 0.0);
  for (int j = 0; j < n; ++j) {
    s.cost[j] = -c[j];
    s.cost[n + j] = c[j];
  }
  if (s.m == 0) {
    bool flat = true;
    for (double cj : c) flat = flat && cj == 0.0;
    res.status = flat ? LpStatus::Optimal : LpStatus::Unbounded;
    res.v = Vector(n, 0.0);
    res.value = 0.0;
    return res;
  }
  bool bounded = s.run(nstruct);
  res.status = bounded ? LpStatus::Optimal : LpStatus::Unbounded;
  res.v = extract();
  res.value = dot(c, res.v);
  return res;
}

}  // namespace

LpResult lp_solve(const LpProblem& problem) {
  if (static_cast<int>(problem.c.size()) != problem.p.dim())
    throw DimensionError("objective length vs polytope dimension");
  return solve_impl(problem.c, problem.p, true);
}

LpResult lp_maximize(const Vector& c, const Polytope& p) { return lp_solve({c, p}); }

bool polytope_feasible(const Polytope& p, Vector* point) {
  LpResult r = solve_impl(Vector(p.dim(), 0.0), p, false);
  if (r.status != LpStatus::Optimal) return false;
  if (point) *point = r.v;
  return true;
}

}  // namespace copostab
