#include "copostab/qp.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "copostab/errors.hpp"
#include "copostab/linalg.hpp"
#include "copostab/lp.hpp"
#include "copostab/tol.hpp"

namespace copostab {

namespace {

struct ReducedEq {
  Matrix e;   // maximal independent subset of original equality rows
  Vector e0;
  bool inconsistent = false;
};

// Picks the lexicographically first maximal independent subset of equality
// rows; a dependent row with an inconsistent right-hand side proves emptiness.
ReducedEq reduce_equalities(const Matrix& e, const Vector& e0) {
  ReducedEq out;
  int n = e.cols;
  out.e = Matrix(0, n);
  double scale = std::max(1.0, max_abs(e));
  std::vector<Vector> red;    // reduced rows, pivot normalized to 1
  std::vector<double> redr;   // reduced rhs
  std::vector<int> pivcol;
  for (int i = 0; i < e.rows; ++i) {
    Vector r(n);
    for (int j = 0; j < n; ++j) r[j] = e(i, j);
    double rr = e0[i];
    for (size_t k = 0; k < red.size(); ++k) {
      double f = r[pivcol[k]];
      if (f == 0.0) continue;
      for (int j = 0; j < n; ++j) r[j] -= f * red[k][j];
      rr -= f * redr[k];
      r[pivcol[k]] = 0.0;
    }
    int pc = -1;
    double best = 1e-10 * scale;
    for (int j = 0; j < n; ++j)
      if (std::abs(r[j]) > best) {
        best = std::abs(r[j]);
        pc = j;
      }
    if (pc < 0) {
      if (std::abs(rr) > tol::feas * scale) {
        out.inconsistent = true;
        return out;
      }
      continue;
    }
    double inv = 1.0 / r[pc];
    for (double& x : r) x *= inv;
    r[pc] = 1.0;
    rr *= inv;
    red.push_back(r);
    redr.push_back(rr);
    pivcol.push_back(pc);
    Vector orig(n);
    for (int j = 0; j < n; ++j) orig[j] = e(i, j);
    out.e.append_row(orig);
    out.e0.push_back(e0[i]);
  }
  return out;
}

bool primal_feasible(const Polytope& p, const Vector& v) {
  return p.contains(v, tol::feas);
}

}  // namespace

QpMinima qp_global_min_all(const Matrix& q, const Polytope& p, double keep_tol) {
  int n = p.dim();
  if (!q.square() || q.rows != n) throw DimensionError("qp_global_min objective size");
  if (asymmetry(q) > tol::sym) throw AsymmetryError("qp_global_min objective");
  if (p.n_ineq() > 24) throw BudgetError("qp_global_min inequality rows");

  QpMinima out;
  if (n == 0) {
    if (!polytope_feasible(p)) {
      out.empty = true;
      return out;
    }
    out.value = 0.0;
    out.args.push_back({});
    return out;
  }

  Vector fallback;
  if (!polytope_feasible(p, &fallback)) {
    out.empty = true;
    return out;
  }

  ReducedEq eq = reduce_equalities(p.eq_lhs, p.eq_rhs);
  if (eq.inconsistent) {
    out.empty = true;
    return out;
  }
  int me = eq.e.rows;
  int mg = p.n_ineq();

  struct Cand {
    double value;
    Vector v;
  };
  std::vector<Cand> cands;

  auto try_point = [&](const Vector& v) {
    if (!all_finite(v) || !primal_feasible(p, v)) return;
    cands.push_back({quad_form(q, v), v});
  };

  // KKT pass: stationary points of v^T Q v on each face {Ev=e0, G_S v=g0_S}.
  // Active sets with me + |S| > n give singular systems; skip them up front.
  for (uint32_t mask = 0; mask < (1u << mg); ++mask) {
    int ns = std::popcount(mask);
    if (me + ns > n) continue;
    int nk = n + me + ns;
    Matrix kkt(nk, nk);
    Vector rhs(nk, 0.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) kkt(i, j) = 2.0 * q(i, j);
    for (int t = 0; t < me; ++t) {
      for (int j = 0; j < n; ++j) {
        kkt(j, n + t) = -eq.e(t, j);
        kkt(n + t, j) = eq.e(t, j);
      }
      rhs[n + t] = eq.e0[t];
    }
    int sidx = 0;
    for (int gi = 0; gi < mg; ++gi) {
      if (!(mask & (1u << gi))) continue;
      for (int j = 0; j < n; ++j) {
        kkt(j, n + me + sidx) = -p.ineq_lhs(gi, j);
        kkt(n + me + sidx, j) = p.ineq_lhs(gi, j);
      }
      rhs[n + me + sidx] = p.ineq_rhs[gi];
      ++sidx;
    }
    Vector z;
    try {
      z = solve_linear(kkt, rhs);
    } catch (const SingularError&) {
      continue;
    }
    double resid = 0.0;
    Vector chk = mat_vec(kkt, z);
    for (int i = 0; i < nk; ++i) resid = std::max(resid, std::abs(chk[i] - rhs[i]));
    if (resid > 1e-8 * (1.0 + norm_inf(rhs))) continue;
    try_point(Vector(z.begin(), z.begin() + n));

    // Vertex pass: basic solutions of the active rows alone (covers faces
    // where stationarity never holds, e.g. concave objectives).
    if (me + ns == n) {
      Matrix b(0, n);
      Vector b0;
      for (int t = 0; t < me; ++t) {
        Vector row(n);
        for (int j = 0; j < n; ++j) row[j] = eq.e(t, j);
        b.append_row(row);
        b0.push_back(eq.e0[t]);
      }
      for (int gi = 0; gi < mg; ++gi) {
        if (!(mask & (1u << gi))) continue;
        Vector row(n);
        for (int j = 0; j < n; ++j) row[j] = p.ineq_lhs(gi, j);
        b.append_row(row);
        b0.push_back(p.ineq_rhs[gi]);
      }
      try {
        try_point(solve_linear(b, b0));
      } catch (const SingularError&) {
      }
    }
  }

  if (cands.empty()) try_point(fallback);
  if (cands.empty()) cands.push_back({quad_form(q, fallback), fallback});

  double best = cands[0].value;
  for (const Cand& c : cands) best = std::min(best, c.value);
  out.value = best;
  std::vector<Cand> near;
  for (const Cand& c : cands)
    if (c.value <= best + keep_tol) near.push_back(c);
  std::stable_sort(near.begin(), near.end(),
                   [](const Cand& a, const Cand& b) { return a.value < b.value; });
  for (const Cand& c : near) {
    bool dup = false;
    for (const Vector& v : out.args)
      if (norm_inf(c.v - v) <= 1e-9) {
        dup = true;
        break;
      }
    if (!dup) out.args.push_back(c.v);
  }
  return out;
}

QpResult qp_global_min(const Matrix& q, const Polytope& p) {
  QpMinima m = qp_global_min_all(q, p, 0.0);
  QpResult r;
  r.empty = m.empty;
  if (!m.empty) {
    r.value = m.value;
    r.arg = m.args.front();
  }
  return r;
}

}  // namespace copostab
