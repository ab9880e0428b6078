#include "copostab/lcp.hpp"

#include <cmath>

#include "copostab/errors.hpp"
#include "copostab/linalg.hpp"
#include "copostab/lp.hpp"
#include "copostab/tol.hpp"

namespace copostab {

IndexPartition index_partition(const Vector& lambda, const Vector& w, double tol) {
  if (lambda.size() != w.size()) throw DimensionError("index_partition lengths");
  IndexPartition part;
  for (size_t i = 0; i < lambda.size(); ++i) {
    double l = lambda[i], s = w[i];
    bool l_zero = std::abs(l) <= tol, s_zero = std::abs(s) <= tol;
    if (l > tol && s_zero)
      part.alpha.push_back(static_cast<int>(i));
    else if (l_zero && s_zero)
      part.beta.push_back(static_cast<int>(i));
    else if (l_zero && s > tol)
      part.gamma.push_back(static_cast<int>(i));
    else
      throw PartitionError("coordinate " + std::to_string(i) + " is not complementarity-feasible");
  }
  return part;
}

namespace {

std::vector<int> mask_indices(uint32_t mask, int n) {
  std::vector<int> v;
  for (int i = 0; i < n; ++i)
    if (mask & (1u << i)) v.push_back(i);
  return v;
}

std::vector<int> mask_complement(uint32_t mask, int n) {
  std::vector<int> v;
  for (int i = 0; i < n; ++i)
    if (!(mask & (1u << i))) v.push_back(i);
  return v;
}

// Representative of {lambda_S >= 0, lambda_Sbar = 0, (q+M lambda)_S = 0,
// (q+M lambda)_Sbar >= 0}, or false. When M_SS is nonsingular the polyhedron
// is at most one point and a direct solve decides; otherwise a phase-1 LP
// decides and the representative is nudged toward strict complementarity by
// maximizing the active-coordinate sum.
bool pattern_representative(const LcpInstance& inst, uint32_t mask, Vector* lambda_out) {
  int n = static_cast<int>(inst.q.size());
  std::vector<int> s = mask_indices(mask, n);
  std::vector<int> sc = mask_complement(mask, n);
  int ns = static_cast<int>(s.size());
  Vector lam(n, 0.0);
  if (ns > 0) {
    Matrix mss = inst.m.select(s, s);
    bool direct = false;
    Vector lam_s;
    try {
      Vector rhs(ns);
      for (int k = 0; k < ns; ++k) rhs[k] = -inst.q[s[k]];
      lam_s = solve_linear(mss, rhs);
      direct = true;
    } catch (const SingularError&) {
    }
    if (direct) {
      for (double v : lam_s)
        if (v < -tol::feas) return false;
      for (int k = 0; k < ns; ++k) lam[s[k]] = std::max(0.0, lam_s[k]);
    } else {
      Polytope p(ns);
      for (int k = 0; k < ns; ++k) {
        Vector row(ns, 0.0);
        row[k] = 1.0;
        p.add_ineq(row, 0.0);
      }
      for (int k = 0; k < ns; ++k) {
        Vector row(ns);
        for (int j = 0; j < ns; ++j) row[j] = mss(k, j);
        p.add_eq(row, -inst.q[s[k]]);
      }
      for (int i : sc) {
        Vector row(ns);
        for (int j = 0; j < ns; ++j) row[j] = inst.m(i, s[j]);
        p.add_ineq(row, -inst.q[i]);
      }
      Vector base;
      if (!polytope_feasible(p, &base)) return false;
      double cap = 1.0;
      for (double v : base) cap += v;
      Polytope capped = p;
      capped.add_ineq(Vector(ns, -1.0), -cap);
      LpResult best = lp_maximize(Vector(ns, 1.0), capped);
      const Vector& pick = best.status == LpStatus::Optimal ? best.v : base;
      for (int k = 0; k < ns; ++k) lam[s[k]] = std::max(0.0, pick[k]);
    }
  }
  Vector w = mat_vec(inst.m, lam) + inst.q;
  for (int i : sc)
    if (w[i] < -tol::feas) return false;
  for (int k = 0; k < ns; ++k)
    if (std::abs(w[s[k]]) > tol::comp) return false;
  *lambda_out = lam;
  return true;
}

}  // namespace

std::vector<LcpSolution> lcp_solve_all(const LcpInstance& inst) {
  int n = static_cast<int>(inst.q.size());
  if (!inst.m.square() || inst.m.rows != n) throw DimensionError("lcp_solve_all shapes");
  if (n > tol::max_enum_dim) throw DimensionError("lcp_solve_all dimension above enumeration cap");
  std::vector<LcpSolution> sols;
  if (n == 0) {
    sols.push_back(LcpSolution{{}, {}, {}, 0});
    return sols;
  }
  for (uint32_t mask = 0; mask < (1u << n); ++mask) {
    Vector lam;
    if (!pattern_representative(inst, mask, &lam)) continue;
    bool dup = false;
    for (const LcpSolution& sol : sols)
      if (norm_inf(lam - sol.lambda) <= tol::dedup) {
        dup = true;
        break;
      }
    if (dup) continue;
    LcpSolution sol;
    sol.lambda = lam;
    sol.slack = mat_vec(inst.m, lam) + inst.q;
    sol.partition = index_partition(sol.lambda, sol.slack, tol::comp);
    sol.pattern = mask;
    sols.push_back(std::move(sol));
  }
  return sols;
}

bool is_P_matrix(const Matrix& m) {
  if (!m.square()) throw DimensionError("is_P_matrix needs a square matrix");
  int n = m.rows;
  if (n > tol::max_enum_dim) throw DimensionError("is_P_matrix dimension above enumeration cap");
  for (uint32_t mask = 1; mask < (1u << n); ++mask) {
    std::vector<int> j = mask_indices(mask, n);
    if (det_fraction_free(m.select(j, j)) <= tol::pd) return false;
  }
  return true;
}

bool is_R0_matrix(const Matrix& m) {
  if (!m.square()) throw DimensionError("is_R0_matrix needs a square matrix");
  int n = m.rows;
  if (n > tol::max_enum_dim) throw DimensionError("is_R0_matrix dimension above enumeration cap");
  for (uint32_t mask = 1; mask < (1u << n); ++mask) {
    std::vector<int> s = mask_indices(mask, n);
    std::vector<int> sc = mask_complement(mask, n);
    int ns = static_cast<int>(s.size());
    Polytope p(ns);
    for (int k = 0; k < ns; ++k) {
      Vector row(ns, 0.0);
      row[k] = 1.0;
      p.add_ineq(row, 0.0);
    }
    for (int k = 0; k < ns; ++k) {
      Vector row(ns);
      for (int j = 0; j < ns; ++j) row[j] = m(s[k], s[j]);
      p.add_eq(row, 0.0);
    }
    for (int i : sc) {
      Vector row(ns);
      for (int j = 0; j < ns; ++j) row[j] = m(i, s[j]);
      p.add_ineq(row, 0.0);
    }
    p.add_ineq(Vector(ns, -1.0), -1.0);  // sum <= 1 caps the homogeneous ray
    LpResult r = lp_maximize(Vector(ns, 1.0), p);
    // The feasible set is a capped cone: the optimum is 0 (trivial ray only)
    // or 1 (a nonzero solution scales onto the cap).
    if (r.status == LpStatus::Optimal && r.value > 0.5) return false;
  }
  return true;
}

SolvabilityClass assert_solvability_class(const Matrix& m) {
  SolvabilityClass c;
  c.is_p = is_P_matrix(m);
  c.is_r0 = c.is_p || is_R0_matrix(m);
  c.q_matrix_certified = c.is_p;
  return c;
}

}  // namespace copostab
