#pragma once

#include "copostab/matrix.hpp"

namespace copostab {

// Feasible set {v : E v = e0, G v >= g0}. Every optimization use slices a
// cone with a 1-norm-sphere equality, so the set is bounded whenever callers
// say it is; pure feasibility checks tolerate unbounded sets.
struct Polytope {
  int n = 0;        // ambient dimension
  Matrix eq_lhs;    // E, me x n
  Vector eq_rhs;    // e0
  Matrix ineq_lhs;  // G, mg x n
  Vector ineq_rhs;  // g0

  Polytope() = default;
  explicit Polytope(int dim) : n(dim), eq_lhs(0, dim), ineq_lhs(0, dim) {}

  int dim() const { return n; }
  int n_eq() const { return eq_lhs.rows; }
  int n_ineq() const { return ineq_lhs.rows; }

  void add_eq(const Vector& row, double rhs);
  void add_ineq(const Vector& row, double rhs);

  bool contains(const Vector& v, double tol) const;
};

}  // namespace copostab
