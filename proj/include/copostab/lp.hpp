#pragma once

#include "copostab/polytope.hpp"

namespace copostab {

enum class LpStatus { Optimal, Infeasible, Unbounded };

// maximize c^T v over p
struct LpProblem {
  Vector c;
  Polytope p;
};

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  Vector v;
  double value = 0.0;
};

// Two-phase revised simplex with per-iteration refactorization; entering by
// most negative reduced cost with a stall-triggered switch to Bland's rule.
LpResult lp_solve(const LpProblem& problem);

LpResult lp_maximize(const Vector& c, const Polytope& p);

// Phase-1 emptiness test; writes a feasible point into *point when nonempty.
bool polytope_feasible(const Polytope& p, Vector* point = nullptr);

}  // namespace copostab
