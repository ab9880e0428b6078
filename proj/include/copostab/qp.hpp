#pragma once

#include <vector>

#include "copostab/polytope.hpp"

namespace copostab {

struct QpResult {
  bool empty = false;
  double value = 0.0;
  Vector arg;
};

// All global minimizers (up to keep_tol above the minimum, deduplicated).
struct QpMinima {
  bool empty = false;
  double value = 0.0;
  std::vector<Vector> args;
};

// Global minimum of v^T Q v over a bounded polytope, by enumerating every
// active subset of inequality rows, solving the KKT equality system on the
// corresponding face, keeping primal-feasible candidates, and enumerating all
// vertices. A bounded indefinite quadratic attains its minimum at a KKT point
// of some face, so the candidate minimum is the global one. Singular KKT
// systems are skipped; their vertices are recovered by other subsets.
QpResult qp_global_min(const Matrix& q, const Polytope& p);

QpMinima qp_global_min_all(const Matrix& q, const Polytope& p, double keep_tol);

}  // namespace copostab
