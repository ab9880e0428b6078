#pragma once

#include <cstdint>
#include <vector>

#include "copostab/matrix.hpp"

namespace copostab {

// 0 <= lambda  ⊥  M lambda + q >= 0
struct LcpInstance {
  Vector q;
  Matrix m;
};

// alpha: active (lambda_i > 0 = w_i), beta: degenerate (both zero),
// gamma: inactive (lambda_i = 0 < w_i).
struct IndexPartition {
  std::vector<int> alpha, beta, gamma;
};

struct LcpSolution {
  Vector lambda;
  Vector slack;  // w = M lambda + q
  IndexPartition partition;
  uint32_t pattern = 0;  // support mask that produced the representative
};

// Classifies each coordinate; throws PartitionError when a coordinate fits
// none of the three classes at tolerance tol.
IndexPartition index_partition(const Vector& lambda, const Vector& w, double tol);

// One representative solution per feasible support pattern, deduplicated, in
// pattern-index order. Possibly empty when M is not a Q-matrix for this q.
std::vector<LcpSolution> lcp_solve_all(const LcpInstance& inst);

// All principal minors positive (fraction-free determinants).
bool is_P_matrix(const Matrix& m);

// SOL(0, M) = {0}, decided by support LPs.
bool is_R0_matrix(const Matrix& m);

struct SolvabilityClass {
  bool is_p = false;
  bool is_r0 = false;
  // Solvability for every q is certified only through the P-matrix sufficient
  // condition; R0 alone lets callers proceed with a warning.
  bool q_matrix_certified = false;
};

SolvabilityClass assert_solvability_class(const Matrix& m);

}  // namespace copostab
