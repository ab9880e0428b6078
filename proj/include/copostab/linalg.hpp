#pragma once

#include "copostab/matrix.hpp"

namespace copostab {

// Solves Ax = b by LU with partial pivoting. Throws SingularError when a
// pivot magnitude falls below tol::pivot, DimensionError on shape mismatch.
Vector solve_linear(const Matrix& a, const Vector& b);

// Multi-RHS variant: returns X with AX = B.
Matrix solve_linear_multi(const Matrix& a, const Matrix& b);

// Symmetric factorization with diagonal pivoting; true iff every pivot
// exceeds tol::pd. Throws AsymmetryError when max |S_ij - S_ji| > tol::sym.
bool is_positive_definite(const Matrix& s);

// Determinant by fraction-free (Bareiss) Gaussian elimination — exact on
// integer matrices, numerically gentle otherwise.
double det_fraction_free(const Matrix& m);

// Largest singular value via power iteration on A^T A (convergence tolerance
// 1e-10, 10000 iteration cap).
double spectral_norm(const Matrix& a);

}  // namespace copostab
