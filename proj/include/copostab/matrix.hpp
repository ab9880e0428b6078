#pragma once

#include <initializer_list>
#include <vector>

namespace copostab {

using Vector = std::vector<double>;

// Dense row-major real matrix. Small and value-semantic: every quantity in
// this project (system matrices, Lyapunov candidates, quadratic forms, cut
// coefficients) fits comfortably in a handful of doubles.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> a;  // row-major, rows*cols entries

  Matrix() = default;
  Matrix(int r, int c, double fill = 0.0);

  static Matrix identity(int n);
  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rs);
  static Matrix row_vector(const Vector& v);
  static Matrix col_vector(const Vector& v);

  double& operator()(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
  double operator()(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }

  bool square() const { return rows == cols; }
  bool empty() const { return rows == 0 || cols == 0; }

  Matrix block(int i0, int j0, int r, int c) const;
  void set_block(int i0, int j0, const Matrix& m);
  // Rows/columns picked by index lists (principal submatrices, Schur blocks).
  Matrix select(const std::vector<int>& ris, const std::vector<int>& cis) const;

  void append_row(const Vector& r);
};

Matrix operator+(const Matrix& x, const Matrix& y);
Matrix operator-(const Matrix& x, const Matrix& y);
Matrix operator*(const Matrix& x, const Matrix& y);
Matrix operator*(double s, const Matrix& x);
Matrix transpose(const Matrix& x);

Vector mat_vec(const Matrix& m, const Vector& v);
Vector operator+(const Vector& x, const Vector& y);
Vector operator-(const Vector& x, const Vector& y);
Vector operator*(double s, const Vector& x);

double dot(const Vector& x, const Vector& y);
// v^T S v for square S.
double quad_form(const Matrix& s, const Vector& v);

double norm_1(const Vector& v);
double norm_2(const Vector& v);
double norm_inf(const Vector& v);
// Largest absolute entry (used for residual magnitudes and dedup radii).
double max_abs(const Matrix& m);

bool all_finite(const Matrix& m);
bool all_finite(const Vector& v);
// max_ij |X_ij - X_ji|
double asymmetry(const Matrix& m);
// Copies the upper triangle onto the lower one, making the result exactly
// symmetric without changing any upper-triangle bit.
Matrix mirror_upper(const Matrix& m);

Vector concat(const Vector& x, const Vector& y);
Vector concat(const Vector& x, const Vector& y, const Vector& z);

}  // namespace copostab
