#include "copostab/matrix.hpp"

#include <cmath>
#include <cstdlib>

#include "copostab/errors.hpp"

namespace copostab {

Matrix::Matrix(int r, int c, double fill)
    : rows(r), cols(c), a(static_cast<size_t>(r) * static_cast<size_t>(c), fill) {
  if (r < 0 || c < 0) throw DimensionError("negative matrix dimension");
}

Matrix Matrix::identity(int n) {
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rs) {
  Matrix m;
  m.rows = static_cast<int>(rs.size());
  m.cols = m.rows > 0 ? static_cast<int>(rs.begin()->size()) : 0;
  m.a.reserve(static_cast<size_t>(m.rows) * m.cols);
  for (const auto& r : rs) {
    if (static_cast<int>(r.size()) != m.cols) throw DimensionError("ragged row list");
    for (double x : r) m.a.push_back(x);
  }
  return m;
}

Matrix Matrix::row_vector(const Vector& v) {
  Matrix m(1, static_cast<int>(v.size()));
  m.a = v;
  return m;
}

Matrix Matrix::col_vector(const Vector& v) {
  Matrix m(static_cast<int>(v.size()), 1);
  m.a = v;
  return m;
}

Matrix Matrix::block(int i0, int j0, int r, int c) const {
  if (i0 < 0 || j0 < 0 || i0 + r > rows || j0 + c > cols) throw DimensionError("block out of range");
  Matrix m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = (*this)(i0 + i, j0 + j);
  return m;
}

void Matrix::set_block(int i0, int j0, const Matrix& m) {
  if (i0 < 0 || j0 < 0 || i0 + m.rows > rows || j0 + m.cols > cols)
    throw DimensionError("set_block out of range");
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j) (*this)(i0 + i, j0 + j) = m(i, j);
}

Matrix Matrix::select(const std::vector<int>& ris, const std::vector<int>& cis) const {
  Matrix m(static_cast<int>(ris.size()), static_cast<int>(cis.size()));
  for (size_t i = 0; i < ris.size(); ++i)
    for (size_t j = 0; j < cis.size(); ++j) m(static_cast<int>(i), static_cast<int>(j)) = (*this)(ris[i], cis[j]);
  return m;
}

void Matrix::append_row(const Vector& r) {
  if (rows == 0 && cols == 0) cols = static_cast<int>(r.size());
  if (static_cast<int>(r.size()) != cols) throw DimensionError("append_row width mismatch");
  a.insert(a.end(), r.begin(), r.end());
  ++rows;
}

static void require_same_shape(const Matrix& x, const Matrix& y, const char* what) {
  if (x.rows != y.rows || x.cols != y.cols) throw DimensionError(what);
}

Matrix operator+(const Matrix& x, const Matrix& y) {
  require_same_shape(x, y, "matrix add");
  Matrix m = x;
  for (size_t k = 0; k < m.a.size(); ++k) m.a[k] += y.a[k];
  return m;
}

Matrix operator-(const Matrix& x, const Matrix& y) {
  require_same_shape(x, y, "matrix sub");
  Matrix m = x;
  for (size_t k = 0; k < m.a.size(); ++k) m.a[k] -= y.a[k];
  return m;
}

Matrix operator*(const Matrix& x, const Matrix& y) {
  if (x.cols != y.rows) throw DimensionError("matrix product");
  Matrix m(x.rows, y.cols);
  for (int i = 0; i < x.rows; ++i)
    for (int k = 0; k < x.cols; ++k) {
      double xik = x(i, k);
      if (xik == 0.0) continue;
      for (int j = 0; j < y.cols; ++j) m(i, j) += xik * y(k, j);
    }
  return m;
}

Matrix operator*(double s, const Matrix& x) {
  Matrix m = x;
  for (double& v : m.a) v *= s;
  return m;
}

Matrix transpose(const Matrix& x) {
  Matrix m(x.cols, x.rows);
  for (int i = 0; i < x.rows; ++i)
    for (int j = 0; j < x.cols; ++j) m(j, i) = x(i, j);
  return m;
}

Vector mat_vec(const Matrix& m, const Vector& v) {
  if (m.cols != static_cast<int>(v.size())) throw DimensionError("mat_vec");
  Vector r(m.rows, 0.0);
  for (int i = 0; i < m.rows; ++i) {
    double s = 0.0;
    for (int j = 0; j < m.cols; ++j) s += m(i, j) * v[j];
    r[i] = s;
  }
  return r;
}

Vector operator+(const Vector& x, const Vector& y) {
  if (x.size() != y.size()) throw DimensionError("vector add");
  Vector r = x;
  for (size_t k = 0; k < r.size(); ++k) r[k] += y[k];
  return r;
}

Vector operator-(const Vector& x, const Vector& y) {
  if (x.size() != y.size()) throw DimensionError("vector sub");
  Vector r = x;
  for (size_t k = 0; k < r.size(); ++k) r[k] -= y[k];
  return r;
}

Vector operator*(double s, const Vector& x) {
  Vector r = x;
  for (double& v : r) v *= s;
  return r;
}

double dot(const Vector& x, const Vector& y) {
  if (x.size() != y.size()) throw DimensionError("dot");
  double s = 0.0;
  for (size_t k = 0; k < x.size(); ++k) s += x[k] * y[k];
  return s;
}

double quad_form(const Matrix& s, const Vector& v) {
  if (!s.square() || s.rows != static_cast<int>(v.size())) throw DimensionError("quad_form");
  return dot(v, mat_vec(s, v));
}

double norm_1(const Vector& v) {
  double s = 0.0;
  for (double x : v) s += std::abs(x);
  return s;
}

double norm_2(const Vector& v) { return std::sqrt(dot(v, v)); }

double norm_inf(const Vector& v) {
  double s = 0.0;
  for (double x : v) s = std::max(s, std::abs(x));
  return s;
}

double max_abs(const Matrix& m) {
  double s = 0.0;
  for (double x : m.a) s = std::max(s, std::abs(x));
  return s;
}

bool all_finite(const Matrix& m) {
  for (double x : m.a)
    if (!std::isfinite(x)) return false;
  return true;
}

bool all_finite(const Vector& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

double asymmetry(const Matrix& m) {
  if (!m.square()) throw DimensionError("asymmetry of non-square matrix");
  double s = 0.0;
  for (int i = 0; i < m.rows; ++i)
    for (int j = i + 1; j < m.cols; ++j) s = std::max(s, std::abs(m(i, j) - m(j, i)));
  return s;
}

Matrix mirror_upper(const Matrix& m) {
  if (!m.square()) throw DimensionError("mirror_upper of non-square matrix");
  Matrix r = m;
  for (int i = 0; i < r.rows; ++i)
    for (int j = 0; j < i; ++j) r(i, j) = r(j, i);
  return r;
}

Vector concat(const Vector& x, const Vector& y) {
  Vector r = x;
  r.insert(r.end(), y.begin(), y.end());
  return r;
}

Vector concat(const Vector& x, const Vector& y, const Vector& z) {
  Vector r = concat(x, y);
  r.insert(r.end(), z.begin(), z.end());
  return r;
}

}  // namespace copostab
