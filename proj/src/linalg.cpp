#include "copostab/linalg.hpp"

#include <cmath>
#include <numeric>
#include <vector>

#include "copostab/errors.hpp"
#include "copostab/tol.hpp"

namespace copostab {

namespace {

struct Lu {
  Matrix lu;
  std::vector<int> perm;  // row permutation
};

Lu lu_factor(const Matrix& a) {
  if (!a.square()) throw DimensionError("solve_linear needs a square matrix");
  int n = a.rows;
  Lu f{a, std::vector<int>(n)};
  std::iota(f.perm.begin(), f.perm.end(), 0);
  Matrix& m = f.lu;
  for (int k = 0; k < n; ++k) {
    int piv = k;
    double best = std::abs(m(k, k));
    for (int i = k + 1; i < n; ++i) {
      double v = std::abs(m(i, k));
      if (v > best) {
        best = v;
        piv = i;
      }
    }
    if (best < tol::pivot) throw SingularError("pivot below threshold during LU");
    if (piv != k) {
      for (int j = 0; j < n; ++j) std::swap(m(k, j), m(piv, j));
      std::swap(f.perm[k], f.perm[piv]);
    }
    double inv = 1.0 / m(k, k);
    for (int i = k + 1; i < n; ++i) {
      double l = m(i, k) * inv;
      m(i, k) = l;
      if (l == 0.0) continue;
      for (int j = k + 1; j < n; ++j) m(i, j) -= l * m(k, j);
    }
  }
  return f;
}

Vector lu_solve(const Lu& f, const Vector& b) {
  int n = f.lu.rows;
  Vector x(n);
  for (int i = 0; i < n; ++i) x[i] = b[f.perm[i]];
  for (int i = 1; i < n; ++i) {
    double s = x[i];
    for (int j = 0; j < i; ++j) s -= f.lu(i, j) * x[j];
    x[i] = s;
  }
  for (int i = n - 1; i >= 0; --i) {
    double s = x[i];
    for (int j = i + 1; j < n; ++j) s -= f.lu(i, j) * x[j];
    x[i] = s / f.lu(i, i);
  }
  return x;
}

}  // namespace

Vector solve_linear(const Matrix& a, const Vector& b) {
  if (a.rows != static_cast<int>(b.size())) throw DimensionError("solve_linear rhs length");
  if (a.rows == 0) return {};
  return lu_solve(lu_factor(a), b);
}

Matrix solve_linear_multi(const Matrix& a, const Matrix& b) {
  if (a.rows != b.rows) throw DimensionError("solve_linear rhs rows");
  if (a.rows == 0) return Matrix(0, b.cols);
  Lu f = lu_factor(a);
  Matrix x(b.rows, b.cols);
  for (int j = 0; j < b.cols; ++j) {
    Vector col(b.rows);
    for (int i = 0; i < b.rows; ++i) col[i] = b(i, j);
    Vector s = lu_solve(f, col);
    for (int i = 0; i < b.rows; ++i) x(i, j) = s[i];
  }
  return x;
}

bool is_positive_definite(const Matrix& s) {
  if (!s.square()) throw DimensionError("is_positive_definite needs a square matrix");
  if (asymmetry(s) > tol::sym) throw AsymmetryError("is_positive_definite input");
  int n = s.rows;
  Matrix w = s;
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (int k = 0; k < n; ++k) {
    int piv = k;
    double best = w(k, k);
    for (int i = k + 1; i < n; ++i)
      if (w(i, i) > best) {
        best = w(i, i);
        piv = i;
      }
    if (best <= tol::pd) return false;
    if (piv != k) {
      for (int j = 0; j < n; ++j) std::swap(w(k, j), w(piv, j));
      for (int i = 0; i < n; ++i) std::swap(w(i, k), w(i, piv));
    }
    double inv = 1.0 / w(k, k);
    for (int i = k + 1; i < n; ++i) {
      double l = w(i, k) * inv;
      for (int j = k + 1; j < n; ++j) w(i, j) -= l * w(k, j);
    }
    for (int i = k + 1; i < n; ++i) {
      w(i, k) = 0.0;
      w(k, i) = 0.0;
    }
  }
  return true;
}

double det_fraction_free(const Matrix& m) {
  if (!m.square()) throw DimensionError("determinant of non-square matrix");
  int n = m.rows;
  if (n == 0) return 1.0;
  Matrix w = m;
  double prev = 1.0;
  int sign = 1;
  for (int k = 0; k < n - 1; ++k) {
    int piv = k;
    double best = std::abs(w(k, k));
    for (int i = k + 1; i < n; ++i)
      if (std::abs(w(i, k)) > best) {
        best = std::abs(w(i, k));
        piv = i;
      }
    if (best == 0.0) return 0.0;
    if (piv != k) {
      for (int j = 0; j < n; ++j) std::swap(w(k, j), w(piv, j));
      sign = -sign;
    }
    for (int i = k + 1; i < n; ++i)
      for (int j = k + 1; j < n; ++j)
        w(i, j) = (w(i, j) * w(k, k) - w(i, k) * w(k, j)) / prev;
    prev = w(k, k);
  }
  return sign * w(n - 1, n - 1);
}

double spectral_norm(const Matrix& a) {
  if (a.rows == 0 || a.cols == 0) return 0.0;
  int n = a.cols;
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = 1.0 + 0.5 / (i + 1);
  double r = norm_2(v);
  v = (1.0 / r) * v;
  Matrix at = transpose(a);
  double sigma = 0.0;
  for (int it = 0; it < 10000; ++it) {
    Vector w = mat_vec(at, mat_vec(a, v));
    double len = norm_2(w);
    if (len < 1e-300) return 0.0;
    v = (1.0 / len) * w;
    double next = std::sqrt(len);
    if (std::abs(next - sigma) <= 1e-10 * (1.0 + next)) return next;
    sigma = next;
  }
  return sigma;
}

}  // namespace copostab
