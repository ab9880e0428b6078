#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "copostab/matrix.hpp"

namespace copostab {

// Deterministic random source. mt19937_64 is bit-exact across platforms; the
// value mappings below are hand-rolled because the standard <random>
// distributions are implementation-defined and would break the
// identical-inputs => bitwise-identical-outputs contract.
class Rng {
 public:
  explicit Rng(uint64_t seed) : eng_(seed) {}

  uint64_t next_u64() { return eng_(); }

  // Uniform on [0, 1), 53-bit mantissa.
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n).
  int uniform_int(int n) {
    return n <= 1 ? 0 : static_cast<int>(eng_() % static_cast<uint64_t>(n));
  }

  // Box-Muller standard normal.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  Vector normal_vec(int n) {
    Vector v(n);
    for (double& x : v) x = normal();
    return v;
  }

  // Uniform on the Euclidean unit sphere in R^n.
  Vector unit_sphere(int n) {
    for (;;) {
      Vector v = normal_vec(n);
      double r = norm_2(v);
      if (r > 1e-12) return (1.0 / r) * v;
    }
  }

  Matrix random_matrix(int r, int c, double lo, double hi) {
    Matrix m(r, c);
    for (double& x : m.a) x = uniform(lo, hi);
    return m;
  }

  Matrix random_symmetric(int n, double lo, double hi) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) m(i, j) = m(j, i) = uniform(lo, hi);
    return m;
  }

 private:
  std::mt19937_64 eng_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace copostab
