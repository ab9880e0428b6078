#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "copostab/errors.hpp"
#include "copostab/linalg.hpp"
#include "copostab/lp.hpp"
#include "copostab/qp.hpp"
#include "copostab/rng.hpp"
#include "copostab/tol.hpp"
#include "test_util.hpp"

using namespace copostab;

TEST_CASE("solve_linear identity and diagonal") {
  Vector x = solve_linear(Matrix::identity(3), {1, 2, 3});
  CHECK(x[0] == doctest::Approx(1).epsilon(1e-12));
  CHECK(x[1] == doctest::Approx(2).epsilon(1e-12));
  CHECK(x[2] == doctest::Approx(3).epsilon(1e-12));

  Vector y = solve_linear(Matrix::from_rows({{2, 0}, {0, 4}}), {2, 8});
  CHECK(y[0] == doctest::Approx(1).epsilon(1e-12));
  CHECK(y[1] == doctest::Approx(2).epsilon(1e-12));
}

TEST_CASE("solve_linear hand-elimination oracle") {
  // [[1,1],[1,-1]] x = (3,1): subtracting rows gives 2*x2 = 2, so x = (2,1).
  Vector x = solve_linear(Matrix::from_rows({{1, 1}, {1, -1}}), {3, 1});
  CHECK(x[0] == doctest::Approx(2).epsilon(1e-12));
  CHECK(x[1] == doctest::Approx(1).epsilon(1e-12));
}

TEST_CASE("solve_linear error cases") {
  CHECK_THROWS_AS(solve_linear(Matrix::from_rows({{1, 1}, {1, 1}}), {1, 2}), SingularError);
  CHECK_THROWS_AS(solve_linear(Matrix::from_rows({{1, 1}}), {1}), DimensionError);
  CHECK_THROWS_AS(solve_linear(Matrix::identity(2), {1, 2, 3}), DimensionError);
}

TEST_CASE("solve_linear random residual property") {
  Rng rng(101);
  int done = 0;
  while (done < 200) {
    int n = 1 + rng.uniform_int(6);
    Matrix a = rng.random_matrix(n, n, -2.0, 2.0);
    Vector b(n);
    for (double& v : b) v = rng.uniform(-5.0, 5.0);
    Vector x;
    try {
      x = solve_linear(a, b);
    } catch (const SingularError&) {
      continue;
    }
    Vector r = mat_vec(a, x) - b;
    CHECK(norm_inf(r) <= 1e-9 * (1.0 + norm_inf(b)));
    ++done;
  }
}

TEST_CASE("is_positive_definite basics") {
  CHECK(is_positive_definite(Matrix::identity(2)));
  CHECK_FALSE(is_positive_definite(-1.0 * Matrix::identity(2)));
  // eigenvalues of [[1,2],[2,1]] are {3,-1}
  CHECK_FALSE(is_positive_definite(Matrix::from_rows({{1, 2}, {2, 1}})));
  CHECK_THROWS_AS(is_positive_definite(Matrix::from_rows({{1, 2}, {0, 1}})), AsymmetryError);
}

TEST_CASE("is_positive_definite agrees with eigenvalue oracle (2x2, 3x3)") {
  Rng rng(202);
  int checked = 0;
  while (checked < 600) {
    int n = 2 + rng.uniform_int(2);
    Matrix s = rng.random_symmetric(n, -1.5, 1.5);
    double emin = testutil::min_eigenvalue(s);
    if (std::abs(emin) < 1e-8) continue;  // boundary draws are tolerance-ambiguous
    CHECK(is_positive_definite(s) == (emin > 0.0));
    ++checked;
  }
}

TEST_CASE("is_positive_definite agrees with leading-minor signs (2x2..5x5)") {
  Rng rng(203);
  int checked = 0;
  while (checked < 1000) {
    int n = 2 + rng.uniform_int(4);
    Matrix s = rng.random_symmetric(n, -1.5, 1.5);
    bool sylvester = true;
    double margin = 1e300;
    for (int k = 1; k <= n; ++k) {
      double d = det_fraction_free(s.block(0, 0, k, k));
      margin = std::min(margin, std::abs(d));
      if (d <= 0.0) sylvester = false;
    }
    if (margin < 1e-6) continue;
    CHECK(is_positive_definite(s) == sylvester);
    ++checked;
  }
}

TEST_CASE("det_fraction_free known values") {
  CHECK(det_fraction_free(Matrix::identity(3)) == doctest::Approx(1.0));
  CHECK(det_fraction_free(Matrix::from_rows({{0, 1}, {1, 0}})) == doctest::Approx(-1.0));
  CHECK(det_fraction_free(Matrix::from_rows({{1, 2}, {2, 4}})) == doctest::Approx(0.0));
  CHECK(det_fraction_free(Matrix::from_rows({{2, 1, 0}, {1, 2, 1}, {0, 1, 2}})) ==
        doctest::Approx(4.0));
}

TEST_CASE("spectral_norm known values") {
  CHECK(spectral_norm(Matrix::from_rows({{3, 0}, {0, -4}})) == doctest::Approx(4.0).epsilon(1e-8));
  CHECK(spectral_norm(Matrix::from_rows({{0, 2}, {0, 0}})) == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(spectral_norm(Matrix(2, 2)) == doctest::Approx(0.0));
}

TEST_CASE("spectral_norm dominates sampled Rayleigh quotients") {
  Rng rng(204);
  for (int t = 0; t < 50; ++t) {
    int r = 1 + rng.uniform_int(4), c = 1 + rng.uniform_int(4);
    Matrix a = rng.random_matrix(r, c, -2.0, 2.0);
    double sigma = spectral_norm(a);
    for (int s = 0; s < 50; ++s) {
      Vector v = rng.unit_sphere(c);
      CHECK(norm_2(mat_vec(a, v)) <= sigma + 1e-7);
    }
  }
}

static Polytope box01(int n) {
  Polytope p(n);
  for (int i = 0; i < n; ++i) {
    Vector lo(n, 0.0), hi(n, 0.0);
    lo[i] = 1.0;
    p.add_ineq(lo, 0.0);
    hi[i] = -1.0;
    p.add_ineq(hi, -1.0);
  }
  return p;
}

TEST_CASE("lp_solve bounded box") {
  Polytope p = box01(1);
  LpResult r = lp_maximize({1.0}, p);
  CHECK(r.status == LpStatus::Optimal);
  CHECK(r.value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.v[0] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("lp_solve degenerate optimum on simplex") {
  Polytope p(2);
  p.add_ineq({1, 0}, 0.0);
  p.add_ineq({0, 1}, 0.0);
  p.add_eq({1, 1}, 1.0);
  LpResult r = lp_maximize({1.0, 1.0}, p);
  CHECK(r.status == LpStatus::Optimal);
  CHECK(r.value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(p.contains(r.v, tol::feas));
}

TEST_CASE("lp_solve unbounded and infeasible") {
  Polytope up(1);
  up.add_ineq({1.0}, 0.0);
  CHECK(lp_maximize({1.0}, up).status == LpStatus::Unbounded);

  Polytope ip(1);
  ip.add_ineq({1.0}, 1.0);    // v >= 1
  ip.add_ineq({-1.0}, 0.0);   // v <= 0
  CHECK(lp_maximize({1.0}, ip).status == LpStatus::Infeasible);
}

TEST_CASE("lp_solve row permutation invariance") {
  Rng rng(305);
  for (int t = 0; t < 100; ++t) {
    int n = 2 + rng.uniform_int(4);
    Polytope p = box01(n);
    int extra = rng.uniform_int(4);
    for (int k = 0; k < extra; ++k) {
      Vector row(n);
      for (double& x : row) x = rng.uniform(-1.0, 1.0);
      p.add_ineq(row, rng.uniform(-1.5, 0.2));
    }
    Vector c(n);
    for (double& x : c) x = rng.uniform(-1.0, 1.0);
    LpResult r1 = lp_maximize(c, p);

    Polytope q(n);
    std::vector<int> order(p.n_ineq());
    for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    for (int i = static_cast<int>(order.size()) - 1; i > 0; --i)
      std::swap(order[i], order[rng.uniform_int(i + 1)]);
    for (int i : order) {
      Vector row(n);
      for (int j = 0; j < n; ++j) row[j] = p.ineq_lhs(i, j);
      q.add_ineq(row, p.ineq_rhs[i]);
    }
    LpResult r2 = lp_maximize(c, q);
    REQUIRE(r1.status == r2.status);
    if (r1.status == LpStatus::Optimal) {
      CHECK(std::abs(r1.value - r2.value) <= 1e-10 * (1.0 + std::abs(r1.value)));
      CHECK(p.contains(r1.v, tol::feas));
    }
  }
}

TEST_CASE("lp_solve free-variable problem") {
  // maximize -v over {v >= -3} hits the lower bound with a negative optimum.
  Polytope p(1);
  p.add_ineq({1.0}, -3.0);
  LpResult r = lp_maximize({-1.0}, p);
  CHECK(r.status == LpStatus::Optimal);
  CHECK(r.v[0] == doctest::Approx(-3.0).epsilon(1e-12));
  CHECK(r.value == doctest::Approx(3.0).epsilon(1e-12));
}

static Polytope simplex_polytope(int n) {
  Polytope p(n);
  for (int i = 0; i < n; ++i) {
    Vector row(n, 0.0);
    row[i] = 1.0;
    p.add_ineq(row, 0.0);
  }
  p.add_eq(Vector(n, 1.0), 1.0);
  return p;
}

TEST_CASE("qp_global_min spec examples") {
  Polytope p = simplex_polytope(2);
  QpResult zero = qp_global_min(Matrix(2, 2), p);
  CHECK_FALSE(zero.empty);
  CHECK(zero.value == doctest::Approx(0.0));

  QpResult iso = qp_global_min(Matrix::identity(2), p);
  CHECK(iso.value == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(iso.arg[0] == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(iso.arg[1] == doctest::Approx(0.5).epsilon(1e-8));

  QpResult ind = qp_global_min(Matrix::from_rows({{1, 0}, {0, -1}}), p);
  CHECK(ind.value == doctest::Approx(-1.0).epsilon(1e-10));
  CHECK(ind.arg[0] == doctest::Approx(0.0));
  CHECK(ind.arg[1] == doctest::Approx(1.0));
}

TEST_CASE("qp_global_min empty set") {
  Polytope p = simplex_polytope(2);
  p.add_eq({1, 1}, 2.0);  // contradicts sum = 1
  CHECK(qp_global_min(Matrix::identity(2), p).empty);
}

TEST_CASE("qp_global_min tolerates redundant equalities") {
  Polytope p = simplex_polytope(3);
  p.add_eq(Vector(3, 1.0), 1.0);  // duplicate row
  p.add_eq(Vector(3, 2.0), 2.0);  // scaled duplicate
  QpResult r = qp_global_min(Matrix::identity(3), p);
  CHECK_FALSE(r.empty);
  CHECK(r.value == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
}

TEST_CASE("qp_global_min dominates rejection sampling") {
  Rng rng(406);
  for (int t = 0; t < 60; ++t) {
    int n = 2 + rng.uniform_int(4);
    Matrix q = rng.random_symmetric(n, -2.0, 2.0);
    Polytope p = simplex_polytope(n);
    QpResult r = qp_global_min(q, p);
    REQUIRE_FALSE(r.empty);
    CHECK(p.contains(r.arg, tol::feas));
    CHECK(std::abs(quad_form(q, r.arg) - r.value) <= 1e-10 * (1.0 + std::abs(r.value)));
    for (int s = 0; s < 200; ++s) {
      Vector v = testutil::simplex_sample(rng, n);
      CHECK(r.value <= quad_form(q, v) + 1e-9);
    }
  }
}

TEST_CASE("qp_global_min concave case equals vertex minimum") {
  Rng rng(407);
  for (int t = 0; t < 60; ++t) {
    int n = 2 + rng.uniform_int(4);
    Matrix b = rng.random_matrix(n, n, -1.0, 1.0);
    Matrix q = mirror_upper(-1.0 * (transpose(b) * b));
    Polytope p = simplex_polytope(n);
    QpResult r = qp_global_min(q, p);
    double vmin = 1e300;
    for (int i = 0; i < n; ++i) vmin = std::min(vmin, q(i, i));
    CHECK(r.value == doctest::Approx(vmin).epsilon(1e-8));
  }
}

TEST_CASE("qp_global_min_all returns tied minimizers deterministically") {
  // x^T diag(-1,-1) x on the simplex: both vertices attain -1.
  Polytope p = simplex_polytope(2);
  QpMinima m = qp_global_min_all(-1.0 * Matrix::identity(2), p, 1e-9);
  REQUIRE_FALSE(m.empty);
  CHECK(m.value == doctest::Approx(-1.0));
  CHECK(m.args.size() == 2);
}
