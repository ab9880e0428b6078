#include "copostab/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "copostab/errors.hpp"
#include "copostab/lcp.hpp"
#include "copostab/linalg.hpp"
#include "copostab/rng.hpp"
#include "copostab/tol.hpp"

namespace copostab {

namespace {

void require_symmetric(const Matrix& m, const char* what) {
  if (m.rows != m.cols) throw DimensionError(std::string(what) + ": matrix must be square");
  if (asymmetry(m) > tol::sym)
    throw AsymmetryError(std::string(what) + ": matrix is not symmetric");
}

struct XxBlocks {
  Matrix m11, m12, m22;  // state-state, state-multiplier, multiplier-multiplier
};

// Shared evaluation of the P_xx part so the extended form embeds the plain
// form bit-for-bit when the extra blocks vanish.
XxBlocks xx_blocks(const Dlcs& sys, const Matrix& pxx) {
  Matrix pa = pxx * sys.a;
  Matrix pc = pxx * sys.c;
  Matrix at = transpose(sys.a);
  XxBlocks b;
  b.m11 = at * pa + (-1.0) * pxx;
  b.m12 = at * pc;
  b.m22 = transpose(sys.c) * pc;
  return b;
}

}  // namespace

double lyapunov_value(const Certificate& cert, const Vector& x, const Vector& lambda) {
  if (cert.kind == CertificateKind::Cqlf) return quad_form(cert.p, x);
  return quad_form(cert.p, concat(x, lambda));
}

Matrix build_M(const Dlcs& sys, const Matrix& p_xx) {
  sys.validate();
  const int nx = sys.n_x();
  const int nc = sys.n_c();
  if (p_xx.rows != nx || p_xx.cols != nx)
    throw DimensionError("build_M: certificate block must be n_x square");
  require_symmetric(p_xx, "build_M");

  XxBlocks b = xx_blocks(sys, p_xx);
  Matrix m(nx + nc, nx + nc);
  m.set_block(0, 0, b.m11);
  m.set_block(0, nx, b.m12);
  m.set_block(nx, nx, b.m22);
  m = mirror_upper(m);
  return m;
}

Matrix build_Mhat(const Dlcs& sys, const Matrix& p) {
  sys.validate();
  const int nx = sys.n_x();
  const int nc = sys.n_c();
  if (p.rows != nx + nc || p.cols != nx + nc)
    throw DimensionError("build_Mhat: certificate must be n_x+n_c square");
  require_symmetric(p, "build_Mhat");

  Matrix pxx = p.block(0, 0, nx, nx);
  Matrix pxl = p.block(0, nx, nx, nc);
  Matrix pll = p.block(nx, nx, nc, nc);

  XxBlocks b = xx_blocks(sys, pxx);
  Matrix m(nx + 2 * nc, nx + 2 * nc);
  m.set_block(0, 0, b.m11);
  m.set_block(0, nx, b.m12 + (-1.0) * pxl);
  m.set_block(0, nx + nc, transpose(sys.a) * pxl);
  m.set_block(nx, nx, b.m22 + (-1.0) * pll);
  m.set_block(nx, nx + nc, transpose(sys.c) * pxl);
  m.set_block(nx + nc, nx + nc, pll);
  m = mirror_upper(m);
  return m;
}

Matrix build_Q_cqlf(const Lcs& sys, const Matrix& p_xx) {
  sys.validate();
  const int nx = sys.n_x();
  const int nc = sys.n_c();
  if (p_xx.rows != nx || p_xx.cols != nx)
    throw DimensionError("build_Q_cqlf: certificate block must be n_x square");
  require_symmetric(p_xx, "build_Q_cqlf");

  Matrix q(nx + nc, nx + nc);
  q.set_block(0, 0, transpose(sys.a_tilde) * p_xx + p_xx * sys.a_tilde);
  q.set_block(0, nx, p_xx * sys.c_tilde);
  q = mirror_upper(q);
  return q;
}

std::pair<double, double> eval_decrease_identity(const Dlcs& sys, const Matrix& p_xx,
                                                 const Vector& x, const Vector& lambda) {
  if (static_cast<int>(x.size()) != sys.n_x() || static_cast<int>(lambda.size()) != sys.n_c())
    throw DimensionError("eval_decrease_identity: point has wrong dimensions");
  double lhs = quad_form(build_M(sys, p_xx), concat(x, lambda));
  Vector x_next = mat_vec(sys.a, x) + mat_vec(sys.c, lambda);
  double rhs = quad_form(p_xx, x_next) - quad_form(p_xx, x);
  return {lhs, rhs};
}

std::pair<double, double> eval_decrease_identity(const Dlcs& sys, const Matrix& p,
                                                 const Vector& x, const Vector& lambda,
                                                 const Vector& lambda_next) {
  if (static_cast<int>(x.size()) != sys.n_x() || static_cast<int>(lambda.size()) != sys.n_c() ||
      static_cast<int>(lambda_next.size()) != sys.n_c())
    throw DimensionError("eval_decrease_identity: point has wrong dimensions");
  double lhs = quad_form(build_Mhat(sys, p), concat(x, lambda, lambda_next));
  Vector x_next = mat_vec(sys.a, x) + mat_vec(sys.c, lambda);
  double rhs = quad_form(p, concat(x_next, lambda_next)) - quad_form(p, concat(x, lambda));
  return {lhs, rhs};
}

ValidationReport validate_certificate(const Dlcs& sys, const Certificate& cert, int n_traj,
                                      int horizon, uint64_t seed) {
  sys.validate();
  const int nx = sys.n_x();
  const int nc = sys.n_c();
  const bool extended = cert.kind == CertificateKind::Eqlf;
  const int want = extended ? nx + nc : nx;
  if (cert.p.rows != want || cert.p.cols != want)
    throw DimensionError("validate_certificate: certificate has wrong dimensions");
  require_symmetric(cert.p, "validate_certificate");
  if (n_traj < 1 || horizon < 1)
    throw InputError("validate_certificate: need at least one trajectory and one step");

  ValidationReport rep;
  rep.trajectories = n_traj;
  rep.positivity_ok = extended ? true : is_positive_definite(cert.p);
  rep.decay = 0.0;

  Rng rng(seed);
  for (int t = 0; t < n_traj; ++t) {
    Vector x = rng.unit_sphere(nx);
    double first_value = 0.0, last_value = 0.0;
    int value_count = 0;
    try {
      for (int k = 0; k < horizon; ++k) {
        // The dynamics are positively homogeneous, so every step is
        // evaluated at unit state scale: after the state has decayed by many
        // orders of magnitude, the contact solver's absolute tolerances
        // would otherwise admit branches that are wildly infeasible relative
        // to the state. s2 converts unit-scale quadratic values back to the
        // trajectory's true scale.
        const double s = norm_1(x);
        if (s <= 1e-300) break;  // converged to exact zero
        const double s2 = s * s;
        Vector xh = (1.0 / s) * x;
        std::vector<LcpSolution> sols = lcp_solve_all(LcpInstance{mat_vec(sys.d, xh), sys.f});
        if (sols.empty())
          throw NoSolutionError("validate_certificate: contact problem unsolvable");
        for (size_t b = 0; b < sols.size(); ++b) {
          const Vector& lam = sols[b].lambda;
          Vector xh_next = mat_vec(sys.a, xh) + mat_vec(sys.c, lam);
          double unit_here =
              extended ? quad_form(cert.p, concat(xh, lam)) : quad_form(cert.p, xh);
          double here = s2 * unit_here;
          if (extended) {
            if (unit_here <= 0.0) rep.positivity_ok = false;
            const double r = norm_1(xh_next);
            if (r <= 1e-300) {
              // zero successor: the continuation value is V(0, 0) = 0
              rep.max_increase = std::max(rep.max_increase, 0.0 - here);
              ++rep.steps_checked;
            } else {
              Vector xn = (1.0 / r) * xh_next;
              std::vector<LcpSolution> nexts =
                  lcp_solve_all(LcpInstance{mat_vec(sys.d, xn), sys.f});
              if (nexts.empty())
                throw NoSolutionError("validate_certificate: contact problem unsolvable");
              for (const LcpSolution& nb : nexts) {
                double there = s2 * r * r * quad_form(cert.p, concat(xn, nb.lambda));
                rep.max_increase = std::max(rep.max_increase, there - here);
                ++rep.steps_checked;
              }
            }
          } else {
            double there = s2 * quad_form(cert.p, xh_next);
            rep.max_increase = std::max(rep.max_increase, there - here);
            ++rep.steps_checked;
          }
          if (b == 0) {
            if (value_count == 0) first_value = here;
            last_value = here;
            ++value_count;
          }
        }
        // advance along the lowest-pattern branch at true scale
        x = s * (mat_vec(sys.a, xh) + mat_vec(sys.c, sols[0].lambda));
      }
      if (!extended) {
        // terminal state contributes the last value of V
        if (value_count == 0) first_value = quad_form(cert.p, x);
        last_value = quad_form(cert.p, x);
        ++value_count;
      }
    } catch (const NoSolutionError& e) {
      throw NoSolutionError(std::string(e.what()) + " (trajectory " + std::to_string(t) + ")");
    }
    if (value_count >= 2 && first_value > 1e-300) {
      double ratio = std::max(last_value, 0.0) / first_value;
      double rate = std::pow(ratio, 1.0 / static_cast<double>(value_count - 1));
      rep.decay = std::max(rep.decay, rate);
    }
  }
  rep.pass = rep.positivity_ok && rep.max_increase <= tol::decrease_slack;
  return rep;
}

namespace {

Matrix nonneg_weights(const Matrix& w, int dim, const char* what) {
  if (w.rows != dim || w.cols != dim)
    throw DimensionError(std::string(what) + ": weight matrix has wrong dimensions");
  require_symmetric(w, what);
  for (double v : w.a)
    if (v < 0.0) throw NegativityError(std::string(what) + ": weight matrix has negative entries");
  return w;
}

}  // namespace

Matrix build_slemma_cqlf(const Dlcs& sys, const Matrix& p_xx, const Matrix& w) {
  sys.validate();
  const int nx = sys.n_x();
  const int nc = sys.n_c();
  nonneg_weights(w, 2 * nc, "build_slemma_cqlf");

  Matrix h(2 * nc, nx + nc);
  h.set_block(0, 0, sys.d);
  h.set_block(0, nx, sys.f);
  h.set_block(nc, nx, Matrix::identity(nc));

  Matrix m = build_M(sys, p_xx) + transpose(h) * w * h;
  m = mirror_upper(m);
  return m;
}

std::pair<Matrix, Matrix> build_slemma_eqlf(const Dlcs& sys, const Matrix& p, const Matrix& w1,
                                            const Matrix& w2, const Matrix& w3) {
  sys.validate();
  const int nx = sys.n_x();
  const int nc = sys.n_c();
  nonneg_weights(w1, 2 * nc, "build_slemma_eqlf");
  nonneg_weights(w2, 2 * nc, "build_slemma_eqlf");
  nonneg_weights(w3, 2 * nc, "build_slemma_eqlf");
  if (p.rows != nx + nc || p.cols != nx + nc)
    throw DimensionError("build_slemma_eqlf: certificate must be n_x+n_c square");

  Matrix h(2 * nc, nx + nc);
  h.set_block(0, 0, sys.d);
  h.set_block(0, nx, sys.f);
  h.set_block(nc, nx, Matrix::identity(nc));

  Matrix j(2 * nc, nx + 2 * nc);
  j.set_block(0, 0, sys.d);
  j.set_block(0, nx, sys.f);
  j.set_block(nc, nx, Matrix::identity(nc));

  Matrix jp(2 * nc, nx + 2 * nc);
  jp.set_block(0, 0, sys.d * sys.a);
  jp.set_block(0, nx, sys.d * sys.c);
  jp.set_block(0, nx + nc, sys.f);
  jp.set_block(nc, nx + nc, Matrix::identity(nc));

  Matrix pos = p + (-1.0) * (transpose(h) * w1 * h);
  Matrix dec = build_Mhat(sys, p) + transpose(j) * w2 * j + transpose(jp) * w3 * jp;
  pos = mirror_upper(pos);
  dec = mirror_upper(dec);
  return {pos, dec};
}

bool negative_definite(const Matrix& m) { return is_positive_definite((-1.0) * m); }

double decrease_residual_vs_continuous(const Lcs& sys, const Matrix& p_xx, double dt,
                                       double theta) {
  Dlcs disc = discretize(sys, dt, theta);
  const int nx = disc.n_x();
  const int nc = disc.n_c();
  // The scheme's one-step map on (x, lambda) is the rational function
  // (I - theta dt E)^{-1} (I + (1-theta) dt E) of E = [[A~, C~],[0, 0]].
  // Pulling the decrease form back through the implicit factor
  // S = I - theta dt E cancels the resolvent series, leaving
  // S' M S = dt Q + dt^2 (1 - 2 theta) E' blkdiag(P,0) E exactly, so the
  // defect below is second order with a step-independent coefficient.
  Matrix e(nx + nc, nx + nc);
  e.set_block(0, 0, sys.a_tilde);
  e.set_block(0, nx, sys.c_tilde);
  Matrix s = Matrix::identity(nx + nc) + (-theta * dt) * e;
  Matrix gap =
      transpose(s) * build_M(disc, p_xx) * s + (-dt) * build_Q_cqlf(sys, p_xx);
  return max_abs(gap);
}

}  // namespace copostab
