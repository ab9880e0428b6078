#include "copostab/system.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <string>

#include "copostab/errors.hpp"
#include "copostab/linalg.hpp"
#include "copostab/tol.hpp"

namespace copostab {

namespace {

std::vector<int> iota_indices(int n) {
  std::vector<int> idx(static_cast<size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  return idx;
}

void check_dims(const Matrix& a, const Matrix& c, const Matrix& d, const Matrix& f,
                const char* what) {
  const int nx = a.rows;
  const int nc = f.rows;
  if (a.cols != nx) throw DimensionError(std::string(what) + ": state matrix must be square");
  if (f.cols != nc) throw DimensionError(std::string(what) + ": coupling matrix must be square");
  if (c.rows != nx || c.cols != nc)
    throw DimensionError(std::string(what) + ": input matrix must be n_x by n_c");
  if (d.rows != nc || d.cols != nx)
    throw DimensionError(std::string(what) + ": output matrix must be n_c by n_x");
}

}  // namespace

void Lcs::validate() const { check_dims(a_tilde, c_tilde, d_tilde, f_tilde, "Lcs"); }

void Dlcs::validate() const { check_dims(a, c, d, f, "Dlcs"); }

void InhomogeneousDlcs::validate() const {
  base.validate();
  if (static_cast<int>(g.size()) != base.n_x())
    throw DimensionError("InhomogeneousDlcs: state offset must have length n_x");
  if (static_cast<int>(h.size()) != base.n_c())
    throw DimensionError("InhomogeneousDlcs: output offset must have length n_c");
}

double complementarity_residual(const Vector& lambda, const Vector& slack) {
  if (lambda.size() != slack.size())
    throw DimensionError("complementarity_residual: length mismatch");
  double res = 0.0;
  for (double v : lambda) res = std::max(res, -v);
  for (double v : slack) res = std::max(res, -v);
  res = std::max(res, std::abs(dot(lambda, slack)));
  return res;
}

Dlcs discretize(const Lcs& lcs, double dt, double theta) {
  lcs.validate();
  if (!(dt > 0.0)) throw InputError("discretize: step size must be positive");
  if (!(theta >= 0.0 && theta <= 1.0))
    throw InputError("discretize: scheme parameter must lie in [0, 1]");

  const int nx = lcs.n_x();
  const double norm_a = spectral_norm(lcs.a_tilde);
  if (!(dt * theta * norm_a < 1.0))
    throw StepSizeError("discretize: dt * theta * |state matrix| = " +
                        std::to_string(dt * theta * norm_a) + " must be below 1");

  // R = (I - theta dt A~)^{-1}; apply it by solving against both A~ and C~.
  Matrix lhs = Matrix::identity(nx) + (-theta * dt) * lcs.a_tilde;
  Matrix ra = solve_linear_multi(lhs, lcs.a_tilde);
  Matrix rc = solve_linear_multi(lhs, lcs.c_tilde);

  const double norm_ra = spectral_norm(ra);
  if (!(dt * norm_ra < 1.0))
    throw StepSizeError("discretize: dt * |resolvent state matrix| = " +
                        std::to_string(dt * norm_ra) + " must be below 1");

  Dlcs out;
  out.a = Matrix::identity(nx) + dt * ra;
  out.c = dt * rc;
  out.d = lcs.d_tilde * out.a;
  out.f = lcs.f_tilde + dt * (lcs.d_tilde * rc);
  return out;
}

namespace {

StepResult step_impl(const Dlcs& sys, const Vector& x, const Vector* g, const Vector* h,
                     BranchPolicy policy, Rng* rng) {
  if (static_cast<int>(x.size()) != sys.n_x())
    throw DimensionError("step: state length must be n_x");
  Vector q = mat_vec(sys.d, x);
  if (h) q = q + *h;
  std::vector<LcpSolution> sols = lcp_solve_all(LcpInstance{q, sys.f});
  if (sols.empty()) throw NoSolutionError("step: no multiplier satisfies the contact problem");

  size_t pick = 0;
  if (policy == BranchPolicy::Random) {
    if (!rng) throw InputError("step: random branch policy needs a generator");
    pick = static_cast<size_t>(rng->uniform_int(static_cast<int>(sols.size())));
  } else if (policy == BranchPolicy::All) {
    throw InputError("step: branch enumeration is handled by simulate");
  }

  StepResult r;
  r.lambda = sols[pick].lambda;
  r.pattern = sols[pick].pattern;
  r.x_next = mat_vec(sys.a, x) + mat_vec(sys.c, r.lambda);
  if (g) r.x_next = r.x_next + *g;
  return r;
}

}  // namespace

StepResult step(const Dlcs& sys, const Vector& x, BranchPolicy policy, Rng* rng) {
  sys.validate();
  return step_impl(sys, x, nullptr, nullptr, policy, rng);
}

StepResult step(const InhomogeneousDlcs& sys, const Vector& x, BranchPolicy policy, Rng* rng) {
  sys.validate();
  return step_impl(sys.base, x, &sys.g, &sys.h, policy, rng);
}

std::vector<Trajectory> simulate(const Dlcs& sys, const Vector& x0, int steps,
                                 BranchPolicy policy, uint64_t seed, int branch_budget) {
  sys.validate();
  if (static_cast<int>(x0.size()) != sys.n_x())
    throw DimensionError("simulate: initial state length must be n_x");
  if (steps < 0) throw InputError("simulate: step count must be nonnegative");

  if (policy != BranchPolicy::All) {
    Rng rng(seed);
    Trajectory traj;
    traj.states.push_back(x0);
    for (int k = 0; k < steps; ++k) {
      StepResult r;
      try {
        r = step_impl(sys, traj.states.back(), nullptr, nullptr, policy, &rng);
      } catch (const NoSolutionError& e) {
        throw NoSolutionError(std::string(e.what()) + " (at step " + std::to_string(k) + ")");
      }
      Vector slack = mat_vec(sys.d, traj.states.back()) + mat_vec(sys.f, r.lambda);
      traj.residuals.push_back(complementarity_residual(r.lambda, slack));
      traj.states.push_back(r.x_next);
      traj.multipliers.push_back(r.lambda);
      traj.branch_log.push_back(r.pattern);
    }
    return {traj};
  }

  if (branch_budget < 1) throw InputError("simulate: branch budget must be positive");
  std::vector<Trajectory> frontier;
  Trajectory root;
  root.states.push_back(x0);
  frontier.push_back(root);
  for (int k = 0; k < steps; ++k) {
    std::vector<Trajectory> next;
    bool truncated = false;
    for (const Trajectory& t : frontier) {
      Vector q = mat_vec(sys.d, t.states.back());
      std::vector<LcpSolution> sols = lcp_solve_all(LcpInstance{q, sys.f});
      if (sols.empty())
        throw NoSolutionError("simulate: no multiplier satisfies the contact problem (at step " +
                              std::to_string(k) + ")");
      for (const LcpSolution& s : sols) {
        if (static_cast<int>(next.size()) >= branch_budget) {
          truncated = true;
          break;
        }
        Trajectory ext = t;
        ext.states.push_back(mat_vec(sys.a, t.states.back()) + mat_vec(sys.c, s.lambda));
        ext.multipliers.push_back(s.lambda);
        ext.branch_log.push_back(s.pattern);
        ext.residuals.push_back(complementarity_residual(s.lambda, s.slack));
        next.push_back(std::move(ext));
      }
      if (truncated) break;
    }
    if (truncated)
      for (Trajectory& t : next) t.truncated = true;
    frontier = std::move(next);
  }
  return frontier;
}

Trajectory simulate_one(const Dlcs& sys, const Vector& x0, int steps, BranchPolicy policy,
                        uint64_t seed) {
  if (policy == BranchPolicy::All)
    throw InputError("simulate_one: branch enumeration yields multiple trajectories");
  return simulate(sys, x0, steps, policy, seed).front();
}

std::vector<Equilibrium> find_equilibrium(const InhomogeneousDlcs& sys) {
  sys.validate();
  const Dlcs& b = sys.base;
  const int nx = b.n_x();
  const int nc = b.n_c();
  if (nc > tol::max_enum_dim)
    throw DimensionError("find_equilibrium: too many contacts for pattern enumeration");

  const std::vector<int> all_x = iota_indices(nx);
  const std::vector<int> all_c = iota_indices(nc);
  Matrix i_minus_a = Matrix::identity(nx) + (-1.0) * b.a;

  std::vector<Equilibrium> found;
  for (uint32_t mask = 0; mask < (1u << nc); ++mask) {
    std::vector<int> sup;
    for (int i = 0; i < nc; ++i)
      if (mask & (1u << i)) sup.push_back(i);
    const int ns = static_cast<int>(sup.size());

    // Solve (I - A) x - C_sup lam_sup = g together with the active output
    // rows D_sup x + F_sup_sup lam_sup = -h_sup.
    Matrix sysm(nx + ns, nx + ns);
    Vector rhs(static_cast<size_t>(nx + ns), 0.0);
    sysm.set_block(0, 0, i_minus_a);
    if (ns > 0) {
      sysm.set_block(0, nx, (-1.0) * b.c.select(all_x, sup));
      sysm.set_block(nx, 0, b.d.select(sup, all_x));
      sysm.set_block(nx, nx, b.f.select(sup, sup));
    }
    for (int i = 0; i < nx; ++i) rhs[static_cast<size_t>(i)] = sys.g[static_cast<size_t>(i)];
    for (int i = 0; i < ns; ++i)
      rhs[static_cast<size_t>(nx + i)] = -sys.h[static_cast<size_t>(sup[static_cast<size_t>(i)])];

    Vector sol;
    try {
      sol = solve_linear(sysm, rhs);
    } catch (const SingularError&) {
      continue;  // pattern has no isolated equilibrium
    }

    Vector x(sol.begin(), sol.begin() + nx);
    Vector lambda(static_cast<size_t>(nc), 0.0);
    bool ok = true;
    for (int i = 0; i < ns; ++i) {
      double v = sol[static_cast<size_t>(nx + i)];
      if (v < -tol::feas) {
        ok = false;
        break;
      }
      lambda[static_cast<size_t>(sup[static_cast<size_t>(i)])] = std::max(v, 0.0);
    }
    if (!ok) continue;
    Vector slack = mat_vec(b.d, x) + mat_vec(b.f, lambda) + sys.h;
    for (int i = 0; i < nc; ++i)
      if (slack[static_cast<size_t>(i)] < -tol::feas) {
        ok = false;
        break;
      }
    if (!ok) continue;

    Vector key = concat(x, lambda);
    bool dup = false;
    for (const Equilibrium& e : found) {
      Vector other = concat(e.x, e.lambda);
      double dist = 0.0;
      for (size_t i = 0; i < key.size(); ++i) dist = std::max(dist, std::abs(key[i] - other[i]));
      if (dist <= tol::dedup) {
        dup = true;
        break;
      }
    }
    if (!dup) found.push_back(Equilibrium{x, lambda});
  }

  if (found.empty()) throw EmptyResult("find_equilibrium: no pattern admits an equilibrium");
  return found;
}

Dlcs reduce_inhomogeneous(const InhomogeneousDlcs& sys, const Equilibrium& eq) {
  sys.validate();
  const Dlcs& b = sys.base;
  const int nx = b.n_x();
  const int nc = b.n_c();
  if (static_cast<int>(eq.x.size()) != nx || static_cast<int>(eq.lambda.size()) != nc)
    throw DimensionError("reduce_inhomogeneous: equilibrium has wrong dimensions");
  if (!is_P_matrix(b.f))
    throw PreconditionError(
        "reduce_inhomogeneous: coupling matrix must have positive principal minors");

  Vector slack = mat_vec(b.d, eq.x) + mat_vec(b.f, eq.lambda) + sys.h;
  IndexPartition part = index_partition(eq.lambda, slack, tol::comp);
  const std::vector<int>& al = part.alpha;
  const std::vector<int>& be = part.beta;
  const std::vector<int> all_x = iota_indices(nx);

  Dlcs out;
  if (al.empty()) {
    out.a = b.a;
    out.c = b.c.select(all_x, be);
    out.d = b.d.select(be, all_x);
    out.f = b.f.select(be, be);
    return out;
  }

  Matrix f_aa = b.f.select(al, al);
  Matrix inv_d = solve_linear_multi(f_aa, b.d.select(al, all_x));  // F_aa^{-1} D_a.
  Matrix c_a = b.c.select(all_x, al);
  out.a = b.a + (-1.0) * (c_a * inv_d);
  if (be.empty()) {
    out.c = Matrix(nx, 0);
    out.d = Matrix(0, nx);
    out.f = Matrix(0, 0);
    return out;
  }
  Matrix inv_fab = solve_linear_multi(f_aa, b.f.select(al, be));  // F_aa^{-1} F_ab.
  Matrix f_ba = b.f.select(be, al);
  out.c = b.c.select(all_x, be) + (-1.0) * (c_a * inv_fab);
  out.d = b.d.select(be, all_x) + (-1.0) * (f_ba * inv_d);
  out.f = b.f.select(be, be) + (-1.0) * (f_ba * inv_fab);
  return out;
}

}  // namespace copostab
