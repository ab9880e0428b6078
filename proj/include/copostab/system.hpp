#pragma once

#include <cstdint>
#include <vector>

#include "copostab/lcp.hpp"
#include "copostab/matrix.hpp"
#include "copostab/rng.hpp"

namespace copostab {

// Continuous-time linear complementarity system
//   dx/dt = A~ x + C~ lambda,  0 <= lambda ⊥ D~ x + F~ lambda >= 0.
struct Lcs {
  Matrix a_tilde, c_tilde, d_tilde, f_tilde;
  int n_x() const { return a_tilde.rows; }
  int n_c() const { return f_tilde.rows; }
  void validate() const;
};

// Discrete-time system
//   x_{k+1} = A x_k + C lambda_{k+1},
//   0 <= lambda_{k+1} ⊥ D x_k + F lambda_{k+1} >= 0.
struct Dlcs {
  Matrix a, c, d, f;
  int n_x() const { return a.rows; }
  int n_c() const { return f.rows; }
  void validate() const;
};

// x_{k+1} = A x_k + C lambda_{k+1} + g,  complementarity on D x + F lambda + h.
struct InhomogeneousDlcs {
  Dlcs base;
  Vector g, h;
  void validate() const;
};

enum class BranchPolicy { Lex, Random, All };

struct Trajectory {
  std::vector<Vector> states;        // x_0 .. x_K
  std::vector<Vector> multipliers;   // lambda_1 .. lambda_K
  std::vector<uint32_t> branch_log;  // chosen support pattern per step
  std::vector<double> residuals;     // complementarity residual per step
  bool truncated = false;            // branch budget hit (policy All)
};

// theta-scheme time stepping with R = (I - theta dt A~)^{-1}:
//   A = I + dt R A~, C = dt R C~, D = D~ A, F = F~ + dt D~ R C~.
// Requires dt theta |A~| < 1 and dt |R A~| < 1 (spectral norms).
Dlcs discretize(const Lcs& lcs, double dt, double theta);

struct StepResult {
  Vector x_next;
  Vector lambda;
  uint32_t pattern = 0;
};

// One time step; policy Lex picks the lowest support pattern, Random draws
// uniformly among the LCP solutions (rng required).
StepResult step(const Dlcs& sys, const Vector& x, BranchPolicy policy, Rng* rng = nullptr);
StepResult step(const InhomogeneousDlcs& sys, const Vector& x, BranchPolicy policy,
                Rng* rng = nullptr);

// Lex/Random yield a single trajectory; All enumerates every branch
// breadth-first up to branch_budget trajectories.
std::vector<Trajectory> simulate(const Dlcs& sys, const Vector& x0, int steps,
                                 BranchPolicy policy, uint64_t seed, int branch_budget = 256);

Trajectory simulate_one(const Dlcs& sys, const Vector& x0, int steps,
                        BranchPolicy policy = BranchPolicy::Lex, uint64_t seed = 0);

struct Equilibrium {
  Vector x, lambda;
};

// All isolated equilibria found by complementarity-pattern enumeration;
// throws EmptyResult when no pattern admits one.
std::vector<Equilibrium> find_equilibrium(const InhomogeneousDlcs& sys);

// Homogeneous coordinates around an equilibrium: gamma rows drop, alpha rows
// are eliminated by a Schur complement in F_alpha_alpha, beta rows remain.
Dlcs reduce_inhomogeneous(const InhomogeneousDlcs& sys, const Equilibrium& eq);

// max of multiplier negativity, slack negativity and |lambda . w|
double complementarity_residual(const Vector& lambda, const Vector& slack);

}  // namespace copostab
