#pragma once

#include <cstdint>
#include <utility>

#include "copostab/matrix.hpp"
#include "copostab/system.hpp"

namespace copostab {

enum class CertificateKind { Cqlf, Eqlf };

// Quadratic stability certificate: V(x) = x' P x (Cqlf, P is n_x square)
// or V(x, lambda) = [x; lambda]' P [x; lambda] (Eqlf, P is n_x+n_c square).
struct Certificate {
  CertificateKind kind = CertificateKind::Cqlf;
  Matrix p;
};

double lyapunov_value(const Certificate& cert, const Vector& x, const Vector& lambda);

// One-step decrease form for V(x) = x' P_xx x: the quadratic form in
// (x, lambda) whose value is V(A x + C lambda) - V(x).
Matrix build_M(const Dlcs& sys, const Matrix& p_xx);

// One-step decrease form for the extended function: quadratic in
// (x, lambda, lambda_next) with value V(x_next, lambda_next) - V(x, lambda).
Matrix build_Mhat(const Dlcs& sys, const Matrix& p);

// Continuous-time decrease form: quadratic in (x, lambda) with value
// d/dt V(x) = x'(A~'P + PA~)x + 2 x' P C~ lambda.
Matrix build_Q_cqlf(const Lcs& sys, const Matrix& p_xx);

// Both sides of the decrease identity, for testing: quadratic-form value vs
// the explicit difference of Lyapunov values.
std::pair<double, double> eval_decrease_identity(const Dlcs& sys, const Matrix& p_xx,
                                                 const Vector& x, const Vector& lambda);
std::pair<double, double> eval_decrease_identity(const Dlcs& sys, const Matrix& p,
                                                 const Vector& x, const Vector& lambda,
                                                 const Vector& lambda_next);

struct ValidationReport {
  bool pass = false;
  bool positivity_ok = false;
  double max_increase = 0.0;   // worst one-step Lyapunov difference over all branches
  double decay = 0.0;          // worst fitted per-step geometric rate
  int trajectories = 0;
  long steps_checked = 0;
};

// Trajectory-based check: follows the lowest-pattern branch from unit-sphere
// initial states but evaluates the one-step decrease for every branch.
ValidationReport validate_certificate(const Dlcs& sys, const Certificate& cert,
                                      int n_traj = 100, int horizon = 200, uint64_t seed = 0);

// Multiplier-relaxation matrices for the cone-constrained conditions. The
// weight matrices act on the stacked constraint values and must be
// elementwise nonnegative (NegativityError otherwise); negative definiteness
// of the result certifies decrease on the constraint cone.
Matrix build_slemma_cqlf(const Dlcs& sys, const Matrix& p_xx, const Matrix& w);
std::pair<Matrix, Matrix> build_slemma_eqlf(const Dlcs& sys, const Matrix& p, const Matrix& w1,
                                            const Matrix& w2, const Matrix& w3);
bool negative_definite(const Matrix& m);

// Max-norm gap between the discrete one-step decrease form, pulled back
// through the scheme's implicit factor, and dt times the continuous decrease
// form. Second order in dt with a step-independent coefficient; identically
// zero for the midpoint scheme (theta = 1/2).
double decrease_residual_vs_continuous(const Lcs& sys, const Matrix& p_xx, double dt,
                                       double theta);

}  // namespace copostab
