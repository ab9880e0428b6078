#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "copostab/lp.hpp"
#include "copostab/lyapunov.hpp"
#include "copostab/system.hpp"
#include "copostab/tol.hpp"

namespace copostab {

// Which nonconvex cone a piece slices. Free is the whole space (positivity
// side of a state-only certificate); Graph is the set of (x, lambda) pairs
// solving the complementarity condition at x; GraphStep extends Graph with
// the multiplier of the successor state.
enum class PieceMode { Free, Graph, GraphStep };

// One polyhedral piece of a cone intersected with the unit 1-norm sphere,
// selected by an orthant of x and the supports of the multipliers.
struct ConePattern {
  PieceMode mode = PieceMode::Free;
  uint32_t sigma = 0;  // bit i set: x_i <= 0 on this piece
  uint32_t z = 0;      // support of lambda (bit i set: lambda_i may be > 0)
  uint32_t w = 0;      // support of the successor multiplier (GraphStep only)
  int index = 0;       // position in enumeration order; ties reduce by index
};

struct Piece {
  ConePattern pattern;
  Polytope poly;
};

// The 2^n orthant slices of the 1-norm sphere in R^n.
std::vector<Piece> enumerate_orthant_pieces(int n);

// All nonempty pieces of the graph cone (mode Graph, over (x, lambda)) or of
// the one-step extended cone (mode GraphStep, over (x, lambda, lambda_next)),
// pruned by an emptiness test. Throws BudgetError past the enumeration cap.
std::vector<Piece> enumerate_pieces(const Dlcs& sys, PieceMode mode);

// Accumulated cut vectors, all on the unit 1-norm sphere of their cone.
struct CutSet {
  std::vector<Vector> u_cuts;  // positivity side
  std::vector<Vector> v_cuts;  // decrease side
};

struct MasterResult {
  double mu = 0.0;
  Matrix p;
};

// Maximize mu subject to u'Pu >= mu for stored u, -v'M(P)v >= mu for stored
// v, and |P_ij| <= 1, over symmetric P of the mode's dimension. Always
// solvable (P = 0, mu = 0 is feasible; the box plus a cap keep it bounded).
MasterResult master_solve(const CutSet& cuts, CertificateKind mode, const Dlcs& sys);

struct SeparationResult {
  double nu = 0.0;
  Vector witness;       // an argmin, in the cone's ambient coordinates
  int piece_index = -1; // enumeration index of the attaining piece
};

// Global minimum of u'Pu over the union of pieces. Exact: every piece is
// minimized by complete active-set enumeration. With fast_exit, a piece
// reaching a nonpositive value short-circuits the remaining pieces.
SeparationResult separate_pos(const Matrix& p, const std::vector<Piece>& pieces,
                              bool fast_exit = false);

// Global minimum of -v'M(P)v over the union of pieces, where M is the
// one-step decrease form of the mode (state-only or extended).
SeparationResult separate_decrease(const Matrix& p, const Dlcs& sys, CertificateKind mode,
                                   const std::vector<Piece>& pieces,
                                   bool fast_exit = false);

enum class CpaStatus { Feasible, Infeasible, IterationLimit };

struct IterationRecord {
  double mu = 0.0;
  std::optional<double> nu1;
  std::optional<double> nu2;
  bool added_u = false;
  bool added_v = false;
  // A violated witness duplicated an existing cut and no tied alternative
  // existed; the iteration still counts.
  bool degenerate = false;
};

struct CpaOptions {
  double eps = tol::default_eps;
  int max_iter = tol::default_max_iter;
  uint64_t seed = 0;
  bool fast_sep = false;
};

struct Verdict {
  CpaStatus status = CpaStatus::IterationLimit;
  CertificateKind mode = CertificateKind::Cqlf;
  std::optional<Matrix> certificate;
  // Feasible: certified strict-copositivity level min(nu1, nu2) at
  // termination. Infeasible / IterationLimit: final master optimum.
  double margin = 0.0;
  int iterations = 0;
  std::vector<IterationRecord> trace;
  CutSet cuts;  // final cut sets; on Infeasible they are the refutation
  int seed_u_count = 0;
  int seed_v_count = 0;
  std::vector<std::string> warnings;
  double seconds = 0.0;
};

// The alternating master / separation loop. Requires the complementarity
// matrix to have the zero-only degenerate-solution property; emits a warning
// when solvability for every state is not certified.
Verdict run_cutting_plane(const Dlcs& sys, CertificateKind mode,
                          const CpaOptions& opts = {});

}  // namespace copostab
