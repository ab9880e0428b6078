#include "copostab/cpa.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "copostab/errors.hpp"
#include "copostab/lcp.hpp"
#include "copostab/qp.hpp"
#include "copostab/rng.hpp"

namespace copostab {

namespace {

Vector unit_row(int dim, int at, double val) {
  Vector r(dim, 0.0);
  r[at] = val;
  return r;
}

// Upper-triangle pair list for symmetric matrices of size n, row-major.
std::vector<std::pair<int, int>> upper_pairs(int n) {
  std::vector<std::pair<int, int>> ps;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) ps.emplace_back(i, j);
  return ps;
}

Matrix basis_matrix(int n, int i, int j) {
  Matrix e(n, n);
  e(i, j) = 1.0;
  e(j, i) = 1.0;
  return e;
}

Matrix decrease_form(const Dlcs& sys, CertificateKind mode, const Matrix& p) {
  return mode == CertificateKind::Cqlf ? build_M(sys, p) : build_Mhat(sys, p);
}

Vector normalized_1(const Vector& v) {
  double s = norm_1(v);
  if (s <= 0.0) throw Error("cannot normalize a zero cut vector");
  return (1.0 / s) * v;
}

bool duplicates_existing(const std::vector<Vector>& cuts, const Vector& cand) {
  for (const Vector& c : cuts) {
    if (c.size() != cand.size()) continue;
    double d = 0.0;
    for (size_t i = 0; i < c.size(); ++i) d = std::max(d, std::abs(c[i] - cand[i]));
    if (d <= tol::cut_dup) return true;
  }
  return false;
}

// Appends the witness unless it duplicates a stored cut; on duplication,
// retries with the tied minimizers of the attaining piece in lexicographic
// order. Returns false when every tied candidate is already present.
bool append_cut(std::vector<Vector>& cuts, const Vector& witness, const Matrix& q,
                const std::vector<Piece>& pieces, int piece_index) {
  Vector w = normalized_1(witness);
  if (!duplicates_existing(cuts, w)) {
    cuts.push_back(w);
    return true;
  }
  if (piece_index < 0 || piece_index >= static_cast<int>(pieces.size())) return false;
  QpMinima all = qp_global_min_all(q, pieces[piece_index].poly, 1e-9);
  if (all.empty) return false;
  std::sort(all.args.begin(), all.args.end());
  for (const Vector& cand : all.args) {
    if (norm_1(cand) <= 0.0) continue;
    Vector c = normalized_1(cand);
    if (!duplicates_existing(cuts, c)) {
      cuts.push_back(c);
      return true;
    }
  }
  return false;
}

}  // namespace

std::vector<Piece> enumerate_orthant_pieces(int n) {
  if (n <= 0) throw DimensionError("orthant piece dimension must be positive");
  if (n > tol::piece_budget) throw BudgetError("orthant enumeration dimension");
  std::vector<Piece> out;
  for (uint32_t sigma = 0; sigma < (1u << n); ++sigma) {
    Piece piece;
    piece.pattern.mode = PieceMode::Free;
    piece.pattern.sigma = sigma;
    piece.pattern.index = static_cast<int>(sigma);
    Polytope poly(n);
    Vector slice(n, 0.0);
    for (int i = 0; i < n; ++i) {
      double s = (sigma >> i) & 1u ? -1.0 : 1.0;
      poly.add_ineq(unit_row(n, i, s), 0.0);
      slice[i] = s;
    }
    poly.add_eq(slice, 1.0);
    piece.poly = std::move(poly);
    out.push_back(std::move(piece));
  }
  return out;
}

std::vector<Piece> enumerate_pieces(const Dlcs& sys, PieceMode mode) {
  if (mode == PieceMode::Free) throw InputError("free pieces carry no system; use the orthant enumerator");
  sys.validate();
  const int nx = sys.n_x();
  const int nc = sys.n_c();
  if (nx + 2 * nc > tol::piece_budget) throw BudgetError("cone piece enumeration size");
  const bool step = mode == PieceMode::GraphStep;
  const int dim = step ? nx + 2 * nc : nx + nc;

  const Matrix da = step ? sys.d * sys.a : Matrix();
  const Matrix dc = step ? sys.d * sys.c : Matrix();

  std::vector<Piece> out;
  int raw = 0;
  for (uint32_t sigma = 0; sigma < (1u << nx); ++sigma) {
    for (uint32_t z = 0; z < (1u << nc); ++z) {
      const uint32_t w_count = step ? (1u << nc) : 1u;
      for (uint32_t w = 0; w < w_count; ++w, ++raw) {
        Polytope poly(dim);
        Vector slice(dim, 0.0);
        for (int i = 0; i < nx; ++i) {
          double s = (sigma >> i) & 1u ? -1.0 : 1.0;
          poly.add_ineq(unit_row(dim, i, s), 0.0);
          slice[i] = s;
        }
        for (int j = 0; j < nc; ++j) {
          slice[nx + j] = 1.0;
          Vector lam_row = unit_row(dim, nx + j, 1.0);
          Vector slack_row(dim, 0.0);
          for (int k = 0; k < nx; ++k) slack_row[k] = sys.d(j, k);
          for (int k = 0; k < nc; ++k) slack_row[nx + k] = sys.f(j, k);
          if ((z >> j) & 1u) {
            poly.add_ineq(lam_row, 0.0);
            poly.add_eq(slack_row, 0.0);
          } else {
            poly.add_eq(lam_row, 0.0);
            poly.add_ineq(slack_row, 0.0);
          }
        }
        if (step) {
          for (int j = 0; j < nc; ++j) {
            slice[nx + nc + j] = 1.0;
            Vector lam_row = unit_row(dim, nx + nc + j, 1.0);
            Vector slack_row(dim, 0.0);
            for (int k = 0; k < nx; ++k) slack_row[k] = da(j, k);
            for (int k = 0; k < nc; ++k) slack_row[nx + k] = dc(j, k);
            for (int k = 0; k < nc; ++k) slack_row[nx + nc + k] = sys.f(j, k);
            if ((w >> j) & 1u) {
              poly.add_ineq(lam_row, 0.0);
              poly.add_eq(slack_row, 0.0);
            } else {
              poly.add_eq(lam_row, 0.0);
              poly.add_ineq(slack_row, 0.0);
            }
          }
        }
        poly.add_eq(slice, 1.0);
        if (!polytope_feasible(poly)) continue;
        Piece piece;
        piece.pattern.mode = mode;
        piece.pattern.sigma = sigma;
        piece.pattern.z = z;
        piece.pattern.w = w;
        piece.pattern.index = raw;
        piece.poly = std::move(poly);
        out.push_back(std::move(piece));
      }
    }
  }
  return out;
}

MasterResult master_solve(const CutSet& cuts, CertificateKind mode, const Dlcs& sys) {
  const int n = mode == CertificateKind::Cqlf ? sys.n_x() : sys.n_x() + sys.n_c();
  const auto pairs = upper_pairs(n);
  const int t = static_cast<int>(pairs.size());
  const int dim = 1 + t;  // [mu, upper-triangle entries of P]

  std::vector<Matrix> dec_basis;
  if (!cuts.v_cuts.empty()) {
    dec_basis.reserve(pairs.size());
    for (const auto& [i, j] : pairs)
      dec_basis.push_back(decrease_form(sys, mode, basis_matrix(n, i, j)));
  }

  Polytope poly(dim);
  for (const Vector& u : cuts.u_cuts) {
    if (static_cast<int>(u.size()) != n) throw DimensionError("positivity cut width");
    Vector row(dim, 0.0);
    row[0] = -1.0;
    for (int k = 0; k < t; ++k) {
      const auto& [i, j] = pairs[k];
      row[1 + k] = (i == j ? u[i] * u[i] : 2.0 * u[i] * u[j]);
    }
    poly.add_ineq(row, 0.0);
  }
  for (const Vector& v : cuts.v_cuts) {
    Vector row(dim, 0.0);
    row[0] = -1.0;
    for (int k = 0; k < t; ++k) row[1 + k] = -quad_form(dec_basis[k], v);
    poly.add_ineq(row, 0.0);
  }
  for (int k = 0; k < t; ++k) {
    poly.add_ineq(unit_row(dim, 1 + k, 1.0), -1.0);   // P_ij >= -1
    poly.add_ineq(unit_row(dim, 1 + k, -1.0), -1.0);  // P_ij <= 1
  }
  // Keeps the program bounded even before any cut exists.
  poly.add_ineq(unit_row(dim, 0, -1.0), -static_cast<double>(n + 1));

  LpResult lp = lp_maximize(unit_row(dim, 0, 1.0), poly);
  if (lp.status != LpStatus::Optimal) throw Error("master program failed to solve");

  MasterResult res;
  res.mu = lp.v[0];
  res.p = Matrix(n, n);
  for (int k = 0; k < t; ++k) {
    const auto& [i, j] = pairs[k];
    res.p(i, j) = lp.v[1 + k];
    res.p(j, i) = lp.v[1 + k];
  }
  return res;
}

namespace {

SeparationResult min_over_pieces(const Matrix& q, const std::vector<Piece>& pieces,
                                 bool fast_exit) {
  SeparationResult best;
  best.nu = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < pieces.size(); ++i) {
    if (q.rows != pieces[i].poly.dim()) throw DimensionError("piece dimension vs quadratic form");
    QpResult r = qp_global_min(q, pieces[i].poly);
    if (r.empty) continue;
    if (r.value < best.nu) {
      best.nu = r.value;
      best.witness = r.arg;
      best.piece_index = static_cast<int>(i);
    }
    if (fast_exit && best.nu <= 0.0) break;
  }
  return best;
}

}  // namespace

SeparationResult separate_pos(const Matrix& p, const std::vector<Piece>& pieces,
                              bool fast_exit) {
  return min_over_pieces(p, pieces, fast_exit);
}

SeparationResult separate_decrease(const Matrix& p, const Dlcs& sys, CertificateKind mode,
                                   const std::vector<Piece>& pieces, bool fast_exit) {
  Matrix q = -1.0 * decrease_form(sys, mode, p);
  return min_over_pieces(q, pieces, fast_exit);
}

Verdict run_cutting_plane(const Dlcs& sys, CertificateKind mode, const CpaOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  sys.validate();
  if (opts.eps <= 0.0) throw InputError("tolerance must be positive");
  if (opts.max_iter <= 0) throw InputError("iteration limit must be positive");

  Verdict verdict;
  verdict.mode = mode;

  SolvabilityClass cls = assert_solvability_class(sys.f);
  if (!cls.is_r0)
    throw PreconditionError("the contact matrix admits nonzero degenerate multipliers");
  if (!cls.q_matrix_certified)
    verdict.warnings.push_back(
        "multiplier existence is not certified for every state; proceeding");

  const int nx = sys.n_x();
  std::vector<Piece> pieces_pos = mode == CertificateKind::Cqlf
                                      ? enumerate_orthant_pieces(nx)
                                      : enumerate_pieces(sys, PieceMode::Graph);
  std::vector<Piece> pieces_dec = enumerate_pieces(
      sys, mode == CertificateKind::Cqlf ? PieceMode::Graph : PieceMode::GraphStep);

  CutSet cuts;
  if (mode == CertificateKind::Cqlf) {
    for (int i = 0; i < nx; ++i) {
      cuts.u_cuts.push_back(unit_row(nx, i, 1.0));
      cuts.u_cuts.push_back(unit_row(nx, i, -1.0));
    }
  } else {
    Rng rng(opts.seed);
    for (int k = 0; k < 2 * nx; ++k) {
      Vector x = rng.unit_sphere(nx);
      std::vector<LcpSolution> sols = lcp_solve_all({mat_vec(sys.d, x), sys.f});
      if (sols.empty()) continue;
      Vector cand = normalized_1(concat(x, sols.front().lambda));
      if (!duplicates_existing(cuts.u_cuts, cand)) cuts.u_cuts.push_back(cand);
    }
  }
  verdict.seed_u_count = static_cast<int>(cuts.u_cuts.size());
  verdict.seed_v_count = 0;

  auto finish = [&](CpaStatus status, double margin, std::optional<Matrix> cert) {
    verdict.status = status;
    verdict.margin = margin;
    verdict.certificate = std::move(cert);
    verdict.iterations = static_cast<int>(verdict.trace.size());
    verdict.cuts = cuts;
    verdict.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return verdict;
  };

  double last_mu = 0.0;
  for (int l = 0; l < opts.max_iter; ++l) {
    MasterResult master = master_solve(cuts, mode, sys);
    last_mu = master.mu;
    IterationRecord rec;
    rec.mu = master.mu;
    if (master.mu < opts.eps) {
      verdict.trace.push_back(rec);
      return finish(CpaStatus::Infeasible, master.mu, std::nullopt);
    }

    SeparationResult s1 = separate_pos(master.p, pieces_pos, opts.fast_sep);
    SeparationResult s2 =
        separate_decrease(master.p, sys, mode, pieces_dec, opts.fast_sep);
    rec.nu1 = s1.nu;
    rec.nu2 = s2.nu;

    if (std::min(s1.nu, s2.nu) >= opts.eps) {
      verdict.trace.push_back(rec);
      return finish(CpaStatus::Feasible, std::min(s1.nu, s2.nu), master.p);
    }

    if (s1.nu < opts.eps) {
      rec.added_u = append_cut(cuts.u_cuts, s1.witness, master.p, pieces_pos,
                               s1.piece_index);
      if (!rec.added_u) rec.degenerate = true;
    }
    if (s2.nu < opts.eps) {
      Matrix q = -1.0 * decrease_form(sys, mode, master.p);
      rec.added_v = append_cut(cuts.v_cuts, s2.witness, q, pieces_dec, s2.piece_index);
      if (!rec.added_v) rec.degenerate = true;
    }
    verdict.trace.push_back(rec);
  }
  return finish(CpaStatus::IterationLimit, last_mu, std::nullopt);
}

}  // namespace copostab
