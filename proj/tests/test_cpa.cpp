#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "copostab/cpa.hpp"
#include "copostab/errors.hpp"
#include "copostab/lcp.hpp"
#include "copostab/lyapunov.hpp"
#include "copostab/miqcp.hpp"
#include "copostab/rng.hpp"
#include "copostab/system.hpp"
#include "copostab/tol.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace copostab;
using namespace copostab::testutil;

namespace {

Lcs make_cam31() {
  Lcs s;
  s.a_tilde = Matrix::from_rows({{1.0}});
  s.c_tilde = Matrix::from_rows({{2.0, -2.0}});
  s.d_tilde = Matrix::from_rows({{1.0}, {-1.0}});
  s.f_tilde = Matrix::from_rows({{1.0, 3.0}, {0.0, 1.0}});
  return s;
}

Lcs make_cam32() {
  Lcs s;
  s.a_tilde = Matrix::from_rows({{-1.0}});
  s.c_tilde = Matrix::from_rows({{0.0, 1.0}});
  s.d_tilde = Matrix::from_rows({{1.0}, {1.0}});
  s.f_tilde = Matrix::from_rows({{1.0, 3.0}, {0.0, 1.0}});
  return s;
}

Lcs make_cam33() {
  Lcs s;
  s.a_tilde = Matrix::from_rows({{-5.0, -4.0, 0.0}, {-1.0, -2.0, 0.0}, {0.0, 0.0, 1.0}});
  s.c_tilde = Matrix::from_rows({{-3.0, 0.0, 0.0}, {-21.0, 0.0, 0.0}, {0.0, 2.0, -2.0}});
  s.d_tilde = Matrix::from_rows({{1.0, 0.0, 0.0}, {0.0, 0.0, 1.0}, {0.0, 0.0, -1.0}});
  s.f_tilde = Matrix::from_rows({{1.0, 0.0, 0.0}, {0.0, 1.0, 3.0}, {0.0, 0.0, 1.0}});
  return s;
}

Lcs make_hem2() {
  Lcs s;
  s.a_tilde = Matrix::from_rows(
      {{0.0, 0.0, 1.0, 0.0}, {0.0, 0.0, 0.0, 1.0}, {-2.0, 1.0, 0.0, 0.0}, {1.0, -1.0, 0.0, 0.0}});
  s.c_tilde = Matrix::from_rows({{0.0}, {0.0}, {1.0}, {0.0}});
  s.d_tilde = Matrix::from_rows({{1.0, 0.0, 0.0, 0.0}});
  s.f_tilde = Matrix::from_rows({{1.0}});
  return s;
}

Dlcs make_qp_saturation() {
  Dlcs s;
  s.a = Matrix::from_rows({{0.5, 0.25}, {-0.25, 0.5}});
  s.c = Matrix::from_rows({{3.0, 0.0}, {5.0, 0.0}});
  s.d = Matrix::from_rows({{1.0, 0.0}, {0.0, 0.0}});
  s.f = Matrix::from_rows({{1.0, -1.0}, {1.0, 0.0}});
  return s;
}

// Contraction with an inactive contact: x -> 0.5 x, lambda decoupled.
Dlcs make_scalar_contraction() {
  Dlcs s;
  s.a = Matrix::from_rows({{0.5}});
  s.c = Matrix::from_rows({{0.0}});
  s.d = Matrix::from_rows({{1.0}});
  s.f = Matrix::from_rows({{1.0}});
  return s;
}

// Same dynamics but with the multiplier feeding back into the state.
Dlcs make_scalar_coupled() {
  Dlcs s;
  s.a = Matrix::from_rows({{0.5}});
  s.c = Matrix::from_rows({{1.0}});
  s.d = Matrix::from_rows({{1.0}});
  s.f = Matrix::from_rows({{1.0}});
  return s;
}

struct GridRun {
  std::string system;
  double theta;
  double dt;
  CertificateKind kind;
  Verdict verdict;
};

const std::vector<GridRun>& benchmark_grid() {
  static const std::vector<GridRun> grid = [] {
    struct Named {
      const char* name;
      Lcs sys;
    };
    const Named systems[] = {
        {"cam31", make_cam31()}, {"cam32", make_cam32()}, {"cam33", make_cam33()},
        {"hem2", make_hem2()}};
    std::vector<GridRun> g;
    for (CertificateKind kind : {CertificateKind::Cqlf, CertificateKind::Eqlf})
      for (const Named& n : systems)
        for (double theta : {0.0, 1.0})
          for (double dt : {0.1, 0.05}) {
            Dlcs d = discretize(n.sys, dt, theta);
            g.push_back({n.name, theta, dt, kind, run_cutting_plane(d, kind)});
          }
    return g;
  }();
  return grid;
}

const Verdict& grid_verdict(const std::string& name, double theta, double dt,
                            CertificateKind kind) {
  for (const GridRun& r : benchmark_grid())
    if (r.system == name && r.theta == theta && r.dt == dt && r.kind == kind) return r.verdict;
  throw Error("missing grid entry");
}

}  // namespace

TEST_CASE("orthant pieces slice the unit 1-norm sphere") {
  for (int n = 1; n <= 3; ++n) {
    auto pieces = enumerate_orthant_pieces(n);
    CHECK(static_cast<int>(pieces.size()) == (1 << n));
    Rng rng(11);
    for (int k = 0; k < 200; ++k) {
      Vector x = normalized_1(rng.unit_sphere(n));
      int hits = 0;
      for (const Piece& pc : pieces) hits += pc.poly.contains(x, 1e-9) ? 1 : 0;
      CHECK(hits >= 1);
    }
  }
  auto two = enumerate_orthant_pieces(2);
  int corner_hits = 0;
  for (const Piece& pc : two) corner_hits += pc.poly.contains({0.5, 0.5}, 1e-12) ? 1 : 0;
  CHECK(corner_hits == 1);
  CHECK_THROWS_AS(enumerate_orthant_pieces(15), BudgetError);
}

TEST_CASE("cone piece enumeration prunes empty sign patterns") {
  Dlcs sc = make_scalar_contraction();
  auto pieces = enumerate_pieces(sc, PieceMode::Graph);
  REQUIRE(pieces.size() == 2);
  // Positive state with inactive contact, at most four raw patterns.
  CHECK(pieces[0].pattern.index == 0);
  CHECK(pieces[0].poly.contains({1.0, 0.0}, 1e-9));
  CHECK_FALSE(pieces[0].poly.contains({-0.5, 0.5}, 1e-9));
  // Negative state with the contact active.
  CHECK(pieces[1].pattern.index == 3);
  CHECK(pieces[1].poly.contains({-0.5, 0.5}, 1e-9));
  CHECK_FALSE(pieces[1].poly.contains({1.0, 0.0}, 1e-9));

  Dlcs qp = make_qp_saturation();
  CHECK(enumerate_pieces(qp, PieceMode::Graph).size() == 16);
  CHECK(enumerate_pieces(qp, PieceMode::GraphStep).size() == 44);

  Dlcs h2 = discretize(make_hem2(), 0.1, 1.0);
  CHECK(enumerate_pieces(h2, PieceMode::Graph).size() == 30);
  CHECK(enumerate_pieces(h2, PieceMode::GraphStep).size() == 52);

  Dlcs c31 = discretize(make_cam31(), 0.1, 0.0);
  CHECK(enumerate_pieces(c31, PieceMode::Graph).size() == 2);
  CHECK(enumerate_pieces(c31, PieceMode::GraphStep).size() == 2);
}

TEST_CASE("cone piece enumeration rejects oversized systems") {
  Dlcs big;
  big.a = Matrix::identity(5);
  big.c = Matrix(5, 5);
  big.d = Matrix(5, 5);
  big.f = Matrix::identity(5);
  CHECK_THROWS_AS(enumerate_pieces(big, PieceMode::Graph), BudgetError);
  CHECK_THROWS_AS(enumerate_pieces(big, PieceMode::GraphStep), BudgetError);
}

TEST_CASE("graph pieces cover sampled solution points") {
  Dlcs c31 = discretize(make_cam31(), 0.1, 0.0);
  auto pieces = enumerate_pieces(c31, PieceMode::Graph);
  Rng rng(7);
  auto pts = sample_graph_points(c31, rng, 10000);
  REQUIRE(static_cast<int>(pts.size()) == 10000);
  for (const Vector& u : pts) {
    bool in = false;
    for (const Piece& pc : pieces)
      if (pc.poly.contains(u, 1e-7)) {
        in = true;
        break;
      }
    CHECK(in);
  }

  Dlcs h2 = discretize(make_hem2(), 0.1, 1.0);
  auto steps = enumerate_pieces(h2, PieceMode::GraphStep);
  Rng rng2(13);
  auto triples = sample_graph_step_points(h2, rng2, 1000);
  REQUIRE(static_cast<int>(triples.size()) == 1000);
  for (const Vector& v : triples) {
    bool in = false;
    for (const Piece& pc : steps)
      if (pc.poly.contains(v, 1e-7)) {
        in = true;
        break;
      }
    CHECK(in);
  }
}

TEST_CASE("master program with no cuts is bounded by the box cap") {
  MasterResult r1 = master_solve({}, CertificateKind::Cqlf, make_scalar_contraction());
  CHECK(r1.mu == doctest::Approx(2.0).epsilon(1e-12));
  MasterResult r2 = master_solve({}, CertificateKind::Cqlf, make_qp_saturation());
  CHECK(r2.mu == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("master program reproduces hand-solved optima") {
  // One positivity cut on the line: P = 1 is forced by the box.
  CutSet one;
  one.u_cuts.push_back({1.0});
  MasterResult r1 = master_solve(one, CertificateKind::Cqlf, make_scalar_contraction());
  CHECK(r1.mu == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r1.p(0, 0) == doctest::Approx(1.0).epsilon(1e-12));

  // Two axis cuts in the plane pin the diagonal; the off-diagonal stays boxed.
  Dlcs planar;
  planar.a = Matrix::identity(2);
  planar.c = Matrix(2, 1);
  planar.d = Matrix(1, 2);
  planar.f = Matrix::identity(1);
  CutSet axes;
  axes.u_cuts.push_back({1.0, 0.0});
  axes.u_cuts.push_back({0.0, 1.0});
  MasterResult r2 = master_solve(axes, CertificateKind::Cqlf, planar);
  CHECK(r2.mu == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r2.p(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r2.p(1, 1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(r2.p(0, 1)) <= 1.0 + 1e-12);
  CHECK(r2.p(0, 1) == r2.p(1, 0));

  // A decrease cut that caps the scalar candidate at zero: with the coupled
  // scalar system, the cut (0.5, 0.5) yields -v'M(P)v = -0.3125 P, so
  // mu <= min(P, -0.3125 P) with optimum 0 at P = 0.
  CutSet mixed;
  mixed.u_cuts.push_back({1.0});
  mixed.v_cuts.push_back({0.5, 0.5});
  MasterResult r3 = master_solve(mixed, CertificateKind::Cqlf, make_scalar_coupled());
  CHECK(r3.mu == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(std::abs(r3.p(0, 0)) <= 1e-10);

  // Deterministic: identical inputs give identical optimizers.
  MasterResult r2b = master_solve(axes, CertificateKind::Cqlf, planar);
  CHECK(r2b.mu == r2.mu);
  CHECK(max_abs(r2b.p - r2.p) == 0.0);
}

TEST_CASE("positivity separation attains closed-form minima") {
  auto pieces = enumerate_orthant_pieces(2);
  SeparationResult id = separate_pos(Matrix::identity(2), pieces);
  CHECK(id.nu == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(std::abs(id.witness[0]) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(std::abs(id.witness[1]) == doctest::Approx(0.5).epsilon(1e-9));

  SeparationResult indef = separate_pos(Matrix::from_rows({{1.0, 0.0}, {0.0, -1.0}}), pieces);
  CHECK(indef.nu == doctest::Approx(-1.0).epsilon(1e-10));
  CHECK(std::abs(indef.witness[0]) <= 1e-9);
  CHECK(std::abs(indef.witness[1]) == doctest::Approx(1.0).epsilon(1e-9));

  SeparationResult zero = separate_pos(Matrix(2, 2), pieces);
  CHECK(zero.nu == doctest::Approx(0.0).epsilon(1e-12));

  auto line = enumerate_orthant_pieces(1);
  SeparationResult unit = separate_pos(Matrix::from_rows({{1.0}}), line);
  CHECK(unit.nu == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("decrease separation attains a hand-solved minimum") {
  Dlcs sc = make_scalar_contraction();
  auto pieces = enumerate_pieces(sc, PieceMode::Graph);
  Matrix p = Matrix::from_rows({{1.0}});
  // Two pieces: value 0.75 at (1, 0) and 0.1875 at (-0.5, 0.5); the active
  // contact attains the global minimum.
  SeparationResult r = separate_decrease(p, sc, CertificateKind::Cqlf, pieces);
  CHECK(r.nu == doctest::Approx(0.1875).epsilon(1e-10));
  CHECK(r.witness[0] == doctest::Approx(-0.5).epsilon(1e-9));
  CHECK(r.witness[1] == doctest::Approx(0.5).epsilon(1e-9));

  // Identity dynamics with no coupling: the decrease form vanishes.
  Dlcs frozen;
  frozen.a = Matrix::identity(1);
  frozen.c = Matrix(1, 1);
  frozen.d = Matrix::from_rows({{1.0}});
  frozen.f = Matrix::from_rows({{1.0}});
  SeparationResult z =
      separate_decrease(p, frozen, CertificateKind::Cqlf, enumerate_pieces(frozen, PieceMode::Graph));
  CHECK(z.nu == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("decrease separation certifies the published saturation certificate") {
  Dlcs qp = make_qp_saturation();
  Matrix p = Matrix::from_rows(
      {{5.33238468e-1, -1.79873472e-1, -1.0, -4.13688777e-2},
       {-1.79873472e-1, 1.70818637e-1, 2.78264033e-1, -8.65180851e-4},
       {-1.0, 2.78264033e-1, 1.0, -1.0},
       {-4.13688777e-2, -8.65180851e-4, -1.0, 7.53616763e-2}});
  auto graph = enumerate_pieces(qp, PieceMode::Graph);
  auto step = enumerate_pieces(qp, PieceMode::GraphStep);
  SeparationResult pos = separate_pos(p, graph);
  SeparationResult dec = separate_decrease(p, qp, CertificateKind::Eqlf, step);
  CHECK(pos.nu == doctest::Approx(2.958484857e-2).epsilon(1e-6));
  // The certificate's strict-decrease level, published to four digits.
  CHECK(std::abs(dec.nu - 4.057e-3) <= 1e-6);
  CHECK(std::min(pos.nu, dec.nu) >= 1e-6);
}

TEST_CASE("cutting plane certifies a scalar contraction") {
  Verdict v = run_cutting_plane(make_scalar_contraction(), CertificateKind::Cqlf);
  CHECK(v.status == CpaStatus::Feasible);
  CHECK(v.iterations == 1);
  CHECK(v.margin == doctest::Approx(0.1875).epsilon(1e-10));
  REQUIRE(v.certificate.has_value());
  CHECK((*v.certificate)(0, 0) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(v.seed_u_count == 2);
  CHECK(v.seed_v_count == 0);
}

TEST_CASE("cutting plane rejects bad options and unsolvable dynamics") {
  CpaOptions bad_eps;
  bad_eps.eps = 0.0;
  CHECK_THROWS_AS(run_cutting_plane(make_scalar_contraction(), CertificateKind::Cqlf, bad_eps),
                  InputError);
  CpaOptions bad_iter;
  bad_iter.max_iter = 0;
  CHECK_THROWS_AS(run_cutting_plane(make_scalar_contraction(), CertificateKind::Cqlf, bad_iter),
                  InputError);

  Dlcs degenerate = make_scalar_contraction();
  degenerate.f = Matrix::from_rows({{0.0}});  // multipliers unbounded at 0
  CHECK_THROWS_AS(run_cutting_plane(degenerate, CertificateKind::Cqlf), PreconditionError);
}

TEST_CASE("cutting plane matches the benchmark stability grid") {
  struct Expect {
    const char* system;
    double theta;
    double dt;
    CertificateKind kind;
    CpaStatus status;
  };
  const CertificateKind cq = CertificateKind::Cqlf, eq = CertificateKind::Eqlf;
  const CpaStatus F = CpaStatus::Feasible, I = CpaStatus::Infeasible;
  const Expect expected[] = {
      {"cam31", 0.0, 0.10, cq, F}, {"cam31", 0.0, 0.05, cq, F},
      {"cam31", 1.0, 0.10, cq, F}, {"cam31", 1.0, 0.05, cq, F},
      {"cam32", 0.0, 0.10, cq, F}, {"cam32", 0.0, 0.05, cq, F},
      {"cam32", 1.0, 0.10, cq, F}, {"cam32", 1.0, 0.05, cq, F},
      {"cam33", 0.0, 0.10, cq, I}, {"cam33", 0.0, 0.05, cq, I},
      {"cam33", 1.0, 0.10, cq, F}, {"cam33", 1.0, 0.05, cq, F},
      {"hem2", 0.0, 0.10, cq, I},  {"hem2", 0.0, 0.05, cq, I},
      {"hem2", 1.0, 0.10, cq, I},  {"hem2", 1.0, 0.05, cq, I},
      {"cam31", 0.0, 0.10, eq, F}, {"cam31", 0.0, 0.05, eq, F},
      {"cam31", 1.0, 0.10, eq, F}, {"cam31", 1.0, 0.05, eq, F},
      {"cam32", 0.0, 0.10, eq, F}, {"cam32", 0.0, 0.05, eq, F},
      {"cam32", 1.0, 0.10, eq, F}, {"cam32", 1.0, 0.05, eq, F},
      {"cam33", 0.0, 0.10, eq, F}, {"cam33", 0.0, 0.05, eq, F},
      {"cam33", 1.0, 0.10, eq, F}, {"cam33", 1.0, 0.05, eq, F},
      {"hem2", 0.0, 0.10, eq, I},  {"hem2", 0.0, 0.05, eq, I},
      {"hem2", 1.0, 0.10, eq, F},  {"hem2", 1.0, 0.05, eq, F},
  };
  for (const Expect& e : expected) {
    INFO(e.system, " theta=", e.theta, " dt=", e.dt, " kind=",
         e.kind == cq ? "cqlf" : "eqlf");
    const Verdict& v = grid_verdict(e.system, e.theta, e.dt, e.kind);
    CHECK(v.status == e.status);
  }

  // The single-iteration runs terminate on the first candidate, so their
  // certified levels are pinned rationals of the one-step geometry.
  struct Pin {
    const char* system;
    double theta;
    double dt;
    CertificateKind kind;
    double margin;
    double tol;
  };
  const Pin pins[] = {
      {"cam31", 0.0, 0.10, cq, 1.0 / 23.0, 1e-9},
      {"cam31", 0.0, 0.05, cq, 1.0 / 43.0, 1e-9},
      {"cam31", 1.0, 0.10, cq, 1.0 / 21.0, 1e-9},
      {"cam31", 1.0, 0.05, cq, 1.0 / 41.0, 1e-9},
      {"cam32", 0.0, 0.10, cq, 0.1, 1e-9},
      {"cam32", 0.0, 0.05, cq, 0.05, 1e-9},
      {"cam32", 1.0, 0.10, cq, 1.0 / 11.0, 1e-9},
      {"cam32", 1.0, 0.05, cq, 1.0 / 21.0, 1e-9},
      // Published four-digit levels, matched to one unit in the last digit.
      {"cam31", 0.0, 0.05, eq, 4.133e-2, 1e-5},
      {"cam31", 1.0, 0.10, eq, 8.453e-2, 1e-5},
      {"cam31", 1.0, 0.05, eq, 4.334e-2, 1e-5},
      {"cam32", 0.0, 0.10, eq, 1.766e-1, 1e-4},
      {"cam32", 1.0, 0.10, eq, 1.607e-1, 1e-4},
      {"cam32", 1.0, 0.05, eq, 8.453e-2, 1e-5},
  };
  for (const Pin& p : pins) {
    INFO(p.system, " theta=", p.theta, " dt=", p.dt, " kind=",
         p.kind == cq ? "cqlf" : "eqlf");
    const Verdict& v = grid_verdict(p.system, p.theta, p.dt, p.kind);
    CHECK(v.iterations == 1);
    CHECK(std::abs(v.margin - p.margin) <= p.tol);
  }
}

TEST_CASE("verdict traces are internally consistent") {
  for (const GridRun& r : benchmark_grid()) {
    INFO(r.system, " theta=", r.theta, " dt=", r.dt, " kind=",
         r.kind == CertificateKind::Cqlf ? "cqlf" : "eqlf");
    const Verdict& v = r.verdict;
    REQUIRE(!v.trace.empty());
    CHECK(v.iterations == static_cast<int>(v.trace.size()));
    CHECK(v.seed_u_count >= 1);

    for (size_t i = 0; i < v.trace.size(); ++i) {
      if (i > 0) CHECK(v.trace[i].mu <= v.trace[i - 1].mu + 1e-9);
      // A unit-1-norm cut and the unit box cap the candidate level at one.
      CHECK(v.trace[i].mu <= 1.0 + 1e-9);
      bool last = i + 1 == v.trace.size();
      if (!last && v.status != CpaStatus::IterationLimit)
        CHECK((v.trace[i].added_u || v.trace[i].added_v || v.trace[i].degenerate));
    }

    const IterationRecord& final = v.trace.back();
    if (v.status == CpaStatus::Feasible) {
      REQUIRE(v.certificate.has_value());
      REQUIRE(final.nu1.has_value());
      REQUIRE(final.nu2.has_value());
      CHECK(v.margin == std::min(*final.nu1, *final.nu2));
      CHECK(v.margin >= tol::default_eps);
      CHECK(max_abs(*v.certificate - transpose(*v.certificate)) == 0.0);
      double box = max_abs(*v.certificate);
      CHECK(box <= 1.0 + 1e-9);
    } else if (v.status == CpaStatus::Infeasible) {
      CHECK(!v.certificate.has_value());
      CHECK(final.mu < tol::default_eps);
      CHECK(v.margin == final.mu);
    }
  }
}

TEST_CASE("feasible verdicts withstand independent re-separation") {
  for (const GridRun& r : benchmark_grid()) {
    if (r.verdict.status != CpaStatus::Feasible) continue;
    INFO(r.system, " theta=", r.theta, " dt=", r.dt, " kind=",
         r.kind == CertificateKind::Cqlf ? "cqlf" : "eqlf");
    Dlcs d = discretize(r.system == "cam31"   ? make_cam31()
                        : r.system == "cam32" ? make_cam32()
                        : r.system == "cam33" ? make_cam33()
                                              : make_hem2(),
                        r.dt, r.theta);
    const Matrix& p = *r.verdict.certificate;
    auto pos_pieces = r.kind == CertificateKind::Cqlf
                          ? enumerate_orthant_pieces(d.n_x())
                          : enumerate_pieces(d, PieceMode::Graph);
    auto dec_pieces = enumerate_pieces(
        d, r.kind == CertificateKind::Cqlf ? PieceMode::Graph : PieceMode::GraphStep);
    SeparationResult pos = separate_pos(p, pos_pieces);
    SeparationResult dec = separate_decrease(p, d, r.kind, dec_pieces);
    CHECK(std::min(pos.nu, dec.nu) >= tol::default_eps * (1.0 - 1e-9));
  }

  // Strict inequalities hold at sampled cone points for spot-checked runs.
  {
    const Verdict& v = grid_verdict("cam31", 0.0, 0.1, CertificateKind::Cqlf);
    Dlcs d = discretize(make_cam31(), 0.1, 0.0);
    const Matrix& p = *v.certificate;
    Matrix m = build_M(d, p);
    Rng rng(5);
    auto pts = sample_graph_points(d, rng, 10000);
    double floor_level = v.margin * (1.0 - 1e-6);
    for (const Vector& u : pts) {
      Vector x(u.begin(), u.begin() + 1);
      double nx1 = norm_1(x);
      CHECK(quad_form(p, x) >= floor_level * nx1 * nx1 - 1e-12);
      CHECK(-quad_form(m, u) >= floor_level - 1e-12);
    }
  }
  {
    Dlcs qp = make_qp_saturation();
    Verdict v = run_cutting_plane(qp, CertificateKind::Eqlf);
    REQUIRE(v.status == CpaStatus::Feasible);
    const Matrix& p = *v.certificate;
    Matrix mhat = build_Mhat(qp, p);
    Rng rng(6);
    auto pairs = sample_graph_points(qp, rng, 10000);
    auto triples = sample_graph_step_points(qp, rng, 10000);
    double floor_level = v.margin * (1.0 - 1e-6);
    for (const Vector& u : pairs) CHECK(quad_form(p, u) >= floor_level - 1e-12);
    for (const Vector& w : triples) CHECK(-quad_form(mhat, w) >= floor_level - 1e-12);
  }
}

TEST_CASE("infeasible verdicts leave a checkable refutation") {
  for (const GridRun& r : benchmark_grid()) {
    if (r.verdict.status != CpaStatus::Infeasible) continue;
    INFO(r.system, " theta=", r.theta, " dt=", r.dt, " kind=",
         r.kind == CertificateKind::Cqlf ? "cqlf" : "eqlf");
    Dlcs d = discretize(r.system == "cam33" ? make_cam33() : make_hem2(), r.dt, r.theta);
    MasterResult replay = master_solve(r.verdict.cuts, r.kind, d);
    CHECK(replay.mu < tol::default_eps);
  }
}

TEST_CASE("saturation system splits by certificate kind") {
  Dlcs qp = make_qp_saturation();

  Verdict cq = run_cutting_plane(qp, CertificateKind::Cqlf);
  CHECK(cq.status == CpaStatus::Infeasible);
  REQUIRE(!cq.warnings.empty());
  CHECK(cq.warnings.front().find("multiplier existence") != std::string::npos);

  Verdict eq = run_cutting_plane(qp, CertificateKind::Eqlf);
  CHECK(eq.status == CpaStatus::Feasible);
  CHECK(eq.margin >= 1e-6);
  CHECK(eq.margin == doctest::Approx(1.399604150e-3).epsilon(1e-6));
  CHECK(!eq.warnings.empty());
  REQUIRE(eq.certificate.has_value());
  Certificate cert{CertificateKind::Eqlf, *eq.certificate};
  ValidationReport rep = validate_certificate(qp, cert, 100, 200, 0);
  CHECK(rep.pass);
  CHECK(rep.trajectories == 100);
}

TEST_CASE("fast separation exit preserves verdicts") {
  CpaOptions fast;
  fast.fast_sep = true;
  struct Case {
    Dlcs sys;
    CertificateKind kind;
  };
  const Case cases[] = {
      {discretize(make_cam31(), 0.1, 0.0), CertificateKind::Cqlf},
      {discretize(make_cam33(), 0.1, 0.0), CertificateKind::Cqlf},
      {discretize(make_cam33(), 0.1, 1.0), CertificateKind::Cqlf},
      {make_qp_saturation(), CertificateKind::Eqlf},
  };
  for (const Case& c : cases) {
    Verdict exact = run_cutting_plane(c.sys, c.kind);
    Verdict quick = run_cutting_plane(c.sys, c.kind, fast);
    CHECK(exact.status == quick.status);
  }
}

TEST_CASE("runs are deterministic in the seed") {
  Dlcs qp = make_qp_saturation();
  Verdict a = run_cutting_plane(qp, CertificateKind::Eqlf);
  Verdict b = run_cutting_plane(qp, CertificateKind::Eqlf);
  CHECK(a.status == b.status);
  CHECK(a.margin == b.margin);
  REQUIRE(a.trace.size() == b.trace.size());
  for (size_t i = 0; i < a.trace.size(); ++i) CHECK(a.trace[i].mu == b.trace[i].mu);

  for (uint64_t seed : {1ull, 2ull}) {
    CpaOptions o;
    o.seed = seed;
    Verdict c = run_cutting_plane(qp, CertificateKind::Eqlf, o);
    CHECK(c.status == CpaStatus::Feasible);
  }
}

TEST_CASE("separation equals sampling and polishing on random systems") {
  Rng rng(41);
  int tested = 0;
  for (int trial = 0; trial < 40 && tested < 25; ++trial) {
    int nx = 1 + static_cast<int>(rng.uniform() * 3.0);
    int nc = 1 + static_cast<int>(rng.uniform() * 2.0);
    nx = std::min(nx, 3);
    nc = std::min(nc, 2);
    auto entry = [&]() { return 2.0 * rng.uniform() - 1.0; };
    Dlcs d;
    d.a = Matrix(nx, nx);
    d.c = Matrix(nx, nc);
    d.d = Matrix(nc, nx);
    d.f = Matrix(nc, nc);
    for (int i = 0; i < nx; ++i)
      for (int j = 0; j < nx; ++j) d.a(i, j) = entry();
    for (int i = 0; i < nx; ++i)
      for (int j = 0; j < nc; ++j) d.c(i, j) = entry();
    for (int i = 0; i < nc; ++i)
      for (int j = 0; j < nx; ++j) d.d(i, j) = entry();
    for (int i = 0; i < nc; ++i)
      for (int j = 0; j < nc; ++j) d.f(i, j) = entry() + (i == j ? 1.0 : 0.0);

    Matrix p_small(nx, nx), p_big(nx + nc, nx + nc);
    for (int i = 0; i < nx; ++i)
      for (int j = i; j < nx; ++j) p_small(i, j) = p_small(j, i) = entry();
    for (int i = 0; i < nx + nc; ++i)
      for (int j = i; j < nx + nc; ++j) p_big(i, j) = p_big(j, i) = entry();

    Rng sampler(1000 + trial);
    auto graph_pts = sample_graph_points(d, sampler, 10000);
    auto step_pts = sample_graph_step_points(d, sampler, 10000);
    if (graph_pts.size() < 100 || step_pts.size() < 100) continue;
    ++tested;
    INFO("trial ", trial, " nx=", nx, " nc=", nc);

    auto orthants = enumerate_orthant_pieces(nx);
    auto graph = enumerate_pieces(d, PieceMode::Graph);
    auto step = enumerate_pieces(d, PieceMode::GraphStep);

    std::vector<Vector> sphere;
    for (int k = 0; k < 10000; ++k) sphere.push_back(normalized_1(sampler.unit_sphere(nx)));

    // Positivity over the whole sphere and over the solution graph.
    SeparationResult pos_free = separate_pos(p_small, orthants);
    CHECK(pos_free.nu <= min_sampled_value(p_small, sphere) + 1e-9);
    CHECK(std::abs(pos_free.nu - sample_polish_min(p_small, orthants, sphere)) <= 1e-6);

    SeparationResult pos_graph = separate_pos(p_big, graph);
    CHECK(pos_graph.nu <= min_sampled_value(p_big, graph_pts) + 1e-9);
    CHECK(std::abs(pos_graph.nu - sample_polish_min(p_big, graph, graph_pts)) <= 1e-6);

    // Decrease forms for both certificate kinds.
    Matrix m = -1.0 * build_M(d, p_small);
    SeparationResult dec_small = separate_decrease(p_small, d, CertificateKind::Cqlf, graph);
    CHECK(dec_small.nu <= min_sampled_value(m, graph_pts) + 1e-9);
    CHECK(std::abs(dec_small.nu - sample_polish_min(m, graph, graph_pts)) <= 1e-6);

    Matrix mhat = -1.0 * build_Mhat(d, p_big);
    SeparationResult dec_big = separate_decrease(p_big, d, CertificateKind::Eqlf, step);
    CHECK(dec_big.nu <= min_sampled_value(mhat, step_pts) + 1e-9);
    CHECK(std::abs(dec_big.nu - sample_polish_min(mhat, step, step_pts)) <= 1e-6);
  }
  CHECK(tested >= 20);
}

TEST_CASE("miqcp export lays out the positivity model") {
  Dlcs qp = make_qp_saturation();
  nlohmann::json doc =
      export_separation_miqcp(Matrix::identity(2), qp, CertificateKind::Cqlf,
                              SeparationSide::Positivity);
  CHECK(doc["schema"] == "copostab/miqcp-v1");
  CHECK(doc["mode"] == "cqlf");
  CHECK(doc["side"] == "pos");
  int continuous = 0, binary = 0;
  for (const auto& v : doc["variables"])
    (v["kind"] == "binary" ? binary : continuous)++;
  CHECK(continuous == 5);
  CHECK(binary == 2);
  CHECK(doc["binaries"] == nlohmann::json::array({"y_0", "y_1"}));
  CHECK(doc["objective"]["sense"] == "min");
  CHECK(doc["objective"]["epigraph_variable"] == "nu");

  bool found_one_norm = false;
  for (const auto& row : doc["constraints"]) {
    if (row["name"] != "one_norm") continue;
    found_one_norm = true;
    CHECK(row["sense"] == "==");
    CHECK(row["rhs"] == 1.0);
    CHECK(row["linear"].size() == 4);  // x+ and x- for both coordinates
    for (const auto& term : row["linear"]) CHECK(term[1] == 1.0);
  }
  CHECK(found_one_norm);
}

TEST_CASE("miqcp export embeds the decrease big-M data") {
  // One-step data for the first benchmark at the explicit scheme.
  Dlcs c31 = discretize(make_cam31(), 0.1, 0.0);
  nlohmann::json dec = export_separation_miqcp(Matrix::from_rows({{1.0}}), c31,
                                               CertificateKind::Cqlf, SeparationSide::Decrease);
  REQUIRE(dec["big_m"]["theta"].size() == 2);
  CHECK(dec["big_m"]["theta"][0] == doctest::Approx(2.8).epsilon(1e-12));
  CHECK(dec["big_m"]["theta"][1] == doctest::Approx(1.2).epsilon(1e-12));

  // Scalar coupled system: the expanded objective triplets are hand-checkable.
  Dlcs sc = make_scalar_coupled();
  nlohmann::json scalar = export_separation_miqcp(Matrix::from_rows({{1.0}}), sc,
                                                  CertificateKind::Cqlf, SeparationSide::Decrease);
  std::map<std::pair<int, int>, double> coo;
  for (const auto& t : scalar["objective"]["quadratic"])
    coo[{t[0], t[1]}] = t[2];
  // Variables: x_plus_0 = 0, x_minus_0 = 1, lambda_0 = 2.
  CHECK(coo[{0, 0}] == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(coo[{0, 1}] == doctest::Approx(-0.75).epsilon(1e-12));
  CHECK(coo[{1, 1}] == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(coo[{0, 2}] == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(coo[{1, 2}] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(coo[{2, 2}] == doctest::Approx(-1.0).epsilon(1e-12));

  // Extended decrease: second multiplier layer with its own gate data.
  nlohmann::json ext = export_separation_miqcp(Matrix::identity(2), sc, CertificateKind::Eqlf,
                                               SeparationSide::Decrease);
  REQUIRE(ext["big_m"]["theta_next"].size() == 1);
  CHECK(ext["big_m"]["theta"][0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ext["big_m"]["theta_next"][0] == doctest::Approx(1.0).epsilon(1e-12));
  bool has_next_gate = false, has_next_link = false;
  for (const auto& row : ext["constraints"]) {
    std::string name = row["name"];
    if (name == "slack_next_gate_0") has_next_gate = true;
    if (name == "lambda_next_le_w_0") has_next_link = true;
  }
  CHECK(has_next_gate);
  CHECK(has_next_link);

  Dlcs h2 = discretize(make_hem2(), 0.1, 0.0);
  nlohmann::json big = export_separation_miqcp(Matrix::identity(5), h2, CertificateKind::Eqlf,
                                               SeparationSide::Decrease);
  int continuous = 0, binary = 0;
  for (const auto& v : big["variables"])
    (v["kind"] == "binary" ? binary : continuous)++;
  CHECK(continuous == 11);  // 4 x+, 4 x-, lambda, next lambda, epigraph
  CHECK(binary == 6);       // 4 sign bits, one gate per multiplier layer

  // The epigraph row ties the objective to the bound variable.
  bool found_epigraph = false;
  for (const auto& row : big["constraints"]) {
    if (row["name"] != "epigraph") continue;
    found_epigraph = true;
    CHECK(row["sense"] == "<=");
    CHECK(row["quadratic"] == big["objective"]["quadratic"]);
    CHECK(row["linear"].size() == 1);
  }
  CHECK(found_epigraph);
}

TEST_CASE("miqcp export validates input dimensions") {
  Dlcs qp = make_qp_saturation();
  CHECK_THROWS_AS(export_separation_miqcp(Matrix::identity(3), qp, CertificateKind::Cqlf,
                                          SeparationSide::Positivity),
                  DimensionError);
  CHECK_THROWS_AS(export_separation_miqcp(Matrix::identity(2), qp, CertificateKind::Eqlf,
                                          SeparationSide::Positivity),
                  DimensionError);
  CHECK_THROWS_AS(export_separation_miqcp(Matrix::identity(5), qp, CertificateKind::Cqlf,
                                          SeparationSide::Decrease),
                  DimensionError);
}
