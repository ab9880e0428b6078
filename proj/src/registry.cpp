#include "copostab/registry.hpp"

#include "copostab/errors.hpp"

namespace copostab {

namespace {

Lcs cam31() {
  Lcs s;
  s.a_tilde = Matrix::from_rows({{1.0}});
  s.c_tilde = Matrix::from_rows({{2.0, -2.0}});
  s.d_tilde = Matrix::from_rows({{1.0}, {-1.0}});
  s.f_tilde = Matrix::from_rows({{1.0, 3.0}, {0.0, 1.0}});
  return s;
}

Lcs cam32() {
  Lcs s;
  s.a_tilde = Matrix::from_rows({{-1.0}});
  s.c_tilde = Matrix::from_rows({{0.0, 1.0}});
  s.d_tilde = Matrix::from_rows({{1.0}, {1.0}});
  s.f_tilde = Matrix::from_rows({{1.0, 3.0}, {0.0, 1.0}});
  return s;
}

Lcs cam33() {
  Lcs s;
  s.a_tilde = Matrix::from_rows({{-5.0, -4.0, 0.0}, {-1.0, -2.0, 0.0}, {0.0, 0.0, 1.0}});
  s.c_tilde = Matrix::from_rows({{-3.0, 0.0, 0.0}, {-21.0, 0.0, 0.0}, {0.0, 2.0, -2.0}});
  s.d_tilde = Matrix::from_rows({{1.0, 0.0, 0.0}, {0.0, 0.0, 1.0}, {0.0, 0.0, -1.0}});
  s.f_tilde = Matrix::from_rows({{1.0, 0.0, 0.0}, {0.0, 1.0, 3.0}, {0.0, 0.0, 1.0}});
  return s;
}

Lcs hem2() {
  Lcs s;
  s.a_tilde = Matrix::from_rows(
      {{0.0, 0.0, 1.0, 0.0}, {0.0, 0.0, 0.0, 1.0}, {-2.0, 1.0, 0.0, 0.0}, {1.0, -1.0, 0.0, 0.0}});
  s.c_tilde = Matrix::from_rows({{0.0}, {0.0}, {1.0}, {0.0}});
  s.d_tilde = Matrix::from_rows({{1.0, 0.0, 0.0, 0.0}});
  s.f_tilde = Matrix::from_rows({{1.0}});
  return s;
}

// Saturation-feedback system whose contact matrix is a Q- and R0-matrix but
// not a P-matrix: multipliers exist for every state yet need not be unique.
Dlcs qp0() {
  Dlcs s;
  s.a = Matrix::from_rows({{0.5, 0.25}, {-0.25, 0.5}});
  s.c = Matrix::from_rows({{3.0, 0.0}, {5.0, 0.0}});
  s.d = Matrix::from_rows({{1.0, 0.0}, {0.0, 0.0}});
  s.f = Matrix::from_rows({{1.0, -1.0}, {1.0, 0.0}});
  return s;
}

}  // namespace

std::vector<std::string> example_names() {
  return {"cam31", "cam32", "cam33", "hem2", "qp0"};
}

SystemDocument example_system(const std::string& name) {
  if (name == "cam31") return make_system_document("cam31", cam31());
  if (name == "cam32") return make_system_document("cam32", cam32());
  if (name == "cam33") return make_system_document("cam33", cam33());
  if (name == "hem2") return make_system_document("hem2", hem2());
  if (name == "qp0") return make_system_document("qp0", qp0());
  throw UnknownExample(name);
}

}  // namespace copostab
