#include "copostab/miqcp.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "copostab/errors.hpp"

namespace copostab {

namespace {

using nlohmann::json;

struct VarTable {
  std::vector<std::string> names;
  std::vector<bool> binary;
  std::vector<json> lbs, ubs;

  int add(const std::string& name, bool bin, json lb, json ub) {
    names.push_back(name);
    binary.push_back(bin);
    lbs.push_back(std::move(lb));
    ubs.push_back(std::move(ub));
    return static_cast<int>(names.size()) - 1;
  }
};

json linear_terms(const std::vector<std::pair<int, double>>& terms) {
  json arr = json::array();
  for (const auto& [idx, coeff] : terms)
    if (coeff != 0.0) arr.push_back(json::array({idx, coeff}));
  return arr;
}

json constraint_row(const std::string& name, const std::vector<std::pair<int, double>>& terms,
                    const std::string& sense, double rhs) {
  json row;
  row["name"] = name;
  row["linear"] = linear_terms(terms);
  row["sense"] = sense;
  row["rhs"] = rhs;
  return row;
}

}  // namespace

json export_separation_miqcp(const Matrix& p, const Dlcs& sys, CertificateKind mode,
                             SeparationSide which) {
  sys.validate();
  const int nx = sys.n_x();
  const int nc = sys.n_c();

  // The quadratic lives over the logical vector of the separation cone.
  const bool dec = which == SeparationSide::Decrease;
  const bool extended_dec = dec && mode == CertificateKind::Eqlf;
  const bool has_lambda = dec || mode == CertificateKind::Eqlf;
  const bool has_lambda_next = extended_dec;
  const int logical_dim = nx + (has_lambda ? nc : 0) + (has_lambda_next ? nc : 0);

  Matrix q;
  if (!dec) {
    const int expect = mode == CertificateKind::Cqlf ? nx : nx + nc;
    if (p.rows != expect || p.cols != expect)
      throw DimensionError("candidate size does not match the positivity cone");
    q = p;
  } else {
    q = -1.0 * (mode == CertificateKind::Cqlf ? build_M(sys, p) : build_Mhat(sys, p));
  }
  if (q.rows != logical_dim) throw DimensionError("quadratic form size");

  VarTable vars;
  std::vector<int> xp(nx), xm(nx), lam, lam_next, y(nx), z, w;
  for (int i = 0; i < nx; ++i)
    xp[i] = vars.add("x_plus_" + std::to_string(i), false, 0.0, 1.0);
  for (int i = 0; i < nx; ++i)
    xm[i] = vars.add("x_minus_" + std::to_string(i), false, 0.0, 1.0);
  if (has_lambda)
    for (int j = 0; j < nc; ++j)
      lam.push_back(vars.add("lambda_" + std::to_string(j), false, 0.0, 1.0));
  if (has_lambda_next)
    for (int j = 0; j < nc; ++j)
      lam_next.push_back(vars.add("lambda_next_" + std::to_string(j), false, 0.0, 1.0));
  const int nu = vars.add("nu", false, nullptr, nullptr);
  for (int i = 0; i < nx; ++i) y[i] = vars.add("y_" + std::to_string(i), true, 0.0, 1.0);
  if (has_lambda)
    for (int j = 0; j < nc; ++j)
      z.push_back(vars.add("z_" + std::to_string(j), true, 0.0, 1.0));
  if (has_lambda_next)
    for (int j = 0; j < nc; ++j)
      w.push_back(vars.add("w_" + std::to_string(j), true, 0.0, 1.0));

  // Expanded quadratic over the continuous variables through x = x+ - x-.
  // logical index -> list of (variable, sign) pairs
  std::vector<std::vector<std::pair<int, double>>> expand(logical_dim);
  for (int i = 0; i < nx; ++i) expand[i] = {{xp[i], 1.0}, {xm[i], -1.0}};
  for (int j = 0; j < nc && has_lambda; ++j) expand[nx + j] = {{lam[j], 1.0}};
  for (int j = 0; j < nc && has_lambda_next; ++j)
    expand[nx + nc + j] = {{lam_next[j], 1.0}};

  const int ncont = nu + 1;
  Matrix qx(ncont, ncont);
  for (int r = 0; r < logical_dim; ++r)
    for (int c = 0; c < logical_dim; ++c) {
      if (q(r, c) == 0.0) continue;
      for (const auto& [vr, sr] : expand[r])
        for (const auto& [vc, sc] : expand[c]) qx(vr, vc) += sr * sc * q(r, c);
    }
  json coo = json::array();
  for (int r = 0; r < ncont; ++r)
    for (int c = 0; c < ncont; ++c)
      if (qx(r, c) != 0.0) coo.push_back(json::array({r, c, qx(r, c)}));

  json constraints = json::array();

  {  // unit 1-norm slice
    std::vector<std::pair<int, double>> terms;
    for (int i = 0; i < nx; ++i) {
      terms.emplace_back(xp[i], 1.0);
      terms.emplace_back(xm[i], 1.0);
    }
    for (int idx : lam) terms.emplace_back(idx, 1.0);
    for (int idx : lam_next) terms.emplace_back(idx, 1.0);
    constraints.push_back(constraint_row("one_norm", terms, "==", 1.0));
  }
  for (int i = 0; i < nx; ++i) {
    constraints.push_back(constraint_row("x_plus_le_y_" + std::to_string(i),
                                         {{xp[i], 1.0}, {y[i], -1.0}}, "<=", 0.0));
    constraints.push_back(constraint_row("x_minus_le_not_y_" + std::to_string(i),
                                         {{xm[i], 1.0}, {y[i], 1.0}}, "<=", 1.0));
  }

  json big_m;
  if (has_lambda) {
    Vector theta(nc, 0.0);
    for (int i = 0; i < nc; ++i) {
      double t = 0.0;
      for (int j = 0; j < nx; ++j) t = std::max(t, std::abs(sys.d(i, j)));
      for (int k = 0; k < nc; ++k) t = std::max(t, sys.f(i, k));
      theta[i] = t;
    }
    big_m["theta"] = theta;
    for (int i = 0; i < nc; ++i) {
      constraints.push_back(constraint_row("lambda_le_z_" + std::to_string(i),
                                           {{lam[i], 1.0}, {z[i], -1.0}}, "<=", 0.0));
      std::vector<std::pair<int, double>> slack;
      for (int j = 0; j < nx; ++j) {
        slack.emplace_back(xp[j], sys.d(i, j));
        slack.emplace_back(xm[j], -sys.d(i, j));
      }
      for (int k = 0; k < nc; ++k) slack.emplace_back(lam[k], sys.f(i, k));
      constraints.push_back(
          constraint_row("slack_nonneg_" + std::to_string(i), slack, ">=", 0.0));
      std::vector<std::pair<int, double>> gated = slack;
      gated.emplace_back(z[i], theta[i]);
      constraints.push_back(
          constraint_row("slack_gate_" + std::to_string(i), gated, "<=", theta[i]));
    }
  }
  if (has_lambda_next) {
    const Matrix da = sys.d * sys.a;
    const Matrix dc = sys.d * sys.c;
    Vector cap(nc, 0.0);
    for (int i = 0; i < nc; ++i) {
      double t = 0.0;
      for (int j = 0; j < nx; ++j) t = std::max(t, std::abs(da(i, j)));
      for (int j = 0; j < nc; ++j) t = std::max(t, sys.f(i, j));
      for (int j = 0; j < nc; ++j) t = std::max(t, dc(i, j));
      cap[i] = t;
    }
    big_m["theta_next"] = cap;
    for (int i = 0; i < nc; ++i) {
      constraints.push_back(
          constraint_row("lambda_next_le_w_" + std::to_string(i),
                         {{lam_next[i], 1.0}, {w[i], -1.0}}, "<=", 0.0));
      std::vector<std::pair<int, double>> slack;
      for (int j = 0; j < nx; ++j) {
        slack.emplace_back(xp[j], da(i, j));
        slack.emplace_back(xm[j], -da(i, j));
      }
      for (int j = 0; j < nc; ++j) slack.emplace_back(lam[j], dc(i, j));
      for (int j = 0; j < nc; ++j) slack.emplace_back(lam_next[j], sys.f(i, j));
      constraints.push_back(
          constraint_row("slack_next_nonneg_" + std::to_string(i), slack, ">=", 0.0));
      std::vector<std::pair<int, double>> gated = slack;
      gated.emplace_back(w[i], cap[i]);
      constraints.push_back(
          constraint_row("slack_next_gate_" + std::to_string(i), gated, "<=", cap[i]));
    }
  }

  {  // epigraph row: quadratic value bounded by nu
    json row;
    row["name"] = "epigraph";
    row["quadratic"] = coo;
    row["linear"] = linear_terms({{nu, -1.0}});
    row["sense"] = "<=";
    row["rhs"] = 0.0;
    constraints.push_back(row);
  }

  json doc;
  doc["schema"] = "copostab/miqcp-v1";
  doc["mode"] = mode == CertificateKind::Cqlf ? "cqlf" : "eqlf";
  doc["side"] = dec ? "dec" : "pos";
  json vlist = json::array();
  for (size_t i = 0; i < vars.names.size(); ++i) {
    json v;
    v["index"] = i;
    v["name"] = vars.names[i];
    v["kind"] = vars.binary[i] ? "binary" : "continuous";
    v["lb"] = vars.lbs[i];
    v["ub"] = vars.ubs[i];
    vlist.push_back(v);
  }
  doc["variables"] = vlist;
  json blist = json::array();
  for (size_t i = 0; i < vars.names.size(); ++i)
    if (vars.binary[i]) blist.push_back(vars.names[i]);
  doc["binaries"] = blist;
  json objective;
  objective["sense"] = "min";
  objective["quadratic"] = coo;
  objective["epigraph_variable"] = "nu";
  doc["objective"] = objective;
  doc["constraints"] = constraints;
  doc["big_m"] = big_m.is_null() ? json::object() : big_m;
  return doc;
}

}  // namespace copostab
