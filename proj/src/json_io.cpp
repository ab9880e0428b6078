#include "copostab/json_io.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>

#include "copostab/errors.hpp"

namespace copostab {

namespace {

using nlohmann::json;

double finite_number(const json& j, const char* what) {
  if (!j.is_number()) throw InputError(std::string(what) + ": expected a number");
  double v = j.get<double>();
  if (!std::isfinite(v)) throw InputError(std::string(what) + ": non-finite entry");
  return v;
}

const json& require(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw InputError(std::string("missing field '") + key + "'");
  return *it;
}

std::string status_name(CpaStatus s) {
  switch (s) {
    case CpaStatus::Feasible: return "feasible";
    case CpaStatus::Infeasible: return "infeasible";
    default: return "iteration_limit";
  }
}

CpaStatus status_from_name(const std::string& s) {
  if (s == "feasible") return CpaStatus::Feasible;
  if (s == "infeasible") return CpaStatus::Infeasible;
  if (s == "iteration_limit") return CpaStatus::IterationLimit;
  throw InputError("unknown verdict status '" + s + "'");
}

std::string kind_name(CertificateKind k) {
  return k == CertificateKind::Cqlf ? "cqlf" : "eqlf";
}

CertificateKind kind_from_name(const std::string& s) {
  if (s == "cqlf") return CertificateKind::Cqlf;
  if (s == "eqlf") return CertificateKind::Eqlf;
  throw InputError("unknown certificate kind '" + s + "'");
}

}  // namespace

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows; ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols; ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& j) {
  if (!j.is_array()) throw InputError("matrix: expected an array of rows");
  const int rows = static_cast<int>(j.size());
  if (rows == 0) return Matrix(0, 0);
  if (!j[0].is_array()) throw InputError("matrix: expected nested row arrays");
  const int cols = static_cast<int>(j[0].size());
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    if (!j[i].is_array() || static_cast<int>(j[i].size()) != cols)
      throw InputError("matrix: ragged rows");
    for (int c = 0; c < cols; ++c) m(i, c) = finite_number(j[i][c], "matrix");
  }
  return m;
}

json vector_to_json(const Vector& v) {
  json arr = json::array();
  for (double x : v) arr.push_back(x);
  return arr;
}

Vector vector_from_json(const json& j) {
  if (!j.is_array()) throw InputError("vector: expected an array");
  Vector v(j.size());
  for (size_t i = 0; i < j.size(); ++i) v[i] = finite_number(j[i], "vector");
  return v;
}

int SystemDocument::n_x() const {
  if (lcs) return lcs->n_x();
  if (dlcs) return dlcs->n_x();
  if (inhomogeneous) return inhomogeneous->base.n_x();
  return 0;
}

int SystemDocument::n_c() const {
  if (lcs) return lcs->n_c();
  if (dlcs) return dlcs->n_c();
  if (inhomogeneous) return inhomogeneous->base.n_c();
  return 0;
}

SystemDocument make_system_document(std::string name, Lcs sys) {
  sys.validate();
  SystemDocument doc;
  doc.name = std::move(name);
  doc.kind = "lcs";
  doc.lcs = std::move(sys);
  return doc;
}

SystemDocument make_system_document(std::string name, Dlcs sys) {
  sys.validate();
  SystemDocument doc;
  doc.name = std::move(name);
  doc.kind = "dlcs";
  doc.dlcs = std::move(sys);
  return doc;
}

SystemDocument make_system_document(std::string name, InhomogeneousDlcs sys) {
  sys.validate();
  SystemDocument doc;
  doc.name = std::move(name);
  doc.kind = "inhomogeneous_dlcs";
  doc.inhomogeneous = std::move(sys);
  return doc;
}

json system_document_to_json(const SystemDocument& doc) {
  json j;
  j["schema"] = "copostab/system-v1";
  j["name"] = doc.name;
  j["kind"] = doc.kind;
  j["n_x"] = doc.n_x();
  j["n_c"] = doc.n_c();
  json mats;
  if (doc.kind == "lcs") {
    if (!doc.lcs) throw InputError("system document: kind 'lcs' without matrices");
    mats["a_tilde"] = matrix_to_json(doc.lcs->a_tilde);
    mats["c_tilde"] = matrix_to_json(doc.lcs->c_tilde);
    mats["d_tilde"] = matrix_to_json(doc.lcs->d_tilde);
    mats["f_tilde"] = matrix_to_json(doc.lcs->f_tilde);
  } else if (doc.kind == "dlcs") {
    if (!doc.dlcs) throw InputError("system document: kind 'dlcs' without matrices");
    mats["a"] = matrix_to_json(doc.dlcs->a);
    mats["c"] = matrix_to_json(doc.dlcs->c);
    mats["d"] = matrix_to_json(doc.dlcs->d);
    mats["f"] = matrix_to_json(doc.dlcs->f);
  } else if (doc.kind == "inhomogeneous_dlcs") {
    if (!doc.inhomogeneous)
      throw InputError("system document: kind 'inhomogeneous_dlcs' without matrices");
    mats["a"] = matrix_to_json(doc.inhomogeneous->base.a);
    mats["c"] = matrix_to_json(doc.inhomogeneous->base.c);
    mats["d"] = matrix_to_json(doc.inhomogeneous->base.d);
    mats["f"] = matrix_to_json(doc.inhomogeneous->base.f);
    j["g"] = vector_to_json(doc.inhomogeneous->g);
    j["h"] = vector_to_json(doc.inhomogeneous->h);
  } else {
    throw InputError("system document: unknown kind '" + doc.kind + "'");
  }
  j["matrices"] = std::move(mats);
  return j;
}

SystemDocument system_document_from_json(const json& j) {
  if (!j.is_object()) throw InputError("system document: expected an object");
  if (require(j, "schema").get<std::string>() != "copostab/system-v1")
    throw InputError("system document: unsupported schema");
  SystemDocument doc;
  doc.name = require(j, "name").get<std::string>();
  doc.kind = require(j, "kind").get<std::string>();
  const json& mats = require(j, "matrices");
  try {
    if (doc.kind == "lcs") {
      Lcs s;
      s.a_tilde = matrix_from_json(require(mats, "a_tilde"));
      s.c_tilde = matrix_from_json(require(mats, "c_tilde"));
      s.d_tilde = matrix_from_json(require(mats, "d_tilde"));
      s.f_tilde = matrix_from_json(require(mats, "f_tilde"));
      s.validate();
      doc.lcs = std::move(s);
    } else if (doc.kind == "dlcs") {
      Dlcs s;
      s.a = matrix_from_json(require(mats, "a"));
      s.c = matrix_from_json(require(mats, "c"));
      s.d = matrix_from_json(require(mats, "d"));
      s.f = matrix_from_json(require(mats, "f"));
      s.validate();
      doc.dlcs = std::move(s);
    } else if (doc.kind == "inhomogeneous_dlcs") {
      InhomogeneousDlcs s;
      s.base.a = matrix_from_json(require(mats, "a"));
      s.base.c = matrix_from_json(require(mats, "c"));
      s.base.d = matrix_from_json(require(mats, "d"));
      s.base.f = matrix_from_json(require(mats, "f"));
      s.g = vector_from_json(require(j, "g"));
      s.h = vector_from_json(require(j, "h"));
      s.validate();
      doc.inhomogeneous = std::move(s);
    } else {
      throw InputError("system document: unknown kind '" + doc.kind + "'");
    }
  } catch (const DimensionError& e) {
    throw InputError(std::string("system document: ") + e.what());
  }
  if (j.contains("n_x") && j["n_x"].get<int>() != doc.n_x())
    throw InputError("system document: declared n_x does not match matrices");
  if (j.contains("n_c") && j["n_c"].get<int>() != doc.n_c())
    throw InputError("system document: declared n_c does not match matrices");
  return doc;
}

SystemDocument load_system_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open system file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InputError("cannot parse '" + path + "': " + e.what());
  }
  return system_document_from_json(j);
}

std::string content_hash(const json& doc) {
  const std::string canon = doc.dump();
  uint64_t h = 14695981039346656037ull;
  for (unsigned char c : canon) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

json trajectory_to_json(const Trajectory& t) {
  json j;
  json states = json::array();
  for (const Vector& x : t.states) states.push_back(vector_to_json(x));
  j["states"] = std::move(states);
  json mults = json::array();
  for (const Vector& l : t.multipliers) mults.push_back(vector_to_json(l));
  j["multipliers"] = std::move(mults);
  j["branch_log"] = t.branch_log;
  j["residuals"] = t.residuals;
  j["truncated"] = t.truncated;
  return j;
}

Trajectory trajectory_from_json(const json& j) {
  Trajectory t;
  for (const json& x : require(j, "states")) t.states.push_back(vector_from_json(x));
  for (const json& l : require(j, "multipliers")) t.multipliers.push_back(vector_from_json(l));
  t.branch_log = require(j, "branch_log").get<std::vector<uint32_t>>();
  t.residuals = require(j, "residuals").get<std::vector<double>>();
  t.truncated = require(j, "truncated").get<bool>();
  return t;
}

json verdict_to_json(const Verdict& v) {
  json j;
  j["status"] = status_name(v.status);
  j["mode"] = kind_name(v.mode);
  j["margin"] = v.margin;
  j["iterations"] = v.iterations;
  j["seconds"] = v.seconds;
  j["seed_u_count"] = v.seed_u_count;
  j["seed_v_count"] = v.seed_v_count;
  j["warnings"] = v.warnings;
  j["certificate"] = v.certificate ? matrix_to_json(*v.certificate) : json();
  json trace = json::array();
  for (const IterationRecord& r : v.trace) {
    json row;
    row["mu"] = r.mu;
    row["nu1"] = r.nu1 ? json(*r.nu1) : json();
    row["nu2"] = r.nu2 ? json(*r.nu2) : json();
    row["added_u"] = r.added_u;
    row["added_v"] = r.added_v;
    row["degenerate"] = r.degenerate;
    trace.push_back(std::move(row));
  }
  j["trace"] = std::move(trace);
  json cuts;
  json ucuts = json::array();
  for (const Vector& u : v.cuts.u_cuts) ucuts.push_back(vector_to_json(u));
  json vcuts = json::array();
  for (const Vector& w : v.cuts.v_cuts) vcuts.push_back(vector_to_json(w));
  cuts["u"] = std::move(ucuts);
  cuts["v"] = std::move(vcuts);
  j["cuts"] = std::move(cuts);
  return j;
}

Verdict verdict_from_json(const json& j) {
  Verdict v;
  v.status = status_from_name(require(j, "status").get<std::string>());
  v.mode = kind_from_name(require(j, "mode").get<std::string>());
  v.margin = finite_number(require(j, "margin"), "verdict margin");
  v.iterations = require(j, "iterations").get<int>();
  v.seconds = finite_number(require(j, "seconds"), "verdict seconds");
  v.seed_u_count = require(j, "seed_u_count").get<int>();
  v.seed_v_count = require(j, "seed_v_count").get<int>();
  v.warnings = require(j, "warnings").get<std::vector<std::string>>();
  const json& cert = require(j, "certificate");
  if (!cert.is_null()) v.certificate = matrix_from_json(cert);
  for (const json& row : require(j, "trace")) {
    IterationRecord r;
    r.mu = finite_number(require(row, "mu"), "trace mu");
    if (!require(row, "nu1").is_null()) r.nu1 = finite_number(row["nu1"], "trace nu1");
    if (!require(row, "nu2").is_null()) r.nu2 = finite_number(row["nu2"], "trace nu2");
    r.added_u = require(row, "added_u").get<bool>();
    r.added_v = require(row, "added_v").get<bool>();
    r.degenerate = require(row, "degenerate").get<bool>();
    v.trace.push_back(std::move(r));
  }
  const json& cuts = require(j, "cuts");
  for (const json& u : require(cuts, "u")) v.cuts.u_cuts.push_back(vector_from_json(u));
  for (const json& w : require(cuts, "v")) v.cuts.v_cuts.push_back(vector_from_json(w));
  return v;
}

json validation_to_json(const ValidationReport& r) {
  json j;
  j["pass"] = r.pass;
  j["positivity_ok"] = r.positivity_ok;
  j["max_increase"] = r.max_increase;
  j["decay"] = r.decay;
  j["trajectories"] = r.trajectories;
  j["steps_checked"] = r.steps_checked;
  return j;
}

ValidationReport validation_from_json(const json& j) {
  ValidationReport r;
  r.pass = require(j, "pass").get<bool>();
  r.positivity_ok = require(j, "positivity_ok").get<bool>();
  r.max_increase = finite_number(require(j, "max_increase"), "validation max_increase");
  r.decay = finite_number(require(j, "decay"), "validation decay");
  r.trajectories = require(j, "trajectories").get<int>();
  r.steps_checked = require(j, "steps_checked").get<long>();
  return r;
}

json run_report_to_json(const RunReport& r) {
  json j;
  j["schema"] = "copostab/report-v1";
  j["tool_version"] = r.tool_version;
  j["mode"] = r.mode;
  j["input"] = r.input_echo;
  j["input_hash"] = r.input_hash;
  if (r.theta || r.dt) {
    json scheme;
    scheme["theta"] = r.theta ? json(*r.theta) : json();
    scheme["dt"] = r.dt ? json(*r.dt) : json();
    j["scheme"] = std::move(scheme);
  } else {
    j["scheme"] = json();
  }
  j["seed"] = r.seed;
  j["verdict"] = verdict_to_json(r.verdict);
  j["validation"] = r.validation ? validation_to_json(*r.validation) : json();
  return j;
}

RunReport run_report_from_json(const json& j) {
  if (require(j, "schema").get<std::string>() != "copostab/report-v1")
    throw InputError("run report: unsupported schema");
  RunReport r;
  r.tool_version = require(j, "tool_version").get<std::string>();
  r.mode = require(j, "mode").get<std::string>();
  r.input_echo = require(j, "input");
  r.input_hash = require(j, "input_hash").get<std::string>();
  const json& scheme = require(j, "scheme");
  if (!scheme.is_null()) {
    if (!require(scheme, "theta").is_null())
      r.theta = finite_number(scheme["theta"], "scheme theta");
    if (!require(scheme, "dt").is_null()) r.dt = finite_number(scheme["dt"], "scheme dt");
  }
  r.seed = require(j, "seed").get<uint64_t>();
  r.verdict = verdict_from_json(require(j, "verdict"));
  const json& val = require(j, "validation");
  if (!val.is_null()) r.validation = validation_from_json(val);
  return r;
}

}  // namespace copostab
