#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "copostab/cpa.hpp"
#include "copostab/errors.hpp"
#include "copostab/json_io.hpp"
#include "copostab/linalg.hpp"
#include "copostab/lyapunov.hpp"
#include "copostab/miqcp.hpp"
#include "copostab/registry.hpp"
#include "copostab/rng.hpp"
#include "copostab/system.hpp"
#include "copostab/tol.hpp"

namespace {

using copostab::CertificateKind;
using copostab::CpaStatus;
using copostab::Dlcs;
using copostab::Lcs;
using copostab::Matrix;
using copostab::SystemDocument;
using copostab::Vector;
using nlohmann::json;

constexpr int kExitFeasible = 0;
constexpr int kExitInfeasible = 1;
constexpr int kExitIterationLimit = 2;
constexpr int kExitInputError = 3;
constexpr int kExitValidationFailed = 4;

struct InputOptions {
  std::string file;
  std::string example;
};

struct SchemeOptions {
  std::string scheme;  // "explicit" | "implicit" | "theta=T"
  double dt = 0.0;
  bool dt_set = false;
};

void add_input_options(CLI::App* cmd, InputOptions& in) {
  cmd->add_option("system", in.file, "system document (JSON file)");
  cmd->add_option("--example", in.example, "bundled benchmark name");
}

void add_scheme_options(CLI::App* cmd, SchemeOptions& sc) {
  cmd->add_option("--scheme", sc.scheme, "time stepping: explicit, implicit, or theta=T");
  cmd->add_option("--dt", sc.dt, "time step")->check(CLI::PositiveNumber)->each([&sc](const std::string&) {
    sc.dt_set = true;
  });
}

SystemDocument resolve_input(const InputOptions& in) {
  if (!in.file.empty() && !in.example.empty())
    throw copostab::InputError("give either a system file or --example, not both");
  if (!in.file.empty()) return copostab::load_system_file(in.file);
  if (!in.example.empty()) return copostab::example_system(in.example);
  throw copostab::InputError("no input: give a system file or --example NAME");
}

double parse_theta(const std::string& scheme) {
  if (scheme == "explicit") return 0.0;
  if (scheme == "implicit") return 1.0;
  if (scheme.rfind("theta=", 0) == 0) {
    size_t used = 0;
    double theta = std::stod(scheme.substr(6), &used);
    if (used != scheme.size() - 6 || theta < 0.0 || theta > 1.0)
      throw copostab::InputError("scheme theta must be a number in [0, 1]");
    return theta;
  }
  throw copostab::InputError("unknown scheme '" + scheme + "'");
}

CertificateKind parse_mode(const std::string& mode) {
  if (mode == "cqlf") return CertificateKind::Cqlf;
  if (mode == "eqlf") return CertificateKind::Eqlf;
  throw copostab::InputError("unknown mode '" + mode + "' (expected cqlf or eqlf)");
}

uint64_t effective_seed(uint64_t flag_seed) {
  if (const char* env = std::getenv("COPOSTAB_SEED")) {
    char* end = nullptr;
    uint64_t v = std::strtoull(env, &end, 10);
    if (end && *end == '\0') return v;
    throw copostab::InputError("COPOSTAB_SEED is not an unsigned integer");
  }
  return flag_seed;
}

// Discretizes LCS documents; passes DLCS documents through; reduces
// inhomogeneous documents around their first equilibrium.
Dlcs to_dlcs(const SystemDocument& doc, const SchemeOptions& sc, std::optional<double>* theta_out,
             std::optional<double>* dt_out) {
  if (doc.lcs) {
    if (sc.scheme.empty() || !sc.dt_set)
      throw copostab::InputError("continuous systems need --scheme and --dt");
    double theta = parse_theta(sc.scheme);
    if (theta_out) *theta_out = theta;
    if (dt_out) *dt_out = sc.dt;
    return copostab::discretize(*doc.lcs, sc.dt, theta);
  }
  if (!sc.scheme.empty() || sc.dt_set)
    throw copostab::InputError("--scheme/--dt only apply to continuous systems");
  if (doc.dlcs) return *doc.dlcs;
  auto equilibria = copostab::find_equilibrium(*doc.inhomogeneous);
  return copostab::reduce_inhomogeneous(*doc.inhomogeneous, equilibria.front());
}

void write_json(const json& j, const std::string& path) {
  if (path.empty()) return;
  std::ofstream out(path);
  if (!out) throw copostab::InputError("cannot write '" + path + "'");
  out << j.dump(2) << "\n";
}

const char* status_word(CpaStatus s) {
  switch (s) {
    case CpaStatus::Feasible: return "Feasible";
    case CpaStatus::Infeasible: return "Infeasible";
    default: return "IterationLimit";
  }
}

int status_exit(CpaStatus s) {
  switch (s) {
    case CpaStatus::Feasible: return kExitFeasible;
    case CpaStatus::Infeasible: return kExitInfeasible;
    default: return kExitIterationLimit;
  }
}

Vector parse_csv_vector(const std::string& csv) {
  Vector v;
  size_t pos = 0;
  while (pos <= csv.size()) {
    size_t comma = csv.find(',', pos);
    std::string tok = csv.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    size_t used = 0;
    try {
      v.push_back(std::stod(tok, &used));
    } catch (const std::exception&) {
      throw copostab::InputError("bad number '" + tok + "' in CSV vector");
    }
    if (used != tok.size()) throw copostab::InputError("bad number '" + tok + "' in CSV vector");
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return v;
}

// ---------------------------------------------------------------- check

struct CheckArgs {
  InputOptions in;
  SchemeOptions sc;
  std::string mode = "cqlf";
  double eps = copostab::tol::default_eps;
  int max_iter = copostab::tol::default_max_iter;
  uint64_t seed = 0;
  bool fast_sep = false;
  bool validate = false;
  int jobs = 1;
  std::string out;
};

int run_check(const CheckArgs& args) {
  SystemDocument doc = resolve_input(args.in);
  CertificateKind kind = parse_mode(args.mode);

  copostab::RunReport report;
  report.mode = args.mode;
  report.input_echo = copostab::system_document_to_json(doc);
  report.input_hash = copostab::content_hash(report.input_echo);
  Dlcs sys = to_dlcs(doc, args.sc, &report.theta, &report.dt);

  copostab::CpaOptions opts;
  opts.eps = args.eps;
  opts.max_iter = args.max_iter;
  opts.seed = effective_seed(args.seed);
  opts.fast_sep = args.fast_sep;
  report.seed = opts.seed;

  report.verdict = copostab::run_cutting_plane(sys, kind, opts);
  const copostab::Verdict& v = report.verdict;

  bool validation_failed = false;
  if (args.validate && v.status == CpaStatus::Feasible) {
    copostab::Certificate cert{kind, *v.certificate};
    report.validation = copostab::validate_certificate(sys, cert, 100, 200, opts.seed);
    validation_failed = !report.validation->pass;
  }

  std::printf("%-8s %-5s %-14s  best mu %-13.6e  iters %-4d  time %.3fs\n", doc.name.c_str(),
              args.mode.c_str(), status_word(v.status), v.margin, v.iterations, v.seconds);
  for (const std::string& w : v.warnings) std::printf("  warning: %s\n", w.c_str());
  if (report.validation)
    std::printf("  validation: %s (max increase %.3e, decay %.6f)\n",
                report.validation->pass ? "pass" : "FAIL", report.validation->max_increase,
                report.validation->decay);

  write_json(copostab::run_report_to_json(report), args.out);
  if (validation_failed) return kExitValidationFailed;
  return status_exit(v.status);
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  InputOptions in;
  SchemeOptions sc;
  std::string x0_csv;
  int random_starts = 0;
  int steps = 100;
  std::string policy = "lex";
  uint64_t seed = 0;
  std::string out;
};

int run_simulate(const SimulateArgs& args) {
  SystemDocument doc = resolve_input(args.in);
  if (doc.inhomogeneous)
    throw copostab::InputError("simulate expects an lcs or dlcs document");
  std::optional<double> theta, dt;
  Dlcs sys = to_dlcs(doc, args.sc, &theta, &dt);

  copostab::BranchPolicy policy;
  if (args.policy == "lex")
    policy = copostab::BranchPolicy::Lex;
  else if (args.policy == "random")
    policy = copostab::BranchPolicy::Random;
  else if (args.policy == "all")
    policy = copostab::BranchPolicy::All;
  else
    throw copostab::InputError("unknown policy '" + args.policy + "'");

  uint64_t seed = effective_seed(args.seed);
  std::vector<Vector> starts;
  if (!args.x0_csv.empty()) {
    Vector x0 = parse_csv_vector(args.x0_csv);
    if (static_cast<int>(x0.size()) != sys.n_x())
      throw copostab::InputError("--x0 length does not match the state dimension");
    starts.push_back(std::move(x0));
  }
  if (args.random_starts > 0) {
    copostab::Rng rng(seed);
    for (int i = 0; i < args.random_starts; ++i) starts.push_back(rng.unit_sphere(sys.n_x()));
  }
  if (starts.empty()) throw copostab::InputError("give --x0 or --random N");

  json runs = json::array();
  for (const Vector& x0 : starts) {
    auto trajectories = copostab::simulate(sys, x0, args.steps, policy, seed);
    double max_residual = 0.0;
    json tjs = json::array();
    for (const copostab::Trajectory& t : trajectories) {
      for (double r : t.residuals) max_residual = std::max(max_residual, r);
      tjs.push_back(copostab::trajectory_to_json(t));
    }
    json run;
    run["x0"] = copostab::vector_to_json(x0);
    run["branch_count"] = trajectories.size();
    run["max_residual"] = max_residual;
    run["trajectories"] = std::move(tjs);
    runs.push_back(std::move(run));
    std::printf("x0 size %zu: %zu branch(es), %d step(s), max residual %.3e\n", x0.size(),
                trajectories.size(), args.steps, max_residual);
  }

  json out;
  out["schema"] = "copostab/trajectories-v1";
  out["input"] = copostab::system_document_to_json(doc);
  out["input_hash"] = copostab::content_hash(out["input"]);
  if (theta || dt) {
    json scheme;
    scheme["theta"] = theta ? json(*theta) : json();
    scheme["dt"] = dt ? json(*dt) : json();
    out["scheme"] = std::move(scheme);
  } else {
    out["scheme"] = json();
  }
  out["policy"] = args.policy;
  out["steps"] = args.steps;
  out["seed"] = seed;
  out["runs"] = std::move(runs);
  write_json(out, args.out);
  return kExitFeasible;
}

// ---------------------------------------------------------------- discretize

struct DiscretizeArgs {
  InputOptions in;
  SchemeOptions sc;
  std::string out;
};

int run_discretize(const DiscretizeArgs& args) {
  SystemDocument doc = resolve_input(args.in);
  if (!doc.lcs) throw copostab::InputError("discretize expects an lcs document");
  std::optional<double> theta, dt;
  Dlcs sys = to_dlcs(doc, args.sc, &theta, &dt);

  const Lcs& lcs = *doc.lcs;
  const int n = lcs.n_x();
  double norm_a = copostab::spectral_norm(lcs.a_tilde);
  Matrix resolvent = Matrix::identity(n) + (-*theta * *dt) * lcs.a_tilde;
  Matrix ra = copostab::solve_linear_multi(resolvent, lcs.a_tilde);
  double norm_ra = copostab::spectral_norm(ra);
  std::printf("dt*theta*|state matrix| = %.6f, dt*|resolvent state matrix| = %.6f\n",
              *dt * *theta * norm_a, *dt * norm_ra);

  SystemDocument out_doc = copostab::make_system_document(doc.name, sys);
  json j = copostab::system_document_to_json(out_doc);
  if (args.out.empty())
    std::printf("%s\n", j.dump(2).c_str());
  else
    write_json(j, args.out);
  return kExitFeasible;
}

// ---------------------------------------------------------------- sweep

struct SweepArgs {
  InputOptions in;
  std::string mode = "cqlf";
  std::string scheme;
  std::string dts_csv;
  double eps = copostab::tol::default_eps;
  int max_iter = copostab::tol::default_max_iter;
  uint64_t seed = 0;
  int jobs = 1;
  std::string out;
};

int run_sweep(const SweepArgs& args) {
  SystemDocument doc = resolve_input(args.in);
  if (!doc.lcs) throw copostab::InputError("sweep expects an lcs document");
  CertificateKind kind = parse_mode(args.mode);
  if (args.scheme.empty()) throw copostab::InputError("sweep needs --scheme");
  double theta = parse_theta(args.scheme);
  Vector dts = parse_csv_vector(args.dts_csv);
  if (dts.empty()) throw copostab::InputError("sweep needs --dts d1,d2,...");
  for (double dt : dts)
    if (dt <= 0.0) throw copostab::InputError("sweep time steps must be positive");

  copostab::CpaOptions opts;
  opts.eps = args.eps;
  opts.max_iter = args.max_iter;
  opts.seed = effective_seed(args.seed);

  const Lcs& lcs = *doc.lcs;
  std::vector<copostab::Verdict> verdicts;
  json runs = json::array();
  for (double dt : dts) {
    Dlcs sys = copostab::discretize(lcs, dt, theta);
    copostab::Verdict v = copostab::run_cutting_plane(sys, kind, opts);
    std::printf("dt %-8g %-14s best mu %-13.6e iters %-4d time %.3fs\n", dt,
                status_word(v.status), v.margin, v.iterations, v.seconds);
    json row;
    row["dt"] = dt;
    row["verdict"] = copostab::verdict_to_json(v);
    runs.push_back(std::move(row));
    verdicts.push_back(std::move(v));
  }

  // Reference candidate for the scheme-consistency residual: the state block
  // of the first feasible certificate, or the identity if none exists.
  const int nx = lcs.n_x();
  Matrix p_ref = Matrix::identity(nx);
  std::string ref_label = "identity";
  for (size_t i = 0; i < verdicts.size(); ++i) {
    if (verdicts[i].status != CpaStatus::Feasible) continue;
    const Matrix& cert = *verdicts[i].certificate;
    Matrix block(nx, nx);
    for (int r = 0; r < nx; ++r)
      for (int c = 0; c < nx; ++c) block(r, c) = cert(r, c);
    p_ref = std::move(block);
    ref_label = "certificate@dt=" + std::to_string(dts[i]);
    break;
  }

  json margin_ratios = json::array();
  json residual_ratios = json::array();
  for (size_t i = 0; i + 1 < dts.size(); ++i) {
    bool both_feasible = verdicts[i].status == CpaStatus::Feasible &&
                         verdicts[i + 1].status == CpaStatus::Feasible;
    margin_ratios.push_back(both_feasible ? json(verdicts[i].margin / verdicts[i + 1].margin)
                                          : json());
    double r0 = copostab::decrease_residual_vs_continuous(lcs, p_ref, dts[i], theta);
    double r1 = copostab::decrease_residual_vs_continuous(lcs, p_ref, dts[i + 1], theta);
    residual_ratios.push_back(r1 > 1e-300 ? json(r0 / r1) : json());
    if (both_feasible)
      std::printf("mu ratio dt %g : dt %g = %.4f\n", dts[i], dts[i + 1],
                  verdicts[i].margin / verdicts[i + 1].margin);
    if (r1 > 1e-300)
      std::printf("decrease-residual ratio dt %g : dt %g = %.4f\n", dts[i], dts[i + 1], r0 / r1);
  }

  json out;
  out["schema"] = "copostab/sweep-v1";
  out["input"] = copostab::system_document_to_json(doc);
  out["input_hash"] = copostab::content_hash(out["input"]);
  out["mode"] = args.mode;
  out["theta"] = theta;
  out["seed"] = opts.seed;
  out["runs"] = std::move(runs);
  out["margin_ratios"] = std::move(margin_ratios);
  out["residual_ratios"] = std::move(residual_ratios);
  out["residual_reference"] = ref_label;
  write_json(out, args.out);
  return kExitFeasible;
}

// ---------------------------------------------------------------- examples

struct ExamplesArgs {
  std::string dump;
  std::string out;
};

int run_examples(const ExamplesArgs& args) {
  if (!args.dump.empty()) {
    SystemDocument doc = copostab::example_system(args.dump);
    json j = copostab::system_document_to_json(doc);
    if (args.out.empty())
      std::printf("%s\n", j.dump(2).c_str());
    else
      write_json(j, args.out);
    return kExitFeasible;
  }
  for (const std::string& name : copostab::example_names()) {
    SystemDocument doc = copostab::example_system(name);
    std::printf("%-8s %-20s n_x=%d n_c=%d\n", name.c_str(), doc.kind.c_str(), doc.n_x(),
                doc.n_c());
  }
  return kExitFeasible;
}

// ---------------------------------------------------------------- export-miqcp

struct ExportArgs {
  InputOptions in;
  SchemeOptions sc;
  std::string mode = "cqlf";
  std::string side = "dec";
  std::string p_file;
  std::string out;
};

int run_export(const ExportArgs& args) {
  SystemDocument doc = resolve_input(args.in);
  CertificateKind kind = parse_mode(args.mode);
  copostab::SeparationSide side;
  if (args.side == "pos")
    side = copostab::SeparationSide::Positivity;
  else if (args.side == "dec")
    side = copostab::SeparationSide::Decrease;
  else
    throw copostab::InputError("unknown side '" + args.side + "' (expected pos or dec)");

  std::optional<double> theta, dt;
  Dlcs sys = to_dlcs(doc, args.sc, &theta, &dt);

  Matrix p;
  if (!args.p_file.empty()) {
    std::ifstream in(args.p_file);
    if (!in) throw copostab::InputError("cannot open candidate file '" + args.p_file + "'");
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw copostab::InputError(std::string("cannot parse candidate matrix: ") + e.what());
    }
    p = copostab::matrix_from_json(j);
  } else {
    int n = kind == CertificateKind::Cqlf ? sys.n_x() : sys.n_x() + sys.n_c();
    p = Matrix::identity(n);
  }

  json j = copostab::export_separation_miqcp(p, sys, kind, side);
  if (args.out.empty())
    std::printf("%s\n", j.dump(2).c_str());
  else
    write_json(j, args.out);
  return kExitFeasible;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stability certificates for discrete-time linear complementarity systems"};
  app.require_subcommand(1);

  CheckArgs check_args;
  CLI::App* check = app.add_subcommand("check", "decide stability via the cutting-plane method");
  add_input_options(check, check_args.in);
  add_scheme_options(check, check_args.sc);
  check->add_option("--mode", check_args.mode, "certificate kind: cqlf or eqlf");
  check->add_option("--eps", check_args.eps, "separation tolerance");
  check->add_option("--max-iter", check_args.max_iter, "iteration cap");
  check->add_option("--seed", check_args.seed, "seed for the initial cut draw");
  check->add_flag("--fast-sep", check_args.fast_sep, "stop a separation pass at the first violation");
  check->add_flag("--validate", check_args.validate, "simulate trajectories against the certificate");
  check->add_option("--jobs", check_args.jobs, "worker cap")->check(CLI::PositiveNumber);
  check->add_option("-o,--output", check_args.out, "write the run report (JSON)");

  SimulateArgs sim_args;
  CLI::App* sim = app.add_subcommand("simulate", "roll out trajectories");
  add_input_options(sim, sim_args.in);
  add_scheme_options(sim, sim_args.sc);
  sim->add_option("--x0", sim_args.x0_csv, "initial state as CSV");
  sim->add_option("--random", sim_args.random_starts, "number of random unit-sphere starts");
  sim->add_option("--steps", sim_args.steps, "number of steps")->check(CLI::NonNegativeNumber);
  sim->add_option("--policy", sim_args.policy, "branch policy: lex, random, or all");
  sim->add_option("--seed", sim_args.seed, "seed for starts and random branching");
  sim->add_option("-o,--output", sim_args.out, "write trajectories (JSON)");

  DiscretizeArgs disc_args;
  CLI::App* disc = app.add_subcommand("discretize", "time-step a continuous system");
  add_input_options(disc, disc_args.in);
  add_scheme_options(disc, disc_args.sc);
  disc->add_option("-o,--output", disc_args.out, "write the discrete system (JSON)");

  SweepArgs sweep_args;
  CLI::App* sweep = app.add_subcommand("sweep", "run one system across several time steps");
  add_input_options(sweep, sweep_args.in);
  sweep->add_option("--mode", sweep_args.mode, "certificate kind: cqlf or eqlf");
  sweep->add_option("--scheme", sweep_args.scheme, "time stepping: explicit, implicit, or theta=T");
  sweep->add_option("--dts", sweep_args.dts_csv, "comma-separated time steps");
  sweep->add_option("--eps", sweep_args.eps, "separation tolerance");
  sweep->add_option("--max-iter", sweep_args.max_iter, "iteration cap");
  sweep->add_option("--seed", sweep_args.seed, "seed for the initial cut draw");
  sweep->add_option("--jobs", sweep_args.jobs, "worker cap")->check(CLI::PositiveNumber);
  sweep->add_option("-o,--output", sweep_args.out, "write the sweep summary (JSON)");

  ExamplesArgs ex_args;
  CLI::App* examples = app.add_subcommand("examples", "list or dump bundled benchmarks");
  examples->add_option("--dump", ex_args.dump, "print one benchmark as a system document");
  examples->add_option("-o,--output", ex_args.out, "write the dumped document (JSON)");

  ExportArgs export_args;
  CLI::App* exp = app.add_subcommand("export-miqcp",
                                     "emit a separation problem as a mixed-integer model");
  add_input_options(exp, export_args.in);
  add_scheme_options(exp, export_args.sc);
  exp->add_option("--mode", export_args.mode, "certificate kind: cqlf or eqlf");
  exp->add_option("--side", export_args.side, "which separation: pos or dec");
  exp->add_option("--candidate", export_args.p_file, "candidate matrix (JSON rows), identity if absent");
  exp->add_option("-o,--output", export_args.out, "write the model (JSON)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (check->parsed()) return run_check(check_args);
    if (sim->parsed()) return run_simulate(sim_args);
    if (disc->parsed()) return run_discretize(disc_args);
    if (sweep->parsed()) return run_sweep(sweep_args);
    if (examples->parsed()) return run_examples(ex_args);
    if (exp->parsed()) return run_export(export_args);
  } catch (const copostab::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInputError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInputError;
  }
  return kExitInputError;
}
