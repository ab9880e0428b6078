#pragma once

#include <json.hpp>
#include <optional>
#include <string>

#include "copostab/cpa.hpp"
#include "copostab/lyapunov.hpp"
#include "copostab/system.hpp"

namespace copostab {

inline constexpr const char* kToolVersion = "copostab 1.0.0";

// Matrices are stored as nested row-major arrays; throws InputError on
// ragged rows or non-finite entries.
nlohmann::json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& j);
nlohmann::json vector_to_json(const Vector& v);
Vector vector_from_json(const nlohmann::json& j);

// One named system of any supported kind.
struct SystemDocument {
  std::string name;
  std::string kind;  // "lcs" | "dlcs" | "inhomogeneous_dlcs"
  std::optional<Lcs> lcs;
  std::optional<Dlcs> dlcs;
  std::optional<InhomogeneousDlcs> inhomogeneous;

  int n_x() const;
  int n_c() const;
};

SystemDocument make_system_document(std::string name, Lcs sys);
SystemDocument make_system_document(std::string name, Dlcs sys);
SystemDocument make_system_document(std::string name, InhomogeneousDlcs sys);

nlohmann::json system_document_to_json(const SystemDocument& doc);
SystemDocument system_document_from_json(const nlohmann::json& j);
SystemDocument load_system_file(const std::string& path);

// FNV-1a 64-bit hash of the canonical (sorted-key) encoding, as 16 hex chars.
std::string content_hash(const nlohmann::json& doc);

nlohmann::json trajectory_to_json(const Trajectory& t);
Trajectory trajectory_from_json(const nlohmann::json& j);

nlohmann::json verdict_to_json(const Verdict& v);
Verdict verdict_from_json(const nlohmann::json& j);

nlohmann::json validation_to_json(const ValidationReport& r);
ValidationReport validation_from_json(const nlohmann::json& j);

// Machine-readable record of one verification run.
struct RunReport {
  std::string tool_version = kToolVersion;
  std::string mode;           // "cqlf" | "eqlf"
  nlohmann::json input_echo;  // the system document as received
  std::string input_hash;
  std::optional<double> theta, dt;  // present when the input was discretized
  uint64_t seed = 0;
  Verdict verdict;
  std::optional<ValidationReport> validation;
};

nlohmann::json run_report_to_json(const RunReport& r);
RunReport run_report_from_json(const nlohmann::json& j);

}  // namespace copostab
