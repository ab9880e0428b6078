#pragma once

#include <json.hpp>

#include "copostab/lyapunov.hpp"
#include "copostab/system.hpp"

namespace copostab {

enum class SeparationSide { Positivity, Decrease };

// Self-contained mixed-integer quadratic document for one separation
// problem: split state variables, multiplier supports as binaries, big-M
// activation rows, the unit 1-norm slice, and the quadratic objective in
// coordinate (row, col, value) triplets. An external solver can reproduce
// the exact separation optimum from this document alone.
nlohmann::json export_separation_miqcp(const Matrix& p, const Dlcs& sys,
                                       CertificateKind mode, SeparationSide which);

}  // namespace copostab
