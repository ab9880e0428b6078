#pragma once

namespace copostab::tol {

// Two orders of magnitude below the verification tolerance eps = 1e-6, so
// kernel noise never flips an algorithmic decision.
inline constexpr double lin = 1e-10;        // linear solve residual bound
inline constexpr double pivot = 1e-12;      // LU pivot magnitude => SingularError
inline constexpr double pd = 1e-10;         // positive-definiteness pivot threshold
inline constexpr double feas = 1e-9;        // LP / polytope feasibility slack
inline constexpr double sym = 1e-9;         // symmetry check slack
inline constexpr double comp = 1e-8;        // complementarity residual bound
inline constexpr double dedup = 1e-8;       // solution dedup radius (inf-norm)
inline constexpr double decrease_slack = 1e-8;  // trajectory Lyapunov decrease slack
inline constexpr double cut_dup = 1e-9;     // duplicate-cut radius (inf-norm)

inline constexpr double default_eps = 1e-6;     // verification tolerance
inline constexpr int default_max_iter = 500;
inline constexpr int max_enum_dim = 12;         // LCP pattern enumeration cap
inline constexpr int piece_budget = 14;         // n_x + 2 n_c cap for cone pieces

}  // namespace copostab::tol
