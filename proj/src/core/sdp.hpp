#pragma once

// Embedded primal-dual interior-point solver for the moment SDPs:
//
//   minimize    c'x
//   subject to  A x = b
//               M(x) = sum_i x_i C_i  PSD   (one matrix block)
//               g_l'x - r_l >= 0            (diagonal block)
//
// Nesterov-Todd scaling with a Mehrotra predictor-corrector, following the
// standard cone-LP formulation (Gx + s = h, Ax = b, s in K). The Schur
// complement over the moment variables is dense and factorized with LAPACK.
// The dual objective is the certified side: for minimization it never
// exceeds the exact optimum (up to the returned residuals), so early termination
// still yields a valid bound.

#include <string>

#include "moment.hpp"

namespace dicert {

struct SolveOptions {
  double tolerance = 1e-8;  // feasibility and relative-gap target
  int max_iterations = 100;
  int verbosity = 0;
};

enum class SolveStatus { Optimal, NearOptimal, Infeasible, SolverError };

const char* to_string(SolveStatus s);

struct SolveResult {
  SolveStatus status = SolveStatus::SolverError;
  double primal_objective = 0.0;  // offset included, sign per instance
  double dual_objective = 0.0;    // certified bound
  Vector x;                       // moment vector at termination
  double gap = 0.0;
  double rel_gap = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  int iterations = 0;
  std::string message;
};

SolveResult solve_sdp(const SDPInstance& instance, const SolveOptions& opts = {});

// Substitutes variables pinned by single-variable equality rows (applied
// repeatedly, so chains of statistics rows collapse) into the pencil
// constants. Returns the reduced instance together with the variable
// mapping; `infeasible` is set when the equality system is inconsistent.
struct PresolveResult {
  SDPInstance reduced;
  std::vector<int> free_index;      // original id -> reduced id, -1 if fixed
  std::vector<double> fixed_value;  // valid where free_index == -1
  bool infeasible = false;
  std::string message;
};
PresolveResult presolve_fixed_variables(const SDPInstance& instance,
                                        double tol = 1e-8);

}  // namespace dicert
