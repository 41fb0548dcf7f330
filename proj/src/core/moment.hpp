#pragma once

// Moment-matrix relaxation of an NPOProblem at a given level: every
// relation-induced identification is applied through canonicalization, words
// related by the adjoint share one real moment variable (real-matrix mode,
// the default), and the result is embedded into a solver-ready SDP or the
// sparse SDPA text format.

#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "npo.hpp"

namespace dicert {

struct MomentOptions {
  bool real_mode = true;      // identify moment(w) = moment(w^dag)
  bool auto_complete = true;  // insert shortest completing monomials
};

struct SparseRow {
  std::vector<std::pair<int, double>> terms;  // (variable id, coefficient)
  Sense sense = Sense::Equal;
  double bound = 0.0;
  std::string name;
};

struct MomentProblem {
  GeneratorSet gens;
  std::vector<Word> basis;
  std::map<Word, int> index;    // representative word -> variable id, id 0 = identity
  Eigen::MatrixXi structure;    // entry (i,j): variable id of canon(b_i^dag b_j), -1 if zero
  bool real_mode = true;
  std::map<Word, int> im_index; // complex mode: representative -> imaginary-part id
  Eigen::MatrixXi im_structure; // imaginary-part id per entry, -1 if none
  Eigen::MatrixXi im_sign;      // orientation of the entry relative to the representative
  int num_vars = 0;             // real parts (complex mode appends im parts after these)
  int num_im_vars = 0;

  std::vector<SparseRow> equalities;    // statistics rows with sense ==
  std::vector<SparseRow> inequalities;  // statistics rows with sense >=
  SparseRow objective;
  double objective_offset = 0.0;
  bool maximize = false;

  int matrix_size() const { return static_cast<int>(basis.size()); }
  int total_vars() const { return num_vars + num_im_vars; }
};

MomentProblem moment_matrix(const NPOProblem& problem, int level,
                            const std::vector<ExtraPattern>& extras = {},
                            const MomentOptions& opts = {});

// Solver-ready form: one PSD block (the moment matrix, real-embedded in
// complex mode), a nonnegative diagonal block of inequality slacks, explicit
// equality rows (normalization first), and a linear objective.
struct SDPInstance {
  struct PsdEntry {
    int i, j;   // upper triangle, 0-based
    double c;
  };
  int psd_dim = 0;
  int num_vars = 0;
  std::vector<std::vector<PsdEntry>> pencil;  // per variable
  std::vector<PsdEntry> psd_const;            // constant part of the PSD block
  struct LinRow {
    std::vector<std::pair<int, double>> terms;
    double rhs = 0.0;
  };
  std::vector<LinRow> lp_rows;  // terms . x - rhs >= 0
  std::vector<LinRow> eq_rows;  // terms . x = rhs
  std::vector<double> objective;
  double objective_offset = 0.0;
  bool maximize = false;
  // Every variable is a (real part of a) moment of a contraction, so its
  // magnitude is at most 1; enables a rigorous repair of the dual bound.
  bool bounded_vars = false;

  // Minimization form (negated objective when maximize); used by the SDPA
  // writer and for round-trip comparisons.
  SDPInstance normalized() const;
};

SDPInstance to_sdp(const MomentProblem& mp);

// Sparse SDPA ".dat-s": header, objective line, then one "k b i j v" entry
// per nonzero (1-indexed, upper triangle). Equality rows are written as
// opposing inequality pairs in the diagonal block and recombined on parse.
void export_sdpa(const SDPInstance& instance, const std::string& path);
std::string sdpa_string(const SDPInstance& instance);
SDPInstance parse_sdpa(const std::string& path);

}  // namespace dicert
