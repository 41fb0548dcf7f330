#pragma once

// Assembly of the noncommutative polynomial optimization problems whose
// relaxations certify entropy bounds: the one-sided and two-sided
// conditional-entropy problems (one Eve-side projector per integration node
// and outcome), and the guessing-probability problem for min-entropy.

#include <optional>
#include <vector>

#include "grid.hpp"
#include "nc_algebra.hpp"
#include "scenario.hpp"

namespace dicert {

enum class NodeMode { Joint, PerNode };

struct NPOConstraint {
  Polynomial poly;  // identity word carries the constant part
  Sense sense = Sense::GreaterEqual;
  double bound = 0.0;
  std::string name;
};

struct NPOProblem {
  GeneratorSet gens;
  Scenario scenario;
  Polynomial objective;          // coefficients in bits (1/ln2 applied)
  double objective_offset = 0.0; // bits
  bool maximize = false;
  std::vector<NPOConstraint> constraints;
  NodeMode mode = NodeMode::Joint;
  int node_index = -1;           // which node a per-node subproblem carries
  int key_input_alice = 0;
  std::optional<int> key_input_bob;
  GridCoefficients grid;         // empty for min-entropy / Bell problems
};

// Lower bound problems for H(A | X = key_input, E). Joint mode returns one
// problem with (r+1)*|A| node projectors and offset (|A|-1)/ln2; per-node
// mode returns r+1 problems with zero offset whose optima are summed by the
// caller (plus the same offset). The cq ordering forces grid lambda = 1.
std::vector<NPOProblem> one_sided(const Scenario& scenario,
                                  const std::vector<BellFunctional>& constraints,
                                  const GridCoefficients& grid, int key_input,
                                  NodeMode mode);

// Same for H(AB | X = key_a, Y = key_b, E); node projectors are indexed by
// outcome pairs and the joint offset is (|A||B|-1)/ln2.
std::vector<NPOProblem> two_sided(const Scenario& scenario,
                                  const std::vector<BellFunctional>& constraints,
                                  const GridCoefficients& grid, int key_a,
                                  int key_b, NodeMode mode);

// Guessing-probability maximization sup sum_a <M(a|key) C_a> with an
// Eve-side projective POVM; H_min = -log2(optimum) is applied by the caller.
NPOProblem min_entropy_problem(const Scenario& scenario,
                               const std::vector<BellFunctional>& constraints,
                               int key_input);

// Optional guessing of the outcome pair: objective sup sum_ab
// <M(a|key_a) N(b|key_b) C_ab> with one POVM element per pair.
NPOProblem min_entropy_problem_two_sided(const Scenario& scenario,
                                         const std::vector<BellFunctional>& constraints,
                                         int key_a, int key_b);

// Maximization of a Bell functional over the measurement-only algebra.
NPOProblem max_bell_problem(const BellFunctional& functional);

// The functional as a polynomial in the (eliminated-outcome) generators,
// constant part included.
Polynomial bell_polynomial(const GeneratorSet& gens, const BellFunctional& f);

// Translates functional rows into NPO constraints.
std::vector<NPOConstraint> to_npo_constraints(
    const GeneratorSet& gens, const std::vector<BellFunctional>& rows);

}  // namespace dicert
