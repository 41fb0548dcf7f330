#pragma once

// Bell-scenario descriptions, built-in Bell functionals, their evaluation on
// conditional probability tables, and the translation of observed statistics
// into linear constraints.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "common.hpp"
#include "dense_oracle.hpp"

namespace dicert {

struct Scenario {
  int alice_inputs = 2;
  int bob_inputs = 2;
  int alice_outcomes = 2;  // per input
  int bob_outcomes = 2;    // per input

  bool operator==(const Scenario&) const = default;
  std::string tag() const {
    return std::to_string(alice_inputs) + std::to_string(bob_inputs) +
           std::to_string(alice_outcomes) + std::to_string(bob_outcomes);
  }
};

enum class Sense { GreaterEqual, LessEqual, Equal };

// Linear functional sum_{abxy} c[abxy] p(a,b|x,y) + offset, optionally with a
// constraint sense and threshold.
struct BellFunctional {
  Scenario scenario;
  std::vector<double> coeffs;  // indexed via coeff_index
  double offset = 0.0;
  Sense sense = Sense::GreaterEqual;
  double threshold = 0.0;
  std::string name;

  static int coeff_index(const Scenario& s, int a, int b, int x, int y) {
    return ((a * s.bob_outcomes + b) * s.alice_inputs + x) * s.bob_inputs + y;
  }
  double& at(int a, int b, int x, int y) {
    return coeffs[coeff_index(scenario, a, b, x, y)];
  }
  double at(int a, int b, int x, int y) const {
    return coeffs[coeff_index(scenario, a, b, x, y)];
  }
};

// Conditional probability table p(a,b|x,y).
struct Distribution {
  Scenario scenario;
  std::vector<double> p;  // same indexing as BellFunctional::coeff_index

  static Distribution zero(const Scenario& s);
  double& at(int a, int b, int x, int y) {
    return p[BellFunctional::coeff_index(scenario, a, b, x, y)];
  }
  double at(int a, int b, int x, int y) const {
    return p[BellFunctional::coeff_index(scenario, a, b, x, y)];
  }
  // Checks nonnegativity (>= -1e-12) and per-setting normalization (1e-9).
  void validate() const;
};

// CHSH correlator functional <A0B0 + A0B1 + A1B0 - A1B1> on the 2222
// scenario, with A_x = M(0|x) - M(1|x).
BellFunctional chsh();

// CGLMP functional for d = 3 on the 2233 scenario; classical bound 2.
BellFunctional cglmp3();

// I3322 in symmetric correlator form on the 3322 scenario; classical bound 4.
BellFunctional i3322();

double bell_value(const BellFunctional& f, const Distribution& d);

// Deterministic local strategy evaluation: brute-force maximum of the
// functional over all assignments of outcomes to inputs.
double classical_bound(const BellFunctional& f);

// Distribution of a deterministic strategy (outcome per input for each side).
Distribution deterministic_distribution(const Scenario& s,
                                        const std::vector<int>& alice_outcome_of_x,
                                        const std::vector<int>& bob_outcome_of_y);

// One equality functional per retained probability entry; `settings` empty
// means the full table.
std::vector<BellFunctional> distribution_constraints(
    const Distribution& d,
    const std::vector<std::pair<int, int>>& settings = {});

// Born-rule table of the honest two-qubit implementation; exactly
// non-signalling and normalized per setting pair.
Distribution honest_statistics(const StateSpec& spec,
                               const MeasurementAngleSet& angles);

}  // namespace dicert
