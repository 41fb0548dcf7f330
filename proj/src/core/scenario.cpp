#include "scenario.hpp"

#include <unsupported/Eigen/KroneckerProduct>

namespace dicert {

Distribution Distribution::zero(const Scenario& s) {
  Distribution d;
  d.scenario = s;
  d.p.assign(static_cast<size_t>(s.alice_inputs) * s.bob_inputs *
                 s.alice_outcomes * s.bob_outcomes,
             0.0);
  return d;
}

void Distribution::validate() const {
  const Scenario& s = scenario;
  size_t expect = static_cast<size_t>(s.alice_inputs) * s.bob_inputs *
                  s.alice_outcomes * s.bob_outcomes;
  if (p.size() != expect) {
    throw InvalidArgument("Distribution: table size " + std::to_string(p.size()) +
                          " does not match scenario " + s.tag());
  }
  for (double v : p) {
    if (v < -1e-12) {
      throw InvalidArgument("Distribution: negative probability " + std::to_string(v));
    }
  }
  for (int x = 0; x < s.alice_inputs; ++x) {
    for (int y = 0; y < s.bob_inputs; ++y) {
      double sum = 0.0;
      for (int a = 0; a < s.alice_outcomes; ++a) {
        for (int b = 0; b < s.bob_outcomes; ++b) sum += at(a, b, x, y);
      }
      if (std::abs(sum - 1.0) > 1e-9) {
        throw InvalidArgument("Distribution: setting (" + std::to_string(x) + "," +
                              std::to_string(y) + ") sums to " + std::to_string(sum));
      }
    }
  }
}

namespace {

BellFunctional empty_functional(const Scenario& s, const std::string& name) {
  BellFunctional f;
  f.scenario = s;
  f.coeffs.assign(static_cast<size_t>(s.alice_inputs) * s.bob_inputs *
                      s.alice_outcomes * s.bob_outcomes,
                  0.0);
  f.name = name;
  return f;
}

// Adds sign * <A_x B_y> for dichotomic +-1 observables.
void add_correlator(BellFunctional& f, int x, int y, double sign) {
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      f.at(a, b, x, y) += sign * ((a + b) % 2 == 0 ? 1.0 : -1.0);
    }
  }
}

// Adds sign * <A_x> evaluated through the fixed partner input y0 = 0.
void add_alice_marginal(BellFunctional& f, int x, double sign) {
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < f.scenario.bob_outcomes; ++b) {
      f.at(a, b, x, 0) += sign * (a == 0 ? 1.0 : -1.0);
    }
  }
}

void add_bob_marginal(BellFunctional& f, int y, double sign) {
  for (int b = 0; b < 2; ++b) {
    for (int a = 0; a < f.scenario.alice_outcomes; ++a) {
      f.at(a, b, 0, y) += sign * (b == 0 ? 1.0 : -1.0);
    }
  }
}

}  // namespace

BellFunctional chsh() {
  BellFunctional f = empty_functional({2, 2, 2, 2}, "chsh");
  add_correlator(f, 0, 0, 1.0);
  add_correlator(f, 0, 1, 1.0);
  add_correlator(f, 1, 0, 1.0);
  add_correlator(f, 1, 1, -1.0);
  return f;
}

BellFunctional cglmp3() {
  BellFunctional f = empty_functional({2, 2, 3, 3}, "cglmp3");
  // P(first = second + k) with P(X=j, Y=(j+k) mod 3) summed over j.
  auto add_alice_first = [&](int x, int y, int k, double sign) {
    for (int j = 0; j < 3; ++j) f.at(j, (j + k + 3) % 3, x, y) += sign;
  };
  auto add_bob_first = [&](int x, int y, int k, double sign) {
    for (int j = 0; j < 3; ++j) f.at((j + k + 3) % 3, j, x, y) += sign;
  };
  add_alice_first(0, 0, 0, 1.0);   // P(A1 = B1)
  add_bob_first(1, 0, 1, 1.0);     // P(B1 = A2 + 1)
  add_alice_first(1, 1, 0, 1.0);   // P(A2 = B2)
  add_bob_first(0, 1, 0, 1.0);     // P(B2 = A1)
  add_alice_first(0, 0, -1, -1.0); // P(A1 = B1 - 1)
  add_bob_first(1, 0, 0, -1.0);    // P(B1 = A2)
  add_alice_first(1, 1, -1, -1.0); // P(A2 = B2 - 1)
  add_bob_first(0, 1, -1, -1.0);   // P(B2 = A1 - 1)
  return f;
}

BellFunctional i3322() {
  BellFunctional f = empty_functional({3, 3, 2, 2}, "i3322");
  add_correlator(f, 0, 2, 1.0);
  add_correlator(f, 1, 2, 1.0);
  add_correlator(f, 2, 0, 1.0);
  add_correlator(f, 2, 1, 1.0);
  add_correlator(f, 0, 1, 1.0);
  add_correlator(f, 1, 0, 1.0);
  add_correlator(f, 1, 1, -1.0);
  add_correlator(f, 0, 0, -1.0);
  add_alice_marginal(f, 0, 1.0);
  add_alice_marginal(f, 1, -1.0);
  add_bob_marginal(f, 0, 1.0);
  add_bob_marginal(f, 1, -1.0);
  return f;
}

double bell_value(const BellFunctional& f, const Distribution& d) {
  if (!(f.scenario == d.scenario)) {
    throw InvalidArgument("bell_value: functional is for scenario " +
                          f.scenario.tag() + ", distribution for " +
                          d.scenario.tag());
  }
  double v = f.offset;
  for (size_t i = 0; i < f.coeffs.size(); ++i) v += f.coeffs[i] * d.p[i];
  return v;
}

Distribution deterministic_distribution(const Scenario& s,
                                        const std::vector<int>& alice_outcome_of_x,
                                        const std::vector<int>& bob_outcome_of_y) {
  if (static_cast<int>(alice_outcome_of_x.size()) != s.alice_inputs ||
      static_cast<int>(bob_outcome_of_y.size()) != s.bob_inputs) {
    throw InvalidArgument("deterministic_distribution: assignment size mismatch");
  }
  Distribution d = Distribution::zero(s);
  for (int x = 0; x < s.alice_inputs; ++x) {
    for (int y = 0; y < s.bob_inputs; ++y) {
      d.at(alice_outcome_of_x[x], bob_outcome_of_y[y], x, y) = 1.0;
    }
  }
  return d;
}

double classical_bound(const BellFunctional& f) {
  const Scenario& s = f.scenario;
  long alice_strategies = 1, bob_strategies = 1;
  for (int x = 0; x < s.alice_inputs; ++x) alice_strategies *= s.alice_outcomes;
  for (int y = 0; y < s.bob_inputs; ++y) bob_strategies *= s.bob_outcomes;

  double best = -infinity();
  std::vector<int> ax(s.alice_inputs), by(s.bob_inputs);
  for (long i = 0; i < alice_strategies; ++i) {
    long rest = i;
    for (int x = 0; x < s.alice_inputs; ++x) {
      ax[x] = rest % s.alice_outcomes;
      rest /= s.alice_outcomes;
    }
    for (long j = 0; j < bob_strategies; ++j) {
      rest = j;
      for (int y = 0; y < s.bob_inputs; ++y) {
        by[y] = rest % s.bob_outcomes;
        rest /= s.bob_outcomes;
      }
      best = std::max(best, bell_value(f, deterministic_distribution(s, ax, by)));
    }
  }
  return best;
}

std::vector<BellFunctional> distribution_constraints(
    const Distribution& d, const std::vector<std::pair<int, int>>& settings) {
  d.validate();
  const Scenario& s = d.scenario;
  std::vector<std::pair<int, int>> use = settings;
  if (use.empty()) {
    for (int x = 0; x < s.alice_inputs; ++x) {
      for (int y = 0; y < s.bob_inputs; ++y) use.push_back({x, y});
    }
  }
  std::vector<BellFunctional> rows;
  for (auto [x, y] : use) {
    if (x < 0 || x >= s.alice_inputs || y < 0 || y >= s.bob_inputs) {
      throw InvalidArgument("distribution_constraints: setting out of range");
    }
    for (int a = 0; a < s.alice_outcomes; ++a) {
      for (int b = 0; b < s.bob_outcomes; ++b) {
        BellFunctional f = empty_functional(
            s, "p(" + std::to_string(a) + "," + std::to_string(b) + "|" +
                   std::to_string(x) + "," + std::to_string(y) + ")");
        f.at(a, b, x, y) = 1.0;
        f.sense = Sense::Equal;
        f.threshold = d.at(a, b, x, y);
        rows.push_back(std::move(f));
      }
    }
  }
  return rows;
}

Distribution honest_statistics(const StateSpec& spec,
                               const MeasurementAngleSet& angles) {
  if (angles.alice_angles.empty() || angles.bob_angles.empty()) {
    throw InvalidArgument("honest_statistics: empty angle list");
  }
  Scenario s;
  s.alice_inputs = static_cast<int>(angles.alice_angles.size());
  s.bob_inputs = static_cast<int>(angles.bob_angles.size());
  s.alice_outcomes = 2;
  s.bob_outcomes = 2;
  Matrix rho = honest_state_matrix(spec);

  Distribution d = Distribution::zero(s);
  for (int x = 0; x < s.alice_inputs; ++x) {
    Matrix pa0 = angle_projector(angles.alice_angles[x]);
    std::vector<Matrix> pa = {pa0, Matrix::Identity(2, 2) - pa0};
    for (int y = 0; y < s.bob_inputs; ++y) {
      Matrix pb0 = angle_projector(angles.bob_angles[y]);
      std::vector<Matrix> pb = {pb0, Matrix::Identity(2, 2) - pb0};
      for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
          Matrix proj = Eigen::kroneckerProduct(pa[a], pb[b]).eval();
          d.at(a, b, x, y) = (rho * proj).trace().real();
        }
      }
    }
  }
  d.validate();
  return d;
}

}  // namespace dicert
