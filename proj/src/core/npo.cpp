#include "npo.hpp"

namespace dicert {

namespace {

GeneratorSet measurement_generators(const Scenario& s) {
  GeneratorSet gens;
  for (int x = 0; x < s.alice_inputs; ++x) {
    gens.add_measurement(Party::Alice, x, s.alice_outcomes);
  }
  for (int y = 0; y < s.bob_inputs; ++y) {
    gens.add_measurement(Party::Bob, y, s.bob_outcomes);
  }
  return gens;
}

void check_constraint_scenarios(const Scenario& s,
                                const std::vector<BellFunctional>& rows) {
  for (const auto& f : rows) {
    if (!(f.scenario == s)) {
      throw InvalidArgument("constraint '" + f.name + "' is for scenario " +
                            f.scenario.tag() + ", problem uses " + s.tag());
    }
  }
}

void check_grid_for_cq(const GridCoefficients& grid) {
  if (grid.node_count() < 2) {
    throw InvalidArgument("grid must have at least 2 nodes");
  }
  if (std::abs(grid.lambda - 1.0) > 1e-12) {
    throw InvalidArgument(
        "the classical-quantum ordering forces lambda = 1; got lambda = " +
        std::to_string(grid.lambda));
  }
}

}  // namespace

Polynomial bell_polynomial(const GeneratorSet& gens, const BellFunctional& f) {
  const Scenario& s = f.scenario;
  Polynomial out;
  if (f.offset != 0.0) poly_add(out, poly_identity(), f.offset);
  for (int a = 0; a < s.alice_outcomes; ++a) {
    for (int b = 0; b < s.bob_outcomes; ++b) {
      for (int x = 0; x < s.alice_inputs; ++x) {
        for (int y = 0; y < s.bob_inputs; ++y) {
          double c = f.at(a, b, x, y);
          if (c == 0.0) continue;
          Polynomial mn = poly_mul(gens.measurement_polynomial(Party::Alice, x, a),
                                   gens.measurement_polynomial(Party::Bob, y, b),
                                   gens);
          poly_add(out, mn, c);
        }
      }
    }
  }
  return out;
}

std::vector<NPOConstraint> to_npo_constraints(
    const GeneratorSet& gens, const std::vector<BellFunctional>& rows) {
  std::vector<NPOConstraint> out;
  out.reserve(rows.size());
  for (const auto& f : rows) {
    NPOConstraint c;
    c.poly = bell_polynomial(gens, f);
    c.sense = f.sense;
    c.bound = f.threshold;
    c.name = f.name;
    out.push_back(std::move(c));
  }
  return out;
}

namespace {

// Objective sum over one node: sum_a (-alpha/ln2) <M(a|key) P^(a)>
// + (-beta/ln2) <P^(a)>, with the eliminated outcome of M expanded. For the
// two-sided variant the "measurement part" is M(a|key_a) N(b|key_b) and the
// label runs over outcome pairs.
void add_node_terms(Polynomial& obj, const GeneratorSet& gens,
                    const std::vector<Polynomial>& measurement_parts,
                    int node, double alpha, double beta) {
  for (size_t label = 0; label < measurement_parts.size(); ++label) {
    Word proj{{gens.node_projector_id(node, static_cast<int>(label))}};
    poly_add(obj, poly_mul(measurement_parts[label], poly_word(proj), gens),
             -alpha / kLn2);
    poly_add(obj, poly_word(proj), -beta / kLn2);
  }
}

std::vector<NPOProblem> build_entropy_problems(
    const Scenario& scenario, const std::vector<BellFunctional>& constraints,
    const GridCoefficients& grid, int key_a, std::optional<int> key_b,
    NodeMode mode) {
  check_constraint_scenarios(scenario, constraints);
  check_grid_for_cq(grid);
  if (key_a < 0 || key_a >= scenario.alice_inputs) {
    throw InvalidArgument("key input x out of range");
  }
  if (key_b && (*key_b < 0 || *key_b >= scenario.bob_inputs)) {
    throw InvalidArgument("key input y out of range");
  }
  int labels = key_b ? scenario.alice_outcomes * scenario.bob_outcomes
                     : scenario.alice_outcomes;
  int terms = grid.term_count();  // r + 1

  auto make_problem = [&](int node_lo, int node_hi, int node_index) {
    NPOProblem p;
    p.scenario = scenario;
    p.gens = measurement_generators(scenario);
    for (int k = node_lo; k < node_hi; ++k) {
      for (int label = 0; label < labels; ++label) p.gens.add_node_projector(k, label);
    }
    p.gens.finalize();

    std::vector<Polynomial> parts;
    for (int label = 0; label < labels; ++label) {
      if (!key_b) {
        parts.push_back(p.gens.measurement_polynomial(Party::Alice, key_a, label));
      } else {
        int a = label / scenario.bob_outcomes;
        int b = label % scenario.bob_outcomes;
        parts.push_back(
            poly_mul(p.gens.measurement_polynomial(Party::Alice, key_a, a),
                     p.gens.measurement_polynomial(Party::Bob, *key_b, b), p.gens));
      }
    }
    for (int k = node_lo; k < node_hi; ++k) {
      add_node_terms(p.objective, p.gens, parts, k, grid.alpha[k], grid.beta[k]);
    }
    p.constraints = to_npo_constraints(p.gens, constraints);
    p.mode = node_index < 0 ? NodeMode::Joint : NodeMode::PerNode;
    p.node_index = node_index;
    p.key_input_alice = key_a;
    p.key_input_bob = key_b;
    p.grid = grid;
    return p;
  };

  std::vector<NPOProblem> out;
  if (mode == NodeMode::Joint) {
    NPOProblem p = make_problem(0, terms, -1);
    p.objective_offset = (labels - 1) / kLn2;
    out.push_back(std::move(p));
  } else {
    for (int k = 0; k < terms; ++k) out.push_back(make_problem(k, k + 1, k));
  }
  return out;
}

}  // namespace

std::vector<NPOProblem> one_sided(const Scenario& scenario,
                                  const std::vector<BellFunctional>& constraints,
                                  const GridCoefficients& grid, int key_input,
                                  NodeMode mode) {
  return build_entropy_problems(scenario, constraints, grid, key_input,
                                std::nullopt, mode);
}

std::vector<NPOProblem> two_sided(const Scenario& scenario,
                                  const std::vector<BellFunctional>& constraints,
                                  const GridCoefficients& grid, int key_a,
                                  int key_b, NodeMode mode) {
  return build_entropy_problems(scenario, constraints, grid, key_a, key_b, mode);
}

namespace {

NPOProblem build_guessing_problem(const Scenario& scenario,
                                  const std::vector<BellFunctional>& constraints,
                                  int key_a, std::optional<int> key_b) {
  check_constraint_scenarios(scenario, constraints);
  if (key_a < 0 || key_a >= scenario.alice_inputs) {
    throw InvalidArgument("key input x out of range");
  }
  if (key_b && (*key_b < 0 || *key_b >= scenario.bob_inputs)) {
    throw InvalidArgument("key input y out of range");
  }
  NPOProblem p;
  p.scenario = scenario;
  p.gens = measurement_generators(scenario);
  int labels = key_b ? scenario.alice_outcomes * scenario.bob_outcomes
                     : scenario.alice_outcomes;
  p.gens.add_eve_povm(labels);
  p.gens.finalize();

  for (int label = 0; label < labels; ++label) {
    Polynomial part;
    if (!key_b) {
      part = p.gens.measurement_polynomial(Party::Alice, key_a, label);
    } else {
      int a = label / scenario.bob_outcomes;
      int b = label % scenario.bob_outcomes;
      part = poly_mul(p.gens.measurement_polynomial(Party::Alice, key_a, a),
                      p.gens.measurement_polynomial(Party::Bob, *key_b, b), p.gens);
    }
    poly_add(p.objective, poly_mul(part, p.gens.eve_povm_polynomial(label), p.gens));
  }
  p.maximize = true;
  p.constraints = to_npo_constraints(p.gens, constraints);
  p.key_input_alice = key_a;
  p.key_input_bob = key_b;
  return p;
}

}  // namespace

NPOProblem min_entropy_problem(const Scenario& scenario,
                               const std::vector<BellFunctional>& constraints,
                               int key_input) {
  return build_guessing_problem(scenario, constraints, key_input, std::nullopt);
}

NPOProblem min_entropy_problem_two_sided(
    const Scenario& scenario, const std::vector<BellFunctional>& constraints,
    int key_a, int key_b) {
  return build_guessing_problem(scenario, constraints, key_a, key_b);
}

NPOProblem max_bell_problem(const BellFunctional& functional) {
  NPOProblem p;
  p.scenario = functional.scenario;
  p.gens = measurement_generators(functional.scenario);
  p.gens.finalize();
  p.objective = bell_polynomial(p.gens, functional);
  p.maximize = true;
  return p;
}

}  // namespace dicert
