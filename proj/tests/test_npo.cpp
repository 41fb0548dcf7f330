#include <doctest.h>

#include "core/npo.hpp"
#include "core/runner.hpp"
#include "support.hpp"

using namespace dicert;
using namespace dicert::testing;

namespace {

BellFunctional chsh_at(double threshold) {
  BellFunctional f = chsh();
  f.sense = Sense::GreaterEqual;
  f.threshold = threshold;
  return f;
}

const std::vector<ExtraPattern> kMnp = {{{Party::Alice, Party::Bob, Party::Eve}}};

}  // namespace

TEST_CASE("one_sided joint structure") {
  GridCoefficients grid = coefficients({0.5, 1.0});  // r = 2 nodes, 3 terms
  auto problems = one_sided({2, 2, 2, 2}, {chsh_at(2.5)}, grid, 0, NodeMode::Joint);
  REQUIRE(problems.size() == 1);
  const NPOProblem& p = problems[0];
  CHECK(p.gens.ids_of_party(Party::Eve).size() == 2 * 3);  // |A| * (r+1)
  CHECK(p.objective_offset == doctest::Approx(1.0 / kLn2));
  CHECK(!p.maximize);
  REQUIRE(p.constraints.size() == 1);
  CHECK(p.constraints[0].bound == doctest::Approx(2.5));

  // The key-setting generator appearing in the objective is only M(0|0);
  // outcome 1 enters through the eliminated-outcome expansion.
  GenId key = p.gens.measurement_id(Party::Alice, 0, 0);
  GenId other = p.gens.measurement_id(Party::Alice, 1, 0);
  bool saw_key = false;
  for (const auto& [word, coef] : p.objective) {
    for (GenId id : word.gens) {
      CHECK(id != other);
      if (id == key) saw_key = true;
    }
  }
  CHECK(saw_key);
}

TEST_CASE("objective coefficients audit") {
  // Reconstruct the objective independently from the coefficient pairs and
  // the identity-minus-sum expansion of the last outcome.
  GridCoefficients grid = coefficients({0.25, 0.5, 1.0});
  auto problems = one_sided({2, 2, 2, 2}, {}, grid, 1, NodeMode::Joint);
  const NPOProblem& p = problems[0];

  Polynomial expected;
  GenId key = p.gens.measurement_id(Party::Alice, 1, 0);
  for (int k = 0; k < grid.term_count(); ++k) {
    for (int a = 0; a < 2; ++a) {
      Word proj{{p.gens.node_projector_id(k, a)}};
      Polynomial m;
      if (a == 0) {
        m[Word{{key}}] = 1.0;
      } else {
        m[Word{}] = 1.0;
        m[Word{{key}}] = -1.0;
      }
      Polynomial mp = poly_mul(m, poly_word(proj), p.gens);
      poly_add(expected, mp, -grid.alpha[k] / kLn2);
      poly_add(expected, poly_word(proj), -grid.beta[k] / kLn2);
    }
  }
  REQUIRE(expected.size() == p.objective.size());
  for (const auto& [word, coef] : expected) {
    REQUIRE(p.objective.count(word) == 1);
    CHECK(p.objective.at(word) == doctest::Approx(coef).epsilon(1e-12));
  }
}

TEST_CASE("per-node problems carry one node each") {
  GridCoefficients grid = coefficients({0.5, 1.0});
  auto problems = one_sided({2, 2, 2, 2}, {chsh_at(2.5)}, grid, 0, NodeMode::PerNode);
  REQUIRE(problems.size() == 3);
  for (size_t k = 0; k < problems.size(); ++k) {
    CHECK(problems[k].node_index == static_cast<int>(k));
    CHECK(problems[k].objective_offset == 0.0);
    CHECK(problems[k].gens.ids_of_party(Party::Eve).size() == 2);
  }
}

TEST_CASE("two_sided structure") {
  GridCoefficients grid = coefficients({0.5, 1.0});
  auto problems = two_sided({2, 2, 2, 2}, {}, grid, 0, 0, NodeMode::Joint);
  REQUIRE(problems.size() == 1);
  CHECK(problems[0].gens.ids_of_party(Party::Eve).size() == 3 * 4);  // (r+1)|A||B|
  CHECK(problems[0].objective_offset == doctest::Approx(3.0 / kLn2));
}

TEST_CASE("grid and key-input validation") {
  GridCoefficients grid = coefficients({0.5, 1.0});
  CHECK_THROWS_AS(one_sided({2, 2, 2, 2}, {}, grid, 7, NodeMode::Joint), InvalidArgument);
  GridCoefficients wide = coefficients({1.0, 2.0});  // lambda = 2
  CHECK_THROWS_AS(one_sided({2, 2, 2, 2}, {}, wide, 0, NodeMode::Joint), InvalidArgument);
  BellFunctional wrong = cglmp3();
  CHECK_THROWS_AS(one_sided({2, 2, 2, 2}, {wrong}, grid, 0, NodeMode::Joint),
                  InvalidArgument);
}

TEST_CASE("min_entropy problem structure") {
  NPOProblem p = min_entropy_problem({2, 2, 2, 2}, {chsh_at(2.5)}, 0);
  CHECK(p.maximize);
  CHECK(p.gens.eve_povm_outcomes() == 2);
  CHECK(p.gens.ids_of_party(Party::Eve).size() == 1);  // last outcome eliminated
  // objective = <M0 C0> + <(1-M0)(1-C0)> = 1 - <M0> - <C0> + 2 <M0 C0>
  CHECK(p.objective.at(Word{}) == doctest::Approx(1.0));
  CHECK_THROWS_AS(min_entropy_problem({2, 2, 2, 2}, {}, 9), InvalidArgument);
}

TEST_CASE("classical CHSH point certifies no randomness") {
  GridSpec gs;
  gs.node_count = 4;
  EntropySetup setup;
  setup.scenario = {2, 2, 2, 2};
  setup.constraints = {chsh_at(2.0)};
  setup.grid = make_coefficients(gs);
  setup.level = 2;
  setup.workers = 2;
  BoundResult b = entropy_bound(setup);
  CHECK((b.status == SolveStatus::Optimal || b.status == SolveStatus::NearOptimal));
  CHECK(std::abs(b.value) <= 1e-4);
  CHECK(b.per_node.size() == 5);
}

TEST_CASE("per-node total never exceeds the joint optimum") {
  GridSpec gs;
  gs.node_count = 2;
  EntropySetup setup;
  setup.scenario = {2, 2, 2, 2};
  setup.constraints = {chsh_at(2.5)};
  setup.grid = make_coefficients(gs);
  setup.level = 1;
  setup.extras = kMnp;
  setup.workers = 2;
  setup.mode = NodeMode::PerNode;
  BoundResult per = entropy_bound(setup);
  setup.mode = NodeMode::Joint;
  BoundResult joint = entropy_bound(setup);
  REQUIRE(per.status != SolveStatus::SolverError);
  REQUIRE(joint.status != SolveStatus::SolverError);
  CHECK(per.value <= joint.value + 1e-5);
}

TEST_CASE("guessing probability at the maximal violation") {
  BoundResult r = min_entropy_bound({2, 2, 2, 2}, {chsh_at(2.0 * std::sqrt(2.0))}, 0,
                                    std::nullopt, 2, kMnp);
  REQUIRE(r.status != SolveStatus::SolverError);
  CHECK(std::abs(r.value - 1.0) <= 1e-3);
}
