#include <doctest.h>

#include "core/scenario.hpp"
#include "support.hpp"

using namespace dicert;
using namespace dicert::testing;

namespace {

Distribution uniform_distribution(const Scenario& s) {
  Distribution d = Distribution::zero(s);
  double v = 1.0 / (s.alice_outcomes * s.bob_outcomes);
  for (double& p : d.p) p = v;
  return d;
}

}  // namespace

TEST_CASE("chsh functional") {
  BellFunctional f = chsh();
  CHECK(bell_value(f, uniform_distribution(f.scenario)) == doctest::Approx(0.0));
  Distribution det = deterministic_distribution(f.scenario, {0, 0}, {0, 0});
  CHECK(bell_value(f, det) == doctest::Approx(2.0));
  CHECK(bell_value(f, pr_box()) == doctest::Approx(4.0));
  CHECK(classical_bound(f) == doctest::Approx(2.0));
}

TEST_CASE("cglmp3 functional") {
  BellFunctional f = cglmp3();
  CHECK(f.scenario.tag() == "2233");
  CHECK(bell_value(f, uniform_distribution(f.scenario)) == doctest::Approx(0.0).epsilon(1e-12));
  Distribution det = deterministic_distribution(f.scenario, {0, 0}, {0, 0});
  CHECK(bell_value(f, det) == doctest::Approx(2.0));
  CHECK(classical_bound(f) == doctest::Approx(2.0));
}

TEST_CASE("i3322 functional") {
  BellFunctional f = i3322();
  CHECK(f.scenario.tag() == "3322");
  CHECK(bell_value(f, uniform_distribution(f.scenario)) == doctest::Approx(0.0).epsilon(1e-12));
  // all-outcomes-+1 strategy attains the classical bound
  Distribution det = deterministic_distribution(f.scenario, {0, 0, 0}, {0, 0, 0});
  CHECK(bell_value(f, det) == doctest::Approx(4.0));
  CHECK(classical_bound(f) == doctest::Approx(4.0));
}

TEST_CASE("classical bounds by independent enumeration") {
  // Re-enumerate deterministic strategies with direct functional evaluation.
  auto enumerate = [](const BellFunctional& f) {
    const Scenario& s = f.scenario;
    long na = 1, nb = 1;
    for (int x = 0; x < s.alice_inputs; ++x) na *= s.alice_outcomes;
    for (int y = 0; y < s.bob_inputs; ++y) nb *= s.bob_outcomes;
    double best = -infinity();
    for (long i = 0; i < na; ++i) {
      for (long j = 0; j < nb; ++j) {
        double value = f.offset;
        long ri = i, rj = j;
        std::vector<int> ax(s.alice_inputs), by(s.bob_inputs);
        for (int x = 0; x < s.alice_inputs; ++x) {
          ax[x] = ri % s.alice_outcomes;
          ri /= s.alice_outcomes;
        }
        for (int y = 0; y < s.bob_inputs; ++y) {
          by[y] = rj % s.bob_outcomes;
          rj /= s.bob_outcomes;
        }
        for (int x = 0; x < s.alice_inputs; ++x) {
          for (int y = 0; y < s.bob_inputs; ++y) value += f.at(ax[x], by[y], x, y);
        }
        best = std::max(best, value);
      }
    }
    return best;
  };
  CHECK(enumerate(chsh()) == doctest::Approx(classical_bound(chsh())));
  CHECK(enumerate(cglmp3()) == doctest::Approx(classical_bound(cglmp3())));
  CHECK(enumerate(i3322()) == doctest::Approx(classical_bound(i3322())));
}

TEST_CASE("bell_value shape mismatch") {
  Distribution d = uniform_distribution({2, 2, 2, 2});
  CHECK_THROWS_AS(bell_value(cglmp3(), d), InvalidArgument);
}

TEST_CASE("distribution constraint rows") {
  Distribution d = uniform_distribution({2, 2, 2, 2});
  CHECK(distribution_constraints(d).size() == 16);
  CHECK(distribution_constraints(d, {{0, 1}}).size() == 4);
  for (const BellFunctional& row : distribution_constraints(d)) {
    CHECK(row.sense == Sense::Equal);
    CHECK(row.threshold == doctest::Approx(0.25));
  }
  // n_a * n_b * o_a * o_b rows for a full table (32 in a 2422 scenario)
  Distribution wide = uniform_distribution({2, 4, 2, 2});
  CHECK(distribution_constraints(wide).size() == 32);
  CHECK_THROWS_AS(distribution_constraints(d, {{5, 0}}), InvalidArgument);
}

TEST_CASE("distribution validation") {
  Distribution d = uniform_distribution({2, 2, 2, 2});
  d.p[0] += 0.5;  // breaks normalization
  CHECK_THROWS_AS(d.validate(), InvalidArgument);
  Distribution neg = uniform_distribution({2, 2, 2, 2});
  neg.p[0] = -0.1;
  CHECK_THROWS_AS(neg.validate(), InvalidArgument);
}

TEST_CASE("honest statistics reach the Tsirelson value") {
  MeasurementAngleSet optimal{{0.0, kPi / 2}, {kPi / 4, -kPi / 4}};
  Distribution d = honest_statistics({StateFamily::PhiPlus, 1.0}, optimal);
  CHECK(std::abs(bell_value(chsh(), d) - 2.0 * std::sqrt(2.0)) <= 1e-9);
}
