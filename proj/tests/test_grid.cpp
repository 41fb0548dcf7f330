#include <doctest.h>

#include "core/grid.hpp"
#include "core/dense_oracle.hpp"
#include "support.hpp"

using namespace dicert;
using namespace dicert::testing;

TEST_CASE("make_grid spacing") {
  GridSpec uniform{2, 1.0, 0.5, GridSpacing::Uniform, {}};
  std::vector<double> u = make_grid(uniform);
  REQUIRE(u.size() == 2);
  CHECK(u[0] == doctest::Approx(0.5));
  CHECK(u[1] == doctest::Approx(1.0));

  GridSpec log3{3, 1.0, 0.25, GridSpacing::Logarithmic, {}};
  std::vector<double> g = make_grid(log3);
  REQUIRE(g.size() == 3);
  CHECK(g[0] == doctest::Approx(0.25));
  CHECK(g[1] == doctest::Approx(0.5));
  CHECK(g[2] == doctest::Approx(1.0));

  GridSpec custom;
  custom.spacing = GridSpacing::Custom;
  custom.custom_nodes = {0.1, 0.4, 1.0};
  CHECK(make_grid(custom) == custom.custom_nodes);
  custom.custom_nodes = {0.4, 0.1, 1.0};
  CHECK_THROWS_AS(make_grid(custom), InvalidArgument);

  GridSpec bad{4, 1.0, 1.5, GridSpacing::Uniform, {}};
  CHECK_THROWS_AS(make_grid(bad), InvalidArgument);
}

TEST_CASE("coefficients: closed forms on [0.5, 1]") {
  GridCoefficients c = coefficients({0.5, 1.0});
  REQUIRE(c.term_count() == 3);
  CHECK(c.alpha[0] == doctest::Approx(-1.0));
  CHECK(c.beta[0] == doctest::Approx(0.5));
  CHECK(c.alpha[1] == doctest::Approx(-(2.0 * std::log(2.0) - 1.0)).epsilon(1e-12));
  CHECK(c.beta[1] == doctest::Approx(0.5 * (2.0 * std::log(2.0) - 1.0)).epsilon(1e-12));
  CHECK(c.alpha[2] == doctest::Approx(-(1.0 - std::log(2.0))).epsilon(1e-12));
  CHECK(c.beta[2] == doctest::Approx(1.0 - std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("coefficients: beta_k = -alpha_k t_k and signs") {
  Rng rng(17);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  for (int trial = 0; trial < 25; ++trial) {
    std::vector<double> nodes;
    for (int k = 0; k < 6; ++k) nodes.push_back(u(rng));
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    if (nodes.size() < 2) continue;
    GridCoefficients c = coefficients(nodes);
    for (int k = 1; k < c.term_count(); ++k) {
      CHECK(std::abs(c.beta[k] + c.alpha[k] * nodes[k - 1]) <= 1e-12);
      CHECK(c.alpha[k] <= 0.0);
      CHECK(c.beta[k] >= 0.0);
    }
  }
  CHECK_THROWS_AS(coefficients({0.5}), InvalidArgument);
  CHECK_THROWS_AS(coefficients({0.5, 0.5}), InvalidArgument);
  CHECK_THROWS_AS(coefficients({-0.5, 1.0}), InvalidArgument);
}

TEST_CASE("degenerate partition limit") {
  GridCoefficients c = coefficients({0.7, 0.7 + 1e-7});
  CHECK(std::abs(c.alpha[1]) <= 1e-6);
  CHECK(std::abs(c.alpha[2]) <= 1e-6);
}

TEST_CASE("dense discretized bound at rho = sigma") {
  Rng rng(23);
  Matrix sigma = random_state(rng, 3);
  GridCoefficients c = coefficients(make_grid({4, 1.0, 0.25, GridSpacing::Uniform, {}}));
  double v = dense_discretized_bound(sigma, sigma, c);
  CHECK(v >= -1e-13);
  CHECK(v <= 1e-12);
}

TEST_CASE("discretized bound dominates the integral and converges") {
  Rng rng(29);
  for (int trial = 0; trial < 30; ++trial) {
    CqState s = random_cq_state(rng, 2 + (trial % 2), 2);
    auto [rho, sigma] = cq_pair(s);
    double exact = relative_entropy_eigen(rho, sigma);

    GridSpec spec{30, 1.0, 1e-3, GridSpacing::Logarithmic, {}};
    double bound = dense_discretized_relative_entropy(rho, sigma, make_coefficients(spec));
    CHECK(bound >= exact - 1e-9);
    CHECK(bound - exact <= 1e-3);

    // lambda = |A| is also a valid pencil bound for cq pairs.
    GridSpec wide{8, static_cast<double>(s.alphabet_size), 0.1, GridSpacing::Uniform, {}};
    double loose = dense_discretized_relative_entropy(rho, sigma, make_coefficients(wide));
    CHECK(loose >= exact - 1e-9);
  }
}

TEST_CASE("refinement never increases the bound") {
  Rng rng(31);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  for (int trial = 0; trial < 10; ++trial) {
    CqState s = random_cq_state(rng, 2, 2);
    auto [rho, sigma] = cq_pair(s);
    std::vector<double> nodes = {0.2, 0.5, 1.0};
    double coarse = dense_discretized_bound(rho, sigma, coefficients(nodes));
    double extra = u(rng);
    nodes.push_back(extra);
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    double fine = dense_discretized_bound(rho, sigma, coefficients(nodes));
    CHECK(fine <= coarse + 1e-11);
  }
}

TEST_CASE("nested uniform grids give non-increasing gaps") {
  Rng rng(37);
  CqState s = random_cq_state(rng, 2, 2);
  auto [rho, sigma] = cq_pair(s);
  double exact = relative_entropy_eigen(rho, sigma);
  double prev_gap = infinity();
  for (int r : {4, 8, 16, 32}) {
    GridSpec spec{r, 1.0, 1.0 / r, GridSpacing::Uniform, {}};
    double gap = dense_discretized_relative_entropy(rho, sigma, make_coefficients(spec)) - exact;
    CHECK(gap <= prev_gap + 1e-11);
    prev_gap = gap;
  }
}

TEST_CASE("operator inequality precondition") {
  Rng rng(41);
  Matrix rho = random_state(rng, 2);
  Matrix sigma = random_state(rng, 2);
  GridCoefficients c = coefficients({0.5, 1.0});  // lambda = 1
  // Generic full-rank pairs violate rho <= sigma.
  OperatorPencilBounds b = pencil_bounds(rho, sigma);
  if (b.lambda > 1.0 + 1e-6) {
    CHECK_THROWS_AS(dense_discretized_bound(rho, sigma, c), InvalidArgument);
  }
}
