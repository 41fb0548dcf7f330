#include <doctest.h>

#include "core/dense_oracle.hpp"
#include "core/scenario.hpp"
#include "core/sdp.hpp"
#include "support.hpp"

using namespace dicert;
using namespace dicert::testing;

TEST_CASE("trace_plus basics") {
  Matrix a = Matrix::Zero(2, 2);
  a(0, 0) = 1.0;
  a(1, 1) = -2.0;
  CHECK(trace_plus(a) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(trace_plus(Matrix::Zero(3, 3)) == doctest::Approx(0.0));
  CHECK(trace_minus(a) == doctest::Approx(2.0).epsilon(1e-12));

  Matrix bad(2, 2);
  bad << Complex(0, 0), Complex(1, 0), Complex(0, 0), Complex(0, 0);
  CHECK_THROWS_AS(trace_plus(bad), InvalidArgument);
}

// Independent route: the variational SDP sup tr[PA], 0 <= P <= 1, built
// directly as a pencil instance and solved by the conic solver.
static double trace_plus_via_sdp(const RealMatrix& a) {
  int n = static_cast<int>(a.rows());
  SDPInstance inst;
  inst.psd_dim = 2 * n;  // diag(P, 1 - P)
  std::vector<std::pair<int, int>> coords;
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) coords.push_back({i, j});
  }
  inst.num_vars = static_cast<int>(coords.size());
  inst.pencil.resize(inst.num_vars);
  inst.objective.assign(inst.num_vars, 0.0);
  for (int v = 0; v < inst.num_vars; ++v) {
    auto [i, j] = coords[v];
    inst.pencil[v].push_back({i, j, 1.0});
    inst.pencil[v].push_back({n + i, n + j, -1.0});
    inst.objective[v] = (i == j) ? a(i, i) : 2.0 * a(i, j);
  }
  for (int i = 0; i < n; ++i) inst.psd_const.push_back({n + i, n + i, 1.0});
  inst.maximize = true;
  SolveResult r = solve_sdp(inst);
  REQUIRE(r.status == SolveStatus::Optimal);
  return r.primal_objective;
}

TEST_CASE("trace_plus agrees with the variational SDP") {
  Rng rng(7);
  for (int trial = 0; trial < 3; ++trial) {
    RealMatrix a = RealMatrix::Random(4, 4);
    a = 0.5 * (a + a.transpose()).eval();
    double via_sdp = trace_plus_via_sdp(a);
    double via_eig = trace_plus(a.cast<Complex>());
    CHECK(std::abs(via_sdp - via_eig) <= 1e-7);
  }
}

TEST_CASE("Jordan decomposition identity") {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    Matrix a = random_hermitian(rng, 3);
    CHECK(trace_plus(a) - trace_plus(-a) ==
          doctest::Approx(a.trace().real()).epsilon(1e-10));
  }
}

TEST_CASE("relative_entropy_eigen") {
  Rng rng(3);
  Matrix rho = random_state(rng, 3);
  CHECK(relative_entropy_eigen(rho, rho) == doctest::Approx(0.0).epsilon(1e-9));

  Matrix d1 = Matrix::Zero(2, 2), d2 = Matrix::Zero(2, 2);
  d1(0, 0) = 1.0;
  d2(0, 0) = 0.5;
  d2(1, 1) = 0.5;
  CHECK(relative_entropy_eigen(d1, d2) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(relative_entropy_eigen(d2, d1) == infinity());

  Matrix neg = Matrix::Zero(2, 2);
  neg(0, 0) = 1.0;
  neg(1, 1) = -0.5;
  CHECK_THROWS_AS(relative_entropy_eigen(neg, d2), InvalidArgument);
}

TEST_CASE("integral representations match the eigendecomposition") {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    int n = 2 + static_cast<int>(trial % 3);
    Matrix sigma = random_state(rng, n);
    Matrix rho = random_state(rng, n);
    double exact = relative_entropy_eigen(rho, sigma);
    double frenkel = relative_entropy_frenkel(rho, sigma);
    CHECK(std::abs(frenkel - exact) <= 1e-6);
    OperatorPencilBounds b = pencil_bounds(rho, sigma);
    double truncated = relative_entropy_truncated(rho, sigma, b.mu, b.lambda);
    CHECK(std::abs(truncated - exact) <= 1e-6);
  }
}

TEST_CASE("support violation detected consistently") {
  Rng rng(9);
  Matrix sigma = random_state(rng, 3, 2);  // rank 2
  Matrix rho = random_state(rng, 3);       // full rank
  CHECK(relative_entropy_eigen(rho, sigma) == infinity());
  CHECK(relative_entropy_frenkel(rho, sigma) == infinity());
}

TEST_CASE("truncated form: invariance in (mu, lambda) and error paths") {
  Rng rng(13);
  Matrix sigma = random_state(rng, 2);
  Matrix rho = random_state(rng, 2);
  OperatorPencilBounds b = pencil_bounds(rho, sigma);
  double v1 = relative_entropy_truncated(rho, sigma, b.mu, b.lambda);
  double v2 = relative_entropy_truncated(rho, sigma, b.mu / 2.0, 2.0 * b.lambda);
  CHECK(std::abs(v1 - v2) <= 1e-8);

  // lambda = 1 closed-form term vanishes for the cq ordering.
  CqState cq = random_cq_state(rng, 2, 2);
  auto [rho_cq, sigma_cq] = cq_pair(cq);
  double tr_term = rho_cq.trace().real() * std::log(1.0) -
                   (1.0 - 1.0) * sigma_cq.trace().real();
  CHECK(tr_term == 0.0);
  double vcq = relative_entropy_truncated(rho_cq, sigma_cq, 0.0, 1.0);
  CHECK(std::abs(vcq - relative_entropy_eigen(rho_cq, sigma_cq)) <= 1e-6);

  CHECK_THROWS_WITH_AS(
      relative_entropy_truncated(rho, sigma, b.mu, 0.5 * b.lambda / 10.0),
      doctest::Contains("upper operator inequality"), InvalidArgument);
  if (b.mu == 0.0) {
    CHECK_THROWS_WITH_AS(relative_entropy_truncated(rho, sigma, 0.9, b.lambda),
                         doctest::Contains("lower operator inequality"),
                         InvalidArgument);
  }
}

TEST_CASE("conditional entropy of cq states") {
  Matrix half = 0.5 * Matrix::Identity(2, 2);
  CqState uncorrelated{2, {0.5, 0.5}, {half, half}};
  CHECK(conditional_entropy_cq(uncorrelated) == doctest::Approx(1.0).epsilon(1e-10));

  CqState deterministic{2, {1.0, 0.0}, {Matrix::Identity(2, 2) * 0.5, Matrix()}};
  CHECK(conditional_entropy_cq(deterministic) == doctest::Approx(0.0).epsilon(1e-10));

  // Honest implementation at white-noise level v against the closed form
  // derived from the purified two-qubit model.
  for (double v : {0.0, 0.6, 0.85, 1.0}) {
    CqState cq = honest_cq_state({StateFamily::Werner, v}, 0.0);
    CHECK(conditional_entropy_cq(cq) ==
          doctest::Approx(werner_conditional_entropy(v)).epsilon(1e-9));
  }
}

TEST_CASE("conditional entropy stays within [0, log2 |A|]") {
  Rng rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    int alphabet = 2 + (trial % 3);
    CqState s = random_cq_state(rng, alphabet, 2 + (trial % 2));
    double h = conditional_entropy_cq(s);
    CHECK(h >= 0.0);
    CHECK(h <= log2_safe(static_cast<double>(alphabet)) + 1e-12);
  }
}

TEST_CASE("honest statistics") {
  MeasurementAngleSet flat{{0.0}, {kPi / 2}};
  Distribution d = honest_statistics({StateFamily::PhiPlus, 1.0}, flat);
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      CHECK(d.at(a, b, 0, 0) == doctest::Approx(0.25).epsilon(1e-12));
    }
  }

  MeasurementAngleSet optimal{{0.0, kPi / 2}, {kPi / 4, -kPi / 4}};
  Distribution chsh_stats = honest_statistics({StateFamily::PhiPlus, 1.0}, optimal);
  CHECK(std::abs(bell_value(chsh(), chsh_stats) - 2.0 * std::sqrt(2.0)) <= 1e-10);

  Distribution noise = honest_statistics({StateFamily::Werner, 0.0}, optimal);
  for (double p : noise.p) CHECK(p == doctest::Approx(0.25).epsilon(1e-12));

  // Normalization and exact non-signalling.
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 2; ++y) {
      double sum = 0.0;
      for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) sum += chsh_stats.at(a, b, x, y);
      }
      CHECK(std::abs(sum - 1.0) <= 1e-12);
    }
  }
  MeasurementAngleSet mangled{{0.1, 0.7}, {}};
  CHECK_THROWS_AS(honest_statistics({StateFamily::PhiPlus, 1.0}, mangled),
                  InvalidArgument);
}
