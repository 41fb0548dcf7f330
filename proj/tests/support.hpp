#pragma once

// Shared helpers for the test suites: deterministic random matrices and
// states, independently coded oracles (analytic curves, brute-force
// enumerations, KKT solves) that the implementation is checked against.

#include <random>
#include <vector>

#include "core/data_ingest.hpp"
#include "core/runner.hpp"

namespace dicert::testing {

using Rng = std::mt19937_64;

inline Matrix random_complex(Rng& rng, int n) {
  std::normal_distribution<double> g;
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) m(i, j) = Complex(g(rng), g(rng));
  }
  return m;
}

inline Matrix random_hermitian(Rng& rng, int n) {
  Matrix m = random_complex(rng, n);
  return 0.5 * (m + m.adjoint());
}

// Random PSD matrix; rank defaults to full.
inline Matrix random_psd(Rng& rng, int n, int rank = -1) {
  if (rank < 0) rank = n;
  Matrix a = random_complex(rng, n).leftCols(rank);
  return a * a.adjoint();
}

inline Matrix random_state(Rng& rng, int n, int rank = -1) {
  Matrix m = random_psd(rng, n, rank);
  return m / m.trace().real();
}

inline CqState random_cq_state(Rng& rng, int alphabet, int eve_dim) {
  std::uniform_real_distribution<double> u(0.1, 1.0);
  CqState s;
  s.alphabet_size = alphabet;
  double total = 0.0;
  for (int a = 0; a < alphabet; ++a) {
    double w = u(rng);
    s.weights.push_back(w);
    total += w;
    s.blocks.push_back(random_state(rng, eve_dim));
  }
  for (double& w : s.weights) w /= total;
  return s;
}

// rho_AE and 1_A (x) rho_E of a cq state as dense matrices.
inline std::pair<Matrix, Matrix> cq_pair(const CqState& s) {
  int dim = static_cast<int>(s.blocks[0].rows());
  int n = s.alphabet_size;
  Matrix rho = Matrix::Zero(n * dim, n * dim);
  Matrix rho_e = Matrix::Zero(dim, dim);
  for (int a = 0; a < n; ++a) {
    rho.block(a * dim, a * dim, dim, dim) = s.weights[a] * s.blocks[a];
    rho_e += s.weights[a] * s.blocks[a];
  }
  Matrix sigma = Matrix::Zero(n * dim, n * dim);
  for (int a = 0; a < n; ++a) sigma.block(a * dim, a * dim, dim, dim) = rho_e;
  return {rho, sigma};
}

// Analytic one-sided conditional-entropy curve for CHSH-constrained models.
inline double chsh_analytic_entropy(double s) {
  double q = (s / 2.0) * (s / 2.0) - 1.0;
  if (q <= 0.0) return 0.0;
  return 1.0 - binary_entropy(0.5 + 0.5 * std::sqrt(q));
}

// Analytic guessing-probability curve: H_min = 1 - log2(1 + sqrt(2 - s^2/4)).
inline double chsh_analytic_min_entropy(double s) {
  double inside = 2.0 - s * s / 4.0;
  if (inside < 0.0) inside = 0.0;
  return 1.0 - log2_safe(1.0 + std::sqrt(inside));
}

// H(A|E) of the purified Werner model measured along any x-z axis:
// 1 + h((1+v)/2) - H({(1+3v)/4, 3x(1-v)/4}).
inline double werner_conditional_entropy(double v) {
  double l0 = (1.0 + 3.0 * v) / 4.0;
  double l1 = (1.0 - v) / 4.0;
  auto term = [](double p) { return p > 0 ? -p * log2_safe(p) : 0.0; };
  double spectrum_entropy = term(l0) + 3.0 * term(l1);
  return 1.0 + binary_entropy((1.0 + v) / 2.0) - spectrum_entropy;
}

inline Distribution pr_box() {
  Distribution d = Distribution::zero({2, 2, 2, 2});
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 2; ++y) {
      for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
          if (((a + b) % 2) == (x * y)) d.at(a, b, x, y) = 0.5;
        }
      }
    }
  }
  return d;
}

inline Distribution random_nonsignalling(Rng& rng, const Scenario& sc, int mixtures = 6) {
  std::uniform_int_distribution<int> ua(0, sc.alice_outcomes - 1);
  std::uniform_int_distribution<int> ub(0, sc.bob_outcomes - 1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Distribution d = Distribution::zero(sc);
  double total = 0.0;
  for (int m = 0; m < mixtures; ++m) {
    std::vector<int> ax(sc.alice_inputs), by(sc.bob_inputs);
    for (int& v : ax) v = ua(rng);
    for (int& v : by) v = ub(rng);
    double w = u(rng) + 1e-3;
    Distribution det = deterministic_distribution(sc, ax, by);
    for (size_t i = 0; i < d.p.size(); ++i) d.p[i] += w * det.p[i];
    total += w;
  }
  for (double& v : d.p) v /= total;
  return d;
}

// Equality-constrained least-squares projection by a direct KKT solve;
// independent of the pseudoinverse route used by the implementation.
inline Vector kkt_projection(const RealMatrix& C, const Vector& e, const Vector& p) {
  int n = static_cast<int>(p.size());
  int m = static_cast<int>(C.rows());
  RealMatrix kkt = RealMatrix::Zero(n + m, n + m);
  kkt.topLeftCorner(n, n) = RealMatrix::Identity(n, n);
  kkt.topRightCorner(n, m) = C.transpose();
  kkt.bottomLeftCorner(m, n) = C;
  Vector rhs(n + m);
  rhs.head(n) = p;
  rhs.tail(m) = e;
  Vector sol = kkt.completeOrthogonalDecomposition().solve(rhs);
  return sol.head(n);
}

// Non-signalling + normalization equality system (duplicated here on purpose
// as an oracle for the projection tests).
inline void ns_equality_system(const Scenario& s, RealMatrix& C, Vector& e) {
  int dim = s.alice_inputs * s.bob_inputs * s.alice_outcomes * s.bob_outcomes;
  std::vector<std::vector<double>> rows;
  std::vector<double> rhs;
  auto idx = [&](int a, int b, int x, int y) {
    return BellFunctional::coeff_index(s, a, b, x, y);
  };
  for (int x = 0; x < s.alice_inputs; ++x) {
    for (int y = 0; y < s.bob_inputs; ++y) {
      std::vector<double> row(dim, 0.0);
      for (int a = 0; a < s.alice_outcomes; ++a) {
        for (int b = 0; b < s.bob_outcomes; ++b) row[idx(a, b, x, y)] = 1.0;
      }
      rows.push_back(row);
      rhs.push_back(1.0);
    }
  }
  for (int x = 0; x < s.alice_inputs; ++x) {
    for (int a = 0; a < s.alice_outcomes; ++a) {
      for (int y = 1; y < s.bob_inputs; ++y) {
        std::vector<double> row(dim, 0.0);
        for (int b = 0; b < s.bob_outcomes; ++b) {
          row[idx(a, b, x, 0)] += 1.0;
          row[idx(a, b, x, y)] -= 1.0;
        }
        rows.push_back(row);
        rhs.push_back(0.0);
      }
    }
  }
  for (int y = 0; y < s.bob_inputs; ++y) {
    for (int b = 0; b < s.bob_outcomes; ++b) {
      for (int x = 1; x < s.alice_inputs; ++x) {
        std::vector<double> row(dim, 0.0);
        for (int a = 0; a < s.alice_outcomes; ++a) {
          row[idx(a, b, 0, y)] += 1.0;
          row[idx(a, b, x, y)] -= 1.0;
        }
        rows.push_back(row);
        rhs.push_back(0.0);
      }
    }
  }
  C = RealMatrix::Zero(rows.size(), dim);
  e = Vector::Zero(rows.size());
  for (size_t r = 0; r < rows.size(); ++r) {
    for (int i = 0; i < dim; ++i) C(r, i) = rows[r][i];
    e(r) = rhs[r];
  }
}

}  // namespace dicert::testing
