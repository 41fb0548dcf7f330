#pragma once

// Finite-dimensional ground truth for the entropy quantities the rest of the
// library bounds device-independently. Everything here works on explicit
// complex matrices and is only meant for small dimensions (tests, convergence
// studies, honest-model statistics).

#include <optional>
#include <vector>

#include "common.hpp"

namespace dicert {

struct QuadratureSpec {
  double abs_tol = 1e-8;
  int max_depth = 15;
};

// Classical-quantum state: classical register of size `alphabet_size` with a
// conditional operator on the quantum side per symbol. Blocks with zero
// weight may be empty matrices.
struct CqState {
  int alphabet_size = 0;
  std::vector<double> weights;          // p(a), sums to 1
  std::vector<Matrix> blocks;           // unit-trace conditional states
};

struct MeasurementAngleSet {
  std::vector<double> alice_angles;  // radians, x-z plane
  std::vector<double> bob_angles;
};

enum class StateFamily { PhiPlus, Werner, Dephased };

struct StateSpec {
  StateFamily family = StateFamily::PhiPlus;
  double param = 1.0;  // visibility v for Werner, dephasing strength q
};

// Trace of the positive part of a Hermitian operator (sum of positive
// eigenvalues). Throws InvalidArgument on non-Hermitian input.
double trace_plus(const Matrix& a);

// tr^-[A] = tr^+[-A].
double trace_minus(const Matrix& a);

bool is_psd(const Matrix& a, double tol = 1e-10);

// Umegaki relative entropy in bits via eigendecomposition, restricted to the
// support of sigma. Returns +inf when supp(rho) leaks out of supp(sigma)
// by more than tolerance. Eigenvalues below 1e-10 * max are treated as zero.
double relative_entropy_eigen(const Matrix& rho, const Matrix& sigma);

// Relative entropy in bits through the integral representation that is
// linear in (rho, sigma): D = (tr[rho-sigma] + I1 + I2)/ln2 with
//   I1 = int_0^1 ds/s tr^-[rho - s sigma],
//   I2 = int_1^inf ds/s tr^+[rho - s sigma],
// evaluated by adaptive Gauss-Kronrod quadrature. Throws NumericFailure when
// the requested tolerance cannot be certified.
double relative_entropy_frenkel(const Matrix& rho, const Matrix& sigma,
                                const QuadratureSpec& spec = {});

// Truncated integral form: requires mu*sigma <= rho <= lambda*sigma (checked
// by min-eigenvalue tests within 1e-9, the failing side is named) and
// evaluates
//   (tr[rho-sigma] + int_mu^lambda ds/s tr^+[sigma s - rho]
//    + tr[rho] ln(lambda) - (lambda-1) tr[sigma]) / ln2.
double relative_entropy_truncated(const Matrix& rho, const Matrix& sigma,
                                  double mu, double lambda,
                                  const QuadratureSpec& spec = {});

// Generic valid (mu, lambda) for pairs with supp(rho) inside supp(sigma):
// extreme eigenvalues of sigma^{-1/2} rho sigma^{-1/2} on supp(sigma), with
// 1e-9 slack outward. mu is clamped at 0.
struct OperatorPencilBounds {
  double mu = 0.0;
  double lambda = 1.0;
};
OperatorPencilBounds pencil_bounds(const Matrix& rho, const Matrix& sigma);

// H(A|E) = -D(rho_AE || 1_A x rho_E) of a cq state, clamped to
// [0, log2 |A|].
double conditional_entropy_cq(const CqState& state);

// Builds the cq state rho_{AE} (or rho_{ABE} classical part AB) of the honest
// two-qubit implementation: the bipartite state is purified into a 4-dim
// environment and the listed parties measure at the given x-z plane angles.
CqState honest_cq_state(const StateSpec& spec, double alice_angle,
                        std::optional<double> bob_angle = std::nullopt);

// Two-qubit density matrix of the named family.
Matrix honest_state_matrix(const StateSpec& spec);

// Projector onto the +1 outcome of the x-z plane measurement at `angle`.
Matrix angle_projector(double angle);

}  // namespace dicert
