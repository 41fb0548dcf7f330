#include "dense_oracle.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>

namespace dicert {

namespace {

using boost::math::quadrature::gauss_kronrod;

constexpr double kKernelCut = 1e-10;    // relative eigenvalue cut
constexpr double kSupportLeak = 1e-9;   // tolerated mass outside supp(sigma)

void require_hermitian(const Matrix& a, const char* who) {
  if (a.rows() != a.cols()) {
    throw InvalidArgument(std::string(who) + ": matrix is not square");
  }
  double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if ((a - a.adjoint()).cwiseAbs().maxCoeff() > 1e-9 * scale) {
    throw InvalidArgument(std::string(who) + ": matrix is not Hermitian");
  }
}

Vector hermitian_eigenvalues(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (a + a.adjoint()),
                                           Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

double real_trace(const Matrix& a) { return a.trace().real(); }

}  // namespace

double trace_plus(const Matrix& a) {
  require_hermitian(a, "trace_plus");
  Vector ev = hermitian_eigenvalues(a);
  double sum = 0.0;
  for (double v : ev) {
    if (v > 0.0) sum += v;
  }
  return sum;
}

double trace_minus(const Matrix& a) { return trace_plus(-a); }

bool is_psd(const Matrix& a, double tol) {
  if (a.rows() != a.cols()) return false;
  if ((a - a.adjoint()).cwiseAbs().maxCoeff() > 1e-9 * std::max(1.0, a.cwiseAbs().maxCoeff())) {
    return false;
  }
  Vector ev = hermitian_eigenvalues(a);
  return ev.minCoeff() >= -tol;
}

double relative_entropy_eigen(const Matrix& rho, const Matrix& sigma) {
  require_hermitian(rho, "relative_entropy_eigen(rho)");
  require_hermitian(sigma, "relative_entropy_eigen(sigma)");
  if (rho.rows() != sigma.rows()) {
    throw InvalidArgument("relative_entropy_eigen: dimension mismatch");
  }
  if (!is_psd(rho) || !is_psd(sigma)) {
    throw InvalidArgument("relative_entropy_eigen: inputs must be PSD");
  }

  Eigen::SelfAdjointEigenSolver<Matrix> es_sigma(0.5 * (sigma + sigma.adjoint()));
  Eigen::SelfAdjointEigenSolver<Matrix> es_rho(0.5 * (rho + rho.adjoint()));
  const Vector& s = es_sigma.eigenvalues();
  const Vector& r = es_rho.eigenvalues();
  double s_cut = kKernelCut * std::max(s.maxCoeff(), 0.0);
  double r_cut = kKernelCut * std::max(r.maxCoeff(), 0.0);

  // Kernel condition: rho must carry no weight on ker(sigma).
  double leak = 0.0;
  for (int i = 0; i < s.size(); ++i) {
    if (s(i) <= s_cut) {
      Eigen::VectorXcd v = es_sigma.eigenvectors().col(i);
      leak += (v.adjoint() * rho * v)(0).real();
    }
  }
  if (leak > kSupportLeak) return infinity();

  double tr_rho_log_rho = 0.0;
  for (int i = 0; i < r.size(); ++i) {
    if (r(i) > r_cut) tr_rho_log_rho += r(i) * log2_safe(r(i));
  }
  double tr_rho_log_sigma = 0.0;
  for (int i = 0; i < s.size(); ++i) {
    if (s(i) > s_cut) {
      Eigen::VectorXcd v = es_sigma.eigenvectors().col(i);
      double weight = (v.adjoint() * rho * v)(0).real();
      tr_rho_log_sigma += weight * log2_safe(s(i));
    }
  }
  return tr_rho_log_rho - tr_rho_log_sigma;
}

namespace {

// tr^-[rho - s*sigma] as a function of s; convex, vanishes for s <= mu.
double pencil_trace_minus(const Matrix& rho, const Matrix& sigma, double s) {
  return trace_minus(rho - s * sigma);
}

double pencil_trace_plus(const Matrix& rho, const Matrix& sigma, double s) {
  return trace_plus(rho - s * sigma);
}

}  // namespace

double relative_entropy_frenkel(const Matrix& rho, const Matrix& sigma,
                                const QuadratureSpec& spec) {
  require_hermitian(rho, "relative_entropy_frenkel(rho)");
  require_hermitian(sigma, "relative_entropy_frenkel(sigma)");
  if (!is_psd(rho) || !is_psd(sigma)) {
    throw InvalidArgument("relative_entropy_frenkel: inputs must be PSD");
  }

  // The tail integral diverges logarithmically iff rho has support on
  // ker(sigma); detect this up front so the quadrature stays finite.
  {
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (sigma + sigma.adjoint()));
    const Vector& s = es.eigenvalues();
    double cut = kKernelCut * std::max(s.maxCoeff(), 0.0);
    double leak = 0.0;
    for (int i = 0; i < s.size(); ++i) {
      if (s(i) <= cut) {
        Eigen::VectorXcd v = es.eigenvectors().col(i);
        leak += (v.adjoint() * rho * v)(0).real();
      }
    }
    if (leak > kSupportLeak) return infinity();
  }

  double err1 = 0.0, err2 = 0.0;
  // int_0^1 ds/s tr^-[rho - s sigma]; the integrand extends continuously to 0.
  auto f1 = [&](double s) {
    if (s <= 0.0) return 0.0;
    return pencil_trace_minus(rho, sigma, s) / s;
  };
  double i1 = gauss_kronrod<double, 15>::integrate(f1, 0.0, 1.0, spec.max_depth,
                                                   spec.abs_tol, &err1);
  // int_1^inf ds/s tr^+[rho - s sigma] with s = 1/u mapped onto (0, 1].
  auto f2 = [&](double u) {
    if (u <= 0.0) return 0.0;
    return pencil_trace_plus(rho, sigma, 1.0 / u) / u;
  };
  double i2 = gauss_kronrod<double, 15>::integrate(f2, 0.0, 1.0, spec.max_depth,
                                                   spec.abs_tol, &err2);

  double achieved = err1 + err2;
  if (!(achieved <= 50 * spec.abs_tol)) {
    throw NumericFailure("relative_entropy_frenkel: quadrature error estimate " +
                         std::to_string(achieved) + " exceeds tolerance " +
                         std::to_string(spec.abs_tol));
  }
  return (real_trace(rho - sigma) + i1 + i2) / kLn2;
}

double relative_entropy_truncated(const Matrix& rho, const Matrix& sigma,
                                  double mu, double lambda,
                                  const QuadratureSpec& spec) {
  require_hermitian(rho, "relative_entropy_truncated(rho)");
  require_hermitian(sigma, "relative_entropy_truncated(sigma)");
  if (mu < 0.0 || lambda <= 0.0 || mu > lambda) {
    throw InvalidArgument("relative_entropy_truncated: need 0 <= mu <= lambda, lambda > 0");
  }
  Vector low = hermitian_eigenvalues(rho - mu * sigma);
  if (low.minCoeff() < -1e-9) {
    throw InvalidArgument(
        "relative_entropy_truncated: lower operator inequality mu*sigma <= rho "
        "violated (min eigenvalue " + std::to_string(low.minCoeff()) + ")");
  }
  Vector high = hermitian_eigenvalues(lambda * sigma - rho);
  if (high.minCoeff() < -1e-9) {
    throw InvalidArgument(
        "relative_entropy_truncated: upper operator inequality rho <= lambda*sigma "
        "violated (min eigenvalue " + std::to_string(high.minCoeff()) + ")");
  }

  double err = 0.0;
  auto f = [&](double s) {
    if (s <= 0.0) return 0.0;
    return trace_plus(s * sigma - rho) / s;
  };
  double integral = gauss_kronrod<double, 15>::integrate(
      f, mu, lambda, spec.max_depth, spec.abs_tol, &err);
  if (!(err <= 50 * spec.abs_tol)) {
    throw NumericFailure("relative_entropy_truncated: quadrature error estimate " +
                         std::to_string(err) + " exceeds tolerance " +
                         std::to_string(spec.abs_tol));
  }
  double closed = real_trace(rho) * std::log(lambda) -
                  (lambda - 1.0) * real_trace(sigma);
  return (real_trace(rho - sigma) + integral + closed) / kLn2;
}

OperatorPencilBounds pencil_bounds(const Matrix& rho, const Matrix& sigma) {
  require_hermitian(rho, "pencil_bounds(rho)");
  require_hermitian(sigma, "pencil_bounds(sigma)");
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (sigma + sigma.adjoint()));
  const Vector& s = es.eigenvalues();
  double cut = kKernelCut * std::max(s.maxCoeff(), 0.0);
  // sigma^{-1/2} on supp(sigma).
  Matrix inv_sqrt = Matrix::Zero(sigma.rows(), sigma.cols());
  for (int i = 0; i < s.size(); ++i) {
    if (s(i) > cut) {
      inv_sqrt += es.eigenvectors().col(i) * es.eigenvectors().col(i).adjoint() /
                  std::sqrt(s(i));
    }
  }
  Vector ev = hermitian_eigenvalues(inv_sqrt * rho * inv_sqrt);
  OperatorPencilBounds out;
  out.lambda = ev.maxCoeff() + 1e-9;
  out.mu = std::max(0.0, ev.minCoeff() - 1e-9);
  return out;
}

double conditional_entropy_cq(const CqState& state) {
  if (state.alphabet_size <= 0 ||
      static_cast<int>(state.weights.size()) != state.alphabet_size ||
      state.blocks.size() != state.weights.size()) {
    throw InvalidArgument("conditional_entropy_cq: inconsistent cq state");
  }
  double wsum = 0.0;
  int dim = 0;
  for (int a = 0; a < state.alphabet_size; ++a) {
    wsum += state.weights[a];
    if (state.weights[a] > 0.0) dim = static_cast<int>(state.blocks[a].rows());
  }
  if (std::abs(wsum - 1.0) > 1e-10) {
    throw InvalidArgument("conditional_entropy_cq: weights sum to " +
                          std::to_string(wsum));
  }
  if (dim == 0) throw InvalidArgument("conditional_entropy_cq: no support");

  int n = state.alphabet_size;
  Matrix rho_cq = Matrix::Zero(n * dim, n * dim);
  Matrix rho_e = Matrix::Zero(dim, dim);
  for (int a = 0; a < n; ++a) {
    if (state.weights[a] <= 0.0) continue;
    rho_cq.block(a * dim, a * dim, dim, dim) = state.weights[a] * state.blocks[a];
    rho_e += state.weights[a] * state.blocks[a];
  }
  Matrix sigma = Matrix::Zero(n * dim, n * dim);
  for (int a = 0; a < n; ++a) sigma.block(a * dim, a * dim, dim, dim) = rho_e;

  double h = -relative_entropy_eigen(rho_cq, sigma);
  return std::min(std::max(h, 0.0), log2_safe(static_cast<double>(n)));
}

Matrix angle_projector(double angle) {
  Matrix p(2, 2);
  double sx = std::sin(angle), cz = std::cos(angle);
  p << Complex(0.5 * (1.0 + cz), 0.0), Complex(0.5 * sx, 0.0),
       Complex(0.5 * sx, 0.0), Complex(0.5 * (1.0 - cz), 0.0);
  return p;
}

Matrix honest_state_matrix(const StateSpec& spec) {
  Eigen::Vector4cd phi;
  phi << 1.0 / std::sqrt(2.0), 0.0, 0.0, 1.0 / std::sqrt(2.0);
  Matrix pure = phi * phi.adjoint();
  switch (spec.family) {
    case StateFamily::PhiPlus:
      return pure;
    case StateFamily::Werner:
      if (spec.param < 0.0 || spec.param > 1.0) {
        throw InvalidArgument("honest_state_matrix: visibility outside [0,1]");
      }
      return spec.param * pure + (1.0 - spec.param) * 0.25 * Matrix::Identity(4, 4);
    case StateFamily::Dephased: {
      if (spec.param < 0.0 || spec.param > 1.0) {
        throw InvalidArgument("honest_state_matrix: dephasing outside [0,1]");
      }
      Matrix diag = Matrix::Zero(4, 4);
      diag(0, 0) = pure(0, 0);
      diag(3, 3) = pure(3, 3);
      return (1.0 - spec.param) * pure + spec.param * diag;
    }
  }
  throw InvalidArgument("honest_state_matrix: unknown family");
}

CqState honest_cq_state(const StateSpec& spec, double alice_angle,
                        std::optional<double> bob_angle) {
  Matrix rho_ab = honest_state_matrix(spec);

  // Purify into a 4-dim environment: |psi> = sum_i sqrt(l_i) |v_i>|i>.
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho_ab);
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(16);  // (AB) x E
  for (int i = 0; i < 4; ++i) {
    double l = std::max(0.0, es.eigenvalues()(i));
    for (int ab = 0; ab < 4; ++ab) {
      psi(ab * 4 + i) = std::sqrt(l) * es.eigenvectors()(ab, i);
    }
  }

  auto block_for = [&](const Matrix& proj_ab) {
    // tr_AB[(proj x 1_E) |psi><psi|], a 4x4 operator on E.
    Matrix out = Matrix::Zero(4, 4);
    for (int ab = 0; ab < 4; ++ab) {
      for (int cd = 0; cd < 4; ++cd) {
        if (proj_ab(cd, ab) == Complex(0.0, 0.0)) continue;
        for (int e = 0; e < 4; ++e) {
          for (int f = 0; f < 4; ++f) {
            out(e, f) += proj_ab(cd, ab) * psi(ab * 4 + e) *
                         std::conj(psi(cd * 4 + f));
          }
        }
      }
    }
    return out;
  };

  Matrix pa0 = angle_projector(alice_angle);
  std::vector<Matrix> alice = {pa0, Matrix::Identity(2, 2) - pa0};

  CqState state;
  if (!bob_angle) {
    state.alphabet_size = 2;
    for (const Matrix& pa : alice) {
      Matrix proj = Eigen::kroneckerProduct(pa, Matrix::Identity(2, 2)).eval();
      Matrix blk = block_for(proj);
      double w = blk.trace().real();
      state.weights.push_back(w);
      state.blocks.push_back(w > 1e-14 ? Matrix(blk / w) : Matrix::Zero(4, 4));
    }
  } else {
    Matrix pb0 = angle_projector(*bob_angle);
    std::vector<Matrix> bob = {pb0, Matrix::Identity(2, 2) - pb0};
    state.alphabet_size = 4;
    for (const Matrix& pa : alice) {
      for (const Matrix& pb : bob) {
        Matrix proj = Eigen::kroneckerProduct(pa, pb).eval();
        Matrix blk = block_for(proj);
        double w = blk.trace().real();
        state.weights.push_back(w);
        state.blocks.push_back(w > 1e-14 ? Matrix(blk / w) : Matrix::Zero(4, 4));
      }
    }
  }
  return state;
}

}  // namespace dicert
