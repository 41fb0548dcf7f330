#include "grid.hpp"

#include <algorithm>
#include <cmath>

#include "dense_oracle.hpp"

namespace dicert {

std::vector<double> make_grid(const GridSpec& spec) {
  if (spec.spacing == GridSpacing::Custom) {
    const auto& nodes = spec.custom_nodes;
    if (nodes.size() < 2) {
      throw InvalidArgument("make_grid: custom grid needs at least 2 nodes");
    }
    for (size_t i = 0; i < nodes.size(); ++i) {
      if (nodes[i] <= 0.0) throw InvalidArgument("make_grid: nodes must be positive");
      if (i > 0 && nodes[i] <= nodes[i - 1]) {
        throw InvalidArgument("make_grid: nodes must be strictly increasing");
      }
    }
    return nodes;
  }
  if (spec.node_count < 2) {
    throw InvalidArgument("make_grid: node_count must be >= 2");
  }
  if (spec.lambda <= 0.0) throw InvalidArgument("make_grid: lambda must be > 0");
  double t_min = spec.t_min;
  if (t_min == 0.0) {
    t_min = spec.spacing == GridSpacing::Uniform
                ? spec.lambda / spec.node_count
                : 1e-3 * spec.lambda;
  }
  if (t_min <= 0.0 || t_min >= spec.lambda) {
    throw InvalidArgument("make_grid: need 0 < t_min < lambda");
  }
  int r = spec.node_count;
  std::vector<double> nodes(r);
  if (spec.spacing == GridSpacing::Uniform) {
    double step = (spec.lambda - t_min) / (r - 1);
    for (int k = 0; k < r; ++k) nodes[k] = t_min + k * step;
  } else {
    double ratio = std::log(spec.lambda / t_min) / (r - 1);
    for (int k = 0; k < r; ++k) nodes[k] = t_min * std::exp(k * ratio);
  }
  nodes.back() = spec.lambda;
  return nodes;
}

GridCoefficients coefficients(const std::vector<double>& nodes) {
  int r = static_cast<int>(nodes.size());
  if (r < 2) throw InvalidArgument("coefficients: need at least 2 nodes");
  for (int i = 0; i < r; ++i) {
    if (nodes[i] <= 0.0) throw InvalidArgument("coefficients: nodes must be positive");
    if (i > 0 && nodes[i] <= nodes[i - 1]) {
      throw InvalidArgument("coefficients: nodes must be strictly increasing");
    }
  }

  GridCoefficients out;
  out.nodes = nodes;
  out.lambda = nodes.back();
  out.alpha.assign(r + 1, 0.0);
  out.beta.assign(r + 1, 0.0);

  // Convexity end term for [0, t_1].
  out.alpha[0] = -1.0;
  out.beta[0] = nodes[0];

  // Chord weights: integrating the linear interpolant of tr^+[sigma s - rho]
  // against ds/s gives node k the weight below; stored as alpha_k = -w_k,
  // beta_k = w_k t_k.
  auto left_part = [&](int k) {
    // contribution from interval [t_k, t_{k+1}] to node k (0-based k)
    double tk = nodes[k], tk1 = nodes[k + 1];
    return (1.0 + tk / (tk1 - tk)) * std::log(tk1 / tk) - 1.0;
  };
  auto right_part = [&](int k) {
    // contribution from interval [t_{k-1}, t_k] to node k
    double tkm = nodes[k - 1], tk = nodes[k];
    return 1.0 - (tkm / (tk - tkm)) * std::log(tk / tkm);
  };
  for (int k = 1; k <= r; ++k) {
    double w = 0.0;
    if (k < r) w += left_part(k - 1);
    if (k > 1) w += right_part(k - 1);
    out.alpha[k] = -w;
    out.beta[k] = w * nodes[k - 1];
  }
  return out;
}

GridCoefficients make_coefficients(const GridSpec& spec) {
  return coefficients(make_grid(spec));
}

double dense_discretized_bound(const Matrix& rho, const Matrix& sigma,
                               const GridCoefficients& coeffs) {
  Vector ev = Eigen::SelfAdjointEigenSolver<Matrix>(
                  coeffs.lambda * sigma - rho, Eigen::EigenvaluesOnly)
                  .eigenvalues();
  if (ev.minCoeff() < -1e-9) {
    throw InvalidArgument(
        "dense_discretized_bound: rho <= lambda*sigma violated (min eigenvalue " +
        std::to_string(ev.minCoeff()) + ")");
  }
  double sum = 0.0;
  for (int k = 0; k < coeffs.term_count(); ++k) {
    sum += trace_plus(coeffs.alpha[k] * rho + coeffs.beta[k] * sigma);
  }
  return sum;
}

double dense_discretized_relative_entropy(const Matrix& rho, const Matrix& sigma,
                                          const GridCoefficients& coeffs) {
  double bracket = dense_discretized_bound(rho, sigma, coeffs);
  double tr_rho = rho.trace().real();
  double tr_sigma = sigma.trace().real();
  return (tr_rho - tr_sigma + bracket + tr_rho * std::log(coeffs.lambda) -
          (coeffs.lambda - 1.0) * tr_sigma) /
         kLn2;
}

}  // namespace dicert
