#pragma once

// Integration grids and the per-node coefficient pairs that turn the
// truncated relative-entropy integral into a sum of trace_plus terms,
//
//   int_0^lambda ds/s tr^+[sigma s - rho]
//     <= sum_{k=0}^r sup_{0<=P<=1} tr[P (alpha_k rho + beta_k sigma)],
//
// where node k=0 is the convexity end term covering [0, t_1] and nodes
// 1..r carry chord weights on [t_1, t_r].

#include <vector>

#include "common.hpp"

namespace dicert {

enum class GridSpacing { Uniform, Logarithmic, Custom };

struct GridSpec {
  int node_count = 8;
  double lambda = 1.0;
  // First node t_1; 0 selects the default placement (lambda/node_count for
  // uniform spacing, 1e-3*lambda for logarithmic).
  double t_min = 0.0;
  GridSpacing spacing = GridSpacing::Uniform;
  std::vector<double> custom_nodes;  // used when spacing == Custom
};

struct GridCoefficients {
  std::vector<double> nodes;   // t_1 < ... < t_r = lambda, all > 0
  std::vector<double> alpha;   // alpha_0..alpha_r, all <= 0, alpha_0 = -1
  std::vector<double> beta;    // beta_0..beta_r, beta_0 = t_1, beta_k = -alpha_k t_k
  double lambda = 1.0;

  int node_count() const { return static_cast<int>(nodes.size()); }
  // Number of coefficient pairs, r + 1 (including the end term).
  int term_count() const { return static_cast<int>(alpha.size()); }
};

// Strictly increasing nodes ending at spec.lambda.
std::vector<double> make_grid(const GridSpec& spec);

// Coefficient pairs for a given node list (>= 2 strictly increasing positive
// nodes).
GridCoefficients coefficients(const std::vector<double>& nodes);

GridCoefficients make_coefficients(const GridSpec& spec);

// Dense evaluation of the bracketed supremum: each node decouples, so the
// value is sum_k tr^+[alpha_k rho + beta_k sigma]. Requires rho <= lambda*sigma.
double dense_discretized_bound(const Matrix& rho, const Matrix& sigma,
                               const GridCoefficients& coeffs);

// Full discretized upper bound on D(rho||sigma) in bits:
// (tr[rho-sigma] + dense_discretized_bound + tr[rho] ln(lambda)
//  - (lambda-1) tr[sigma]) / ln2.
double dense_discretized_relative_entropy(const Matrix& rho, const Matrix& sigma,
                                          const GridCoefficients& coeffs);

}  // namespace dicert
