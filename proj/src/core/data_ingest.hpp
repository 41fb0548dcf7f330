#pragma once

// Loading of empirical conditional distributions, non-signalling tests, and
// least-squares projection onto the non-signalling affine set.
//
// CSV format: header "na=<oa>,nb=<ob>,nx=<nx>,ny=<ny>,mode=<counts|probs>"
// followed by one "x,y,a,b,value" row per entry. JSON format: an object with
// the same keys and a nested table[x][y][a][b].

#include <string>
#include <vector>

#include "scenario.hpp"

namespace dicert {

enum class TableFormat { Csv, JsonTable };

struct RawCounts {
  Scenario scenario;
  std::vector<long long> counts;           // indexed like Distribution
  std::vector<long long> setting_totals;   // per (x,y)

  long long& at(int a, int b, int x, int y) {
    return counts[BellFunctional::coeff_index(scenario, a, b, x, y)];
  }
  Distribution normalize() const;
};

Distribution load_distribution(const std::string& path, TableFormat format);

struct NonSignallingReport {
  bool non_signalling = false;
  double max_violation = 0.0;
};

// Checks that Alice marginals are independent of y and Bob marginals of x.
NonSignallingReport is_nonsignalling(const Distribution& d, double tol = 1e-9);

struct ProjectionResult {
  Distribution projected;
  double l1_perturbation = 0.0;   // ||d - projected||_1
  double l2_perturbation = 0.0;
  double min_entry = 0.0;         // most negative entry before clipping
  bool clipped = false;
};

// Euclidean projection onto the affine set of normalized non-signalling
// tables. Slightly negative entries (>= -1e-6) are clipped and reprojected
// once; anything worse is an error suggesting a proper QP treatment.
ProjectionResult project_nonsignalling(const Distribution& d);

}  // namespace dicert
