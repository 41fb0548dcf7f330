#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace dicert {

using Matrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Complex = std::complex<double>;

inline constexpr double kLn2 = 0.6931471805599453094;
inline constexpr double kPi = 3.14159265358979323846;

// Thrown on contract violations (bad dimensions, violated operator
// inequalities, unknown generators, malformed configs).
class InvalidArgument : public std::invalid_argument {
 public:
  explicit InvalidArgument(const std::string& msg) : std::invalid_argument(msg) {}
};

// Thrown when an iterative numeric procedure fails to reach its target
// accuracy; carries the achieved error estimate in the message.
class NumericFailure : public std::runtime_error {
 public:
  explicit NumericFailure(const std::string& msg) : std::runtime_error(msg) {}
};

class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

inline double log2_safe(double x) { return std::log(x) / kLn2; }

// Binary entropy in bits; h(0) = h(1) = 0.
inline double binary_entropy(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * log2_safe(p) - (1.0 - p) * log2_safe(1.0 - p);
}

inline double infinity() { return std::numeric_limits<double>::infinity(); }

}  // namespace dicert
