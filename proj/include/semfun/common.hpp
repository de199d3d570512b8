#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace semfun {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Malformed or inconsistent input data (files, records, vocabularies).
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Numerically undefined or non-finite result where a finite one is required.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

inline double sigmoid(double z) {
  if (z >= 0.0) {
    return 1.0 / (1.0 + std::exp(-z));
  }
  double e = std::exp(z);
  return e / (1.0 + e);
}

/// log(sigmoid(z)), stable for large |z|.
inline double log_sigmoid(double z) {
  if (z >= 0.0) {
    return -std::log1p(std::exp(-z));
  }
  return z - std::log1p(std::exp(z));
}

/// log(exp(a) + exp(b)) with the usual max shift.
inline double logaddexp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  double hi = std::max(a, b);
  double lo = std::min(a, b);
  return hi + std::log1p(std::exp(lo - hi));
}

/// Streaming log-sum-exp accumulator.
class LogSumAccumulator {
 public:
  void add(double log_term) { total_ = logaddexp(total_, log_term); }
  double value() const { return total_; }

 private:
  double total_ = kNegInf;
};

}  // namespace semfun
