#pragma once

// Small statistics helpers for the test suites: total variation distance and
// a chi-square upper tail via the regularized incomplete gamma function.

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace teststats {

inline double total_variation(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw std::invalid_argument("total_variation: length mismatch");
  double tv = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) tv += std::abs(p[i] - q[i]);
  return 0.5 * tv;
}

/// Lower regularized incomplete gamma P(a, x) by series expansion (x < a+1).
inline double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int i = 0; i < 500; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * 1e-15) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

/// Upper regularized incomplete gamma Q(a, x) by continued fraction (x >= a+1).
inline double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 500; ++i) {
    double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-15) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

inline double gamma_q(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_q: bad arguments");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_cf(a, x);
}

/// Upper-tail p-value of a chi-square statistic with `df` degrees of freedom.
inline double chi_square_pvalue(double statistic, int df) {
  return gamma_q(0.5 * df, 0.5 * statistic);
}

/// Pearson chi-square statistic of observed counts against expected
/// probabilities; cells with tiny expectation are pooled into the last cell.
inline double chi_square_statistic(std::span<const std::int64_t> observed,
                                   std::span<const double> expected_probs, std::int64_t total,
                                   int* df_out) {
  if (observed.size() != expected_probs.size()) {
    throw std::invalid_argument("chi_square_statistic: length mismatch");
  }
  double stat = 0.0;
  double pooled_obs = 0.0;
  double pooled_exp = 0.0;
  int cells = 0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    double expect = expected_probs[i] * static_cast<double>(total);
    if (expect < 5.0) {
      pooled_obs += static_cast<double>(observed[i]);
      pooled_exp += expect;
      continue;
    }
    double diff = static_cast<double>(observed[i]) - expect;
    stat += diff * diff / expect;
    ++cells;
  }
  if (pooled_exp > 0.0) {
    double diff = pooled_obs - pooled_exp;
    stat += diff * diff / pooled_exp;
    ++cells;
  }
  if (df_out) *df_out = cells - 1;
  return stat;
}

}  // namespace teststats
