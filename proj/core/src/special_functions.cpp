#include "consensus/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "consensus/errors.hpp"

namespace consensus {

namespace {

constexpr double kStirlingShift = 15.0;
constexpr double kDigammaShift = 10.0;

double stirling_log_gamma(double x) {
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  // Bernoulli-number correction B_{2j} / (2j (2j-1) x^{2j-1}), j = 1..7.
  const double series =
      inv * (1.0 / 12.0 +
             inv2 * (-1.0 / 360.0 +
                     inv2 * (1.0 / 1260.0 +
                             inv2 * (-1.0 / 1680.0 +
                                     inv2 * (1.0 / 1188.0 +
                                             inv2 * (-691.0 / 360360.0 + inv2 * (1.0 / 156.0)))))));
  return (x - 0.5) * std::log(x) - x + 0.5 * std::log(2.0 * std::numbers::pi) + series;
}

}  // namespace

double log_gamma(double x) {
  if (!std::isfinite(x) || !(x > 0.0)) {
    throw DomainError("log_gamma requires finite x > 0, got " + std::to_string(x));
  }
  if (x >= kStirlingShift) return stirling_log_gamma(x);
  // ln Gamma(x) = ln Gamma(x + n) - ln(x (x+1) ... (x+n-1))
  double product = 1.0;
  double z = x;
  while (z < kStirlingShift) {
    product *= z;
    z += 1.0;
  }
  return stirling_log_gamma(z) - std::log(product);
}

double digamma(double x) {
  if (!std::isfinite(x) || !(x > 0.0)) {
    throw DomainError("digamma requires finite x > 0, got " + std::to_string(x));
  }
  double shift = 0.0;
  while (x < kDigammaShift) {
    shift -= 1.0 / x;
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  const double series =
      inv2 * (1.0 / 12.0 -
              inv2 * (1.0 / 120.0 -
                      inv2 * (1.0 / 252.0 -
                              inv2 * (1.0 / 240.0 -
                                      inv2 * (1.0 / 132.0 - inv2 * (691.0 / 32760.0 - inv2 / 12.0))))));
  return shift + std::log(x) - 0.5 * inv - series;
}

double log_factorial(int n) {
  if (n < 0) throw DomainError("log_factorial of negative argument");
  if (n < 2) return 0.0;
  return log_gamma(static_cast<double>(n) + 1.0);
}

double log_choose(int n, int k) {
  if (k < 0 || k > n) return kLogZero;
  if (k == 0 || k == n) return 0.0;
  return log_factorial(n) - log_factorial(k) - log_factorial(n - k);
}

double log_sum_exp(std::span<const double> xs) noexcept {
  double peak = kLogZero;
  for (const double x : xs) peak = std::max(peak, x);
  if (is_log_zero(peak)) return kLogZero;
  if (!std::isfinite(peak)) return peak;
  double acc = 0.0;
  for (const double x : xs) acc += std::exp(x - peak);
  return peak + std::log(acc);
}

double log_add_exp(double a, double b) noexcept {
  if (is_log_zero(a)) return b;
  if (is_log_zero(b)) return a;
  const double hi = std::max(a, b);
  const double lo = std::min(a, b);
  return hi + std::log1p(std::exp(lo - hi));
}

}  // namespace consensus
