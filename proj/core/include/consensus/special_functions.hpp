#pragma once

#include <limits>
#include <span>

namespace consensus {

// Log-domain zero. Every log-probability routine returns this for impossible
// outcomes, and log_sum_exp treats it as an additive identity.
inline constexpr double kLogZero = -std::numeric_limits<double>::infinity();

inline bool is_log_zero(double x) noexcept { return x == kLogZero; }

// ln Gamma(x) for x > 0. Stirling series after upward recurrence to x >= 15;
// absolute error below 1e-13 for x < 1e4 and relative error near machine
// epsilon beyond.
double log_gamma(double x);

// psi(x) = d/dx ln Gamma(x) for x > 0.
double digamma(double x);

// ln C(n, k); kLogZero when k < 0 or k > n.
double log_choose(int n, int k);

// ln(n!)
double log_factorial(int n);

double log_sum_exp(std::span<const double> xs) noexcept;
double log_add_exp(double a, double b) noexcept;

}  // namespace consensus
