#include "consensus/distributions.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "consensus/errors.hpp"
#include "consensus/special_functions.hpp"

namespace consensus {

void dirichlet_log_weights(const ConcentrationVector& alpha, Rng& rng, std::vector<double>& out) {
  out.resize(alpha.size());
  for (std::size_t k = 0; k < alpha.size(); ++k) out[k] = rng.log_gamma_variate(alpha[k]);
}

Simplex dirichlet_sample(const ConcentrationVector& alpha, Rng& rng) {
  std::vector<double> logw;
  dirichlet_log_weights(alpha, rng, logw);
  const double norm = log_sum_exp(logw);
  std::vector<double> p(logw.size());
  for (std::size_t k = 0; k < p.size(); ++k) p[k] = std::exp(logw[k] - norm);
  return Simplex::normalized(std::move(p));
}

CountVector multinomial_sample(int n, const Simplex& p, Rng& rng) {
  if (n < 0) throw ArgumentError("multinomial_sample requires n >= 0");
  const std::size_t k = p.size();
  std::vector<int> counts(k, 0);
  if (n == 0) return CountVector(std::move(counts));
  std::vector<double> cdf(k);
  double running = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    running += p[j];
    cdf[j] = running;
  }
  std::size_t last_live = 0;
  for (std::size_t j = 0; j < k; ++j) {
    if (p[j] > 0.0) last_live = j;
  }
  for (int draw = 0; draw < n; ++draw) {
    // u > 0 strictly, so zero-width classes are never selected.
    const double u = rng.uniform() * running;
    std::size_t j = 0;
    while (j < last_live && !(u < cdf[j])) ++j;
    ++counts[j];
  }
  return CountVector(std::move(counts));
}

double multinomial_logpmf(const CountVector& x, int n, const Simplex& p) {
  if (x.size() != p.size()) throw ArgumentError("multinomial_logpmf: dimension mismatch");
  if (x.total() != n) {
    throw ArgumentError("multinomial_logpmf: counts sum to " + std::to_string(x.total()) +
                        " but n = " + std::to_string(n));
  }
  double out = log_factorial(n);
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (x[k] == 0) continue;
    if (p[k] == 0.0) return kLogZero;
    out += x[k] * std::log(p[k]) - log_factorial(x[k]);
  }
  return out;
}

double dirmult_logpmf(const CountVector& x, int n, const ConcentrationVector& alpha) {
  if (x.size() != alpha.size()) throw ArgumentError("dirmult_logpmf: dimension mismatch");
  if (x.total() != n) {
    throw ArgumentError("dirmult_logpmf: counts sum to " + std::to_string(x.total()) +
                        " but n = " + std::to_string(n));
  }
  const double a_sum = alpha.total();
  double out = log_gamma(a_sum) + log_factorial(n) - log_gamma(a_sum + n);
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (x[k] == 0) continue;
    out += log_gamma(alpha[k] + x[k]) - log_gamma(alpha[k]) - log_factorial(x[k]);
  }
  return out;
}

CountVector dirmult_sample(int n, const ConcentrationVector& alpha, Rng& rng) {
  if (n < 0) throw ArgumentError("dirmult_sample requires n >= 0");
  if (n == 0) return CountVector(alpha.size());
  return multinomial_sample(n, dirichlet_sample(alpha, rng), rng);
}

double mv_hypergeo_logpmf(const CountVector& sub, const CountVector& total, int n_draw) {
  if (sub.size() != total.size()) throw ArgumentError("mv_hypergeo_logpmf: dimension mismatch");
  if (sub.total() != n_draw) {
    throw ArgumentError("mv_hypergeo_logpmf: sub sums to " + std::to_string(sub.total()) +
                        " but n_draw = " + std::to_string(n_draw));
  }
  if (n_draw > total.total()) {
    throw ArgumentError("mv_hypergeo_logpmf: n_draw exceeds urn size");
  }
  double out = -log_choose(total.total(), n_draw);
  for (std::size_t k = 0; k < sub.size(); ++k) {
    if (sub[k] > total[k]) return kLogZero;
    out += log_choose(total[k], sub[k]);
  }
  return out;
}

std::size_t draw_vote_without_replacement(const CountVector& remaining, Rng& rng) {
  if (remaining.total() < 1) throw StateError("cannot draw a vote from an empty pool");
  auto u = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(remaining.total())));
  for (std::size_t k = 0; k < remaining.size(); ++k) {
    if (u < remaining[k]) return k;
    u -= remaining[k];
  }
  return remaining.size() - 1;  // unreachable
}

double gamma_logpdf(double x, double shape, double rate) {
  if (!(x > 0.0) || !(shape > 0.0) || !(rate > 0.0) || !std::isfinite(x) || !std::isfinite(shape) ||
      !std::isfinite(rate)) {
    throw ArgumentError("gamma_logpdf requires x, shape, rate > 0");
  }
  return shape * std::log(rate) - log_gamma(shape) + (shape - 1.0) * std::log(x) - rate * x;
}

std::uint64_t composition_count(int n, std::size_t k) {
  if (n < 0 || k == 0) return 0;
  // C(n + k - 1, k - 1) built incrementally; each prefix is itself a binomial.
  const std::uint64_t r = k - 1;
  std::uint64_t acc = 1;
  for (std::uint64_t i = 1; i <= r; ++i) {
    const auto num = static_cast<std::uint64_t>(n) + i;
    if (acc > std::numeric_limits<std::uint64_t>::max() / num) {
      return std::numeric_limits<std::uint64_t>::max();
    }
    acc = acc * num / i;
  }
  return acc;
}

}  // namespace consensus
