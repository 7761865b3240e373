#pragma once

// Reference computations used by the tests. Each one takes a different route
// from the library code it checks: direct products, explicit enumeration of
// individual items, or long-double arithmetic.

#include <cmath>
#include <cstddef>
#include <algorithm>
#include <functional>
#include <numeric>
#include <vector>

namespace oracle {

inline long double factorial(int n) {
  long double r = 1.0L;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

inline long double multinomial_coefficient(const std::vector<int>& x) {
  long double r = factorial(std::accumulate(x.begin(), x.end(), 0));
  for (const int v : x) r /= factorial(v);
  return r;
}

// Probability of histogram x after n draws from a Polya urn seeded with alpha:
// each ordered sequence has probability prod_k rising(alpha_k, x_k) / rising(sum alpha, n).
inline long double polya_urn_pmf(const std::vector<int>& x, const std::vector<double>& alpha) {
  long double num = 1.0L;
  long double a_total = 0.0L;
  int n = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    for (int j = 0; j < x[k]; ++j) num *= static_cast<long double>(alpha[k]) + j;
    a_total += alpha[k];
    n += x[k];
  }
  long double den = 1.0L;
  for (int j = 0; j < n; ++j) den *= a_total + j;
  return multinomial_coefficient(x) * num / den;
}

inline long double multinomial_pmf(const std::vector<int>& x, const std::vector<double>& p) {
  long double r = multinomial_coefficient(x);
  for (std::size_t k = 0; k < x.size(); ++k) r *= std::pow(static_cast<long double>(p[k]), x[k]);
  return r;
}

// Hypergeometric probability by listing every n_draw-subset of labelled items.
inline long double hypergeo_by_subsets(const std::vector<int>& sub, const std::vector<int>& total) {
  std::vector<int> items;
  for (std::size_t k = 0; k < total.size(); ++k) items.insert(items.end(), total[k], static_cast<int>(k));
  const int n_draw = std::accumulate(sub.begin(), sub.end(), 0);
  const auto m = items.size();
  long long hits = 0;
  long long all = 0;
  for (unsigned long mask = 0; mask < (1UL << m); ++mask) {
    if (__builtin_popcountl(mask) != n_draw) continue;
    ++all;
    std::vector<int> h(total.size(), 0);
    for (std::size_t i = 0; i < m; ++i) {
      if (mask & (1UL << i)) ++h[static_cast<std::size_t>(items[i])];
    }
    if (h == sub) ++hits;
  }
  return static_cast<long double>(hits) / static_cast<long double>(all);
}

// Every non-negative integer vector of length k summing to n, by recursion.
inline void compositions(int n, std::size_t k, const std::function<void(const std::vector<int>&)>& f) {
  std::vector<int> cur(k, 0);
  std::function<void(std::size_t, int)> rec = [&](std::size_t pos, int left) {
    if (pos + 1 == k) {
      cur[pos] = left;
      f(cur);
      return;
    }
    for (int v = 0; v <= left; ++v) {
      cur[pos] = v;
      rec(pos + 1, left - v);
    }
  };
  rec(0, n);
}

// Consensus probability of each class under the finite-pool model by brute
// force: enumerate the completion of the remaining votes with the Polya urn
// and split ties evenly.
inline std::vector<long double> consensus_by_urn(const std::vector<int>& votes, int pool,
                                                 const std::vector<double>& alpha) {
  const std::size_t k = votes.size();
  const int seen = std::accumulate(votes.begin(), votes.end(), 0);
  std::vector<double> post(alpha);
  for (std::size_t j = 0; j < k; ++j) post[j] += votes[j];
  std::vector<long double> out(k, 0.0L);
  compositions(pool - seen, k, [&](const std::vector<int>& rest) {
    const long double p = polya_urn_pmf(rest, post);
    std::vector<int> full(k);
    for (std::size_t j = 0; j < k; ++j) full[j] = votes[j] + rest[j];
    const int best = *std::max_element(full.begin(), full.end());
    const auto ties = std::count(full.begin(), full.end(), best);
    for (std::size_t j = 0; j < k; ++j) {
      if (full[j] == best) out[j] += p / static_cast<long double>(ties);
    }
  });
  return out;
}

}  // namespace oracle
