#pragma once

#include <cstddef>
#include <vector>

#include "consensus/rng.hpp"
#include "consensus/types.hpp"

namespace consensus {

// Draws from Dirichlet(alpha). Normalization happens in log space so
// concentrations far below 1 still yield a valid simplex.
Simplex dirichlet_sample(const ConcentrationVector& alpha, Rng& rng);

// Unnormalized log-Gamma variates underlying one Dirichlet draw. Their argmax
// is the argmax of the corresponding Dirichlet sample.
void dirichlet_log_weights(const ConcentrationVector& alpha, Rng& rng, std::vector<double>& out);

CountVector multinomial_sample(int n, const Simplex& p, Rng& rng);

// log Multinomial(x; n, p); kLogZero when x puts mass on a zero-probability class.
double multinomial_logpmf(const CountVector& x, int n, const Simplex& p);

// log DirMult(x; n, alpha) including the multinomial coefficient:
//   lnG(sum a) + lnG(n+1) - lnG(sum a + n) + sum_k [lnG(a_k + x_k) - lnG(a_k) - lnG(x_k + 1)]
double dirmult_logpmf(const CountVector& x, int n, const ConcentrationVector& alpha);

CountVector dirmult_sample(int n, const ConcentrationVector& alpha, Rng& rng);

// log of the K-dimensional hypergeometric pmf of drawing `sub` (n_draw items)
// without replacement from an urn with composition `total`.
double mv_hypergeo_logpmf(const CountVector& sub, const CountVector& total, int n_draw);

// Class index drawn with probability remaining_k / sum(remaining). The caller
// decrements `remaining`.
std::size_t draw_vote_without_replacement(const CountVector& remaining, Rng& rng);

// Gamma(shape a, rate b) log density at x.
double gamma_logpdf(double x, double shape, double rate);

// Number of non-negative integer K-vectors summing to n, C(n + K - 1, K - 1),
// saturating at UINT64_MAX.
std::uint64_t composition_count(int n, std::size_t k);

// Calls visit(const CountVector&) for every non-negative K-vector summing to n.
template <class Visit>
void for_each_composition(int n, std::size_t k, Visit&& visit) {
  std::vector<int> parts(k, 0);
  parts[k - 1] = n;
  for (;;) {
    visit(CountVector(parts));
    // Advance: find the rightmost position before the last that can take a unit.
    std::size_t j = k - 1;
    while (j > 0 && parts[j] == 0) --j;
    if (j == 0) return;
    const int tail = parts[j];
    parts[j] = 0;
    parts[j - 1] += 1;
    parts[k - 1] = tail - 1;
  }
}

}  // namespace consensus
