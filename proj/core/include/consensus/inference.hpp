#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "consensus/rng.hpp"
#include "consensus/types.hpp"

namespace consensus {

inline constexpr int kDefaultInferenceSamples = 2048;

// Posterior probability that each class is the pool's consensus.
struct ConsensusPosterior {
  Simplex probs;
  double acc = 0.0;              // probs[argmax_class]
  std::size_t argmax_class = 0;  // lowest index among exact ties

  static ConsensusPosterior from_weights(std::vector<double> weights);
};

// Index of the largest entry; exact ties are broken uniformly at random.
template <class T>
std::size_t argmax_random_tie(std::span<const T> values, Rng& rng) {
  std::size_t best = 0;
  std::size_t ties = 1;
  for (std::size_t k = 1; k < values.size(); ++k) {
    if (values[k] > values[best]) {
      best = k;
      ties = 1;
    } else if (values[k] == values[best]) {
      ++ties;
    }
  }
  if (ties == 1) return best;
  auto pick = rng.uniform_index(ties);
  for (std::size_t k = best; k < values.size(); ++k) {
    if (values[k] == values[best] && pick-- == 0) return k;
  }
  return best;
}

// Monte-Carlo posterior for a finite pool of N experts: completes the pool
// with H = votes + DirMult(N - n, alpha + votes) and tallies the argmax of
// each completion, breaking ties at random per completion.
ConsensusPosterior consensus_posterior_finexp(const CountVector& votes,
                                              const ConcentrationVector& alpha, int pool_size,
                                              int num_samples, Rng& rng);

// Infinite-pool limit: tallies argmax of pi ~ Dirichlet(alpha + votes).
ConsensusPosterior consensus_posterior_infexp(const CountVector& votes,
                                              const ConcentrationVector& alpha, int num_samples,
                                              Rng& rng);

// Exact finite-pool posterior by enumerating every completion; tie mass is
// split evenly among the tied classes. Throws SupportTooLarge past `limit`.
ConsensusPosterior consensus_posterior_exact_finexp(const CountVector& votes,
                                                    const ConcentrationVector& alpha, int pool_size,
                                                    std::uint64_t limit = 1'000'000);

// Point mass on the plurality of `votes`, split evenly across ties. This is
// the exact posterior once the pool is exhausted or the leader cannot be caught.
ConsensusPosterior observed_plurality(const CountVector& votes);

// argmax of the posterior with uniform random tie-breaking.
std::size_t predict(const ConsensusPosterior& posterior, Rng& rng);

}  // namespace consensus
