#include "consensus/inference.hpp"

#include <cmath>
#include <string>

#include "consensus/distributions.hpp"
#include "consensus/errors.hpp"
#include "consensus/special_functions.hpp"

namespace consensus {

ConsensusPosterior ConsensusPosterior::from_weights(std::vector<double> weights) {
  ConsensusPosterior out{Simplex::normalized(std::move(weights)), 0.0, 0};
  for (std::size_t k = 0; k < out.probs.size(); ++k) {
    if (out.probs[k] > out.probs[out.argmax_class]) out.argmax_class = k;
  }
  out.acc = out.probs[out.argmax_class];
  return out;
}

namespace {

void check_inputs(const CountVector& votes, const ConcentrationVector& alpha, int num_samples) {
  if (votes.size() != alpha.size()) throw ArgumentError("posterior: votes/alpha dimension mismatch");
  if (num_samples < 1) throw ArgumentError("posterior: need at least one Monte-Carlo sample");
}

// Splits one unit of mass evenly across the classes tied for the maximum.
void add_split_argmax(const CountVector& h, double mass, std::vector<double>& acc) {
  int top = h[0];
  for (std::size_t k = 1; k < h.size(); ++k) top = std::max(top, h[k]);
  int ties = 0;
  for (std::size_t k = 0; k < h.size(); ++k) ties += h[k] == top ? 1 : 0;
  for (std::size_t k = 0; k < h.size(); ++k) {
    if (h[k] == top) acc[k] += mass / ties;
  }
}

}  // namespace

ConsensusPosterior consensus_posterior_finexp(const CountVector& votes,
                                              const ConcentrationVector& alpha, int pool_size,
                                              int num_samples, Rng& rng) {
  check_inputs(votes, alpha, num_samples);
  const int remaining = pool_size - votes.total();
  if (remaining < 0) throw ArgumentError("posterior: more votes than experts in the pool");
  const std::size_t k = votes.size();
  std::vector<double> tally(k, 0.0);
  if (remaining == 0) return observed_plurality(votes);

  const ConcentrationVector posterior_alpha = alpha + votes;
  std::vector<double> logw;
  std::vector<double> cdf(k);
  std::vector<int> h(k);
  for (int m = 0; m < num_samples; ++m) {
    dirichlet_log_weights(posterior_alpha, rng, logw);
    const double norm = log_sum_exp(logw);
    double running = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      running += std::exp(logw[j] - norm);
      cdf[j] = running;
      h[j] = votes[j];
    }
    for (int d = 0; d < remaining; ++d) {
      const double u = rng.uniform() * running;
      std::size_t j = 0;
      while (j + 1 < k && !(u < cdf[j])) ++j;
      ++h[j];
    }
    tally[argmax_random_tie<int>(h, rng)] += 1.0;
  }
  return ConsensusPosterior::from_weights(std::move(tally));
}

ConsensusPosterior consensus_posterior_infexp(const CountVector& votes,
                                              const ConcentrationVector& alpha, int num_samples,
                                              Rng& rng) {
  check_inputs(votes, alpha, num_samples);
  const ConcentrationVector posterior_alpha = alpha + votes;
  std::vector<double> tally(votes.size(), 0.0);
  std::vector<double> logw;
  for (int m = 0; m < num_samples; ++m) {
    dirichlet_log_weights(posterior_alpha, rng, logw);
    tally[argmax_random_tie<double>(logw, rng)] += 1.0;
  }
  return ConsensusPosterior::from_weights(std::move(tally));
}

ConsensusPosterior consensus_posterior_exact_finexp(const CountVector& votes,
                                                    const ConcentrationVector& alpha, int pool_size,
                                                    std::uint64_t limit) {
  check_inputs(votes, alpha, 1);
  const int remaining = pool_size - votes.total();
  if (remaining < 0) throw ArgumentError("posterior: more votes than experts in the pool");
  const auto support = composition_count(remaining, votes.size());
  if (support > limit) throw SupportTooLarge(support, limit);
  const ConcentrationVector posterior_alpha = alpha + votes;
  std::vector<double> tally(votes.size(), 0.0);
  for_each_composition(remaining, votes.size(), [&](const CountVector& extra) {
    const double mass = std::exp(dirmult_logpmf(extra, remaining, posterior_alpha));
    add_split_argmax(votes + extra, mass, tally);
  });
  return ConsensusPosterior::from_weights(std::move(tally));
}

ConsensusPosterior observed_plurality(const CountVector& votes) {
  std::vector<double> tally(votes.size(), 0.0);
  add_split_argmax(votes, 1.0, tally);
  return ConsensusPosterior::from_weights(std::move(tally));
}

std::size_t predict(const ConsensusPosterior& posterior, Rng& rng) {
  return argmax_random_tie<double>(posterior.probs.values(), rng);
}

}  // namespace consensus
