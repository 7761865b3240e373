#include "consensus/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "consensus/distributions.hpp"
#include "consensus/errors.hpp"
#include "consensus/special_functions.hpp"

namespace consensus {

ObservationRecord::ObservationRecord(Simplex f, CountVector votes)
    : f_(std::move(f)), votes_(std::move(votes)) {
  if (f_.size() != votes_.size()) throw ArgumentError("record: f and votes differ in dimension");
  if (votes_.total() < 1) throw ArgumentError("record must contain at least one queried vote");
}

WindowDataset::WindowDataset(int pool_size, std::size_t capacity)
    : pool_size_(pool_size), capacity_(capacity) {
  if (pool_size < 1) throw ArgumentError("expert pool size must be >= 1");
}

void WindowDataset::push(ObservationRecord record) {
  if (record.n_queried() > pool_size_) {
    throw ArgumentError("record has " + std::to_string(record.n_queried()) +
                        " votes but the pool holds " + std::to_string(pool_size_));
  }
  if (!records_.empty() && records_.front().votes().size() != record.votes().size()) {
    throw ArgumentError("record dimension differs from the window's");
  }
  records_.push_back(std::move(record));
  if (capacity_ > 0 && records_.size() > capacity_) records_.pop_front();
}

double infexp_loglik(const ObservationRecord& rec, const PriorParams& params) {
  return dirmult_logpmf(rec.votes(), rec.n_queried(), alpha_from(rec.f(), params));
}

namespace {

Simplex smoothed_vote_probs(const CountVector& votes) {
  const auto k = static_cast<double>(votes.size());
  std::vector<double> p(votes.size());
  for (std::size_t j = 0; j < votes.size(); ++j) {
    p[j] = (votes[j] + 1.0) / (votes.total() + k);
  }
  return Simplex::normalized(std::move(p));
}

void check_pool(const CountVector& votes, int pool_size) {
  if (votes.total() > pool_size) {
    throw ArgumentError("votes (" + std::to_string(votes.total()) + ") exceed pool size " +
                        std::to_string(pool_size));
  }
}

}  // namespace

CountVector proposal_sample(const CountVector& votes, int pool_size, Rng& rng) {
  check_pool(votes, pool_size);
  const int remaining = pool_size - votes.total();
  if (remaining == 0) return votes;
  return votes + multinomial_sample(remaining, smoothed_vote_probs(votes), rng);
}

double proposal_logpmf(const CountVector& completion, const CountVector& votes, int pool_size) {
  check_pool(votes, pool_size);
  if (completion.size() != votes.size()) throw ArgumentError("proposal_logpmf: dimension mismatch");
  if (completion.total() != pool_size || !votes.dominated_by(completion)) return kLogZero;
  return multinomial_logpmf(completion - votes, pool_size - votes.total(), smoothed_vote_probs(votes));
}

std::vector<ImportanceSample> draw_importance_samples(const CountVector& votes, int pool_size,
                                                      int num_samples, Rng& rng) {
  if (num_samples < 1) throw ArgumentError("importance sampling needs M >= 1");
  check_pool(votes, pool_size);
  std::map<CountVector, double> tally;
  for (int j = 0; j < num_samples; ++j) tally[proposal_sample(votes, pool_size, rng)] += 1.0;

  std::vector<ImportanceSample> out;
  out.reserve(tally.size());
  for (auto& [completion, count] : tally) {
    double base = log_factorial(pool_size) - proposal_logpmf(completion, votes, pool_size) +
                  mv_hypergeo_logpmf(votes, completion, votes.total());
    for (std::size_t k = 0; k < completion.size(); ++k) base -= log_factorial(completion[k]);
    out.push_back({completion, base, count});
  }
  return out;
}

namespace {

// Theta-dependent part of log DirMult(H; N, alpha) that varies with H:
// sum over H_k > 0 of lnG(alpha_k + H_k) - lnG(alpha_k).
double completion_log_term(const CountVector& completion, std::span<const double> alpha) {
  double out = 0.0;
  for (std::size_t k = 0; k < alpha.size(); ++k) {
    if (completion[k] > 0) out += log_gamma(alpha[k] + completion[k]) - log_gamma(alpha[k]);
  }
  return out;
}

// lnG(sum alpha) - lnG(sum alpha + n), shared by every completion of size n.
double shared_log_term(std::span<const double> alpha, int n) {
  double a_sum = 0.0;
  for (const double a : alpha) a_sum += a;
  return log_gamma(a_sum) - log_gamma(a_sum + n);
}

}  // namespace

double importance_loglik(std::span<const ImportanceSample> samples, int num_samples, int pool_size,
                         const ConcentrationVector& alpha) {
  if (samples.empty()) throw StateError("importance_loglik over an empty sample set");
  const auto a = alpha.values();
  const double shared = shared_log_term(a, pool_size);
  std::vector<double> terms;
  terms.reserve(samples.size());
  for (const auto& s : samples) {
    terms.push_back(std::log(s.multiplicity) + s.log_base + shared +
                    completion_log_term(s.completion, a));
  }
  const double out = log_sum_exp(terms) - std::log(static_cast<double>(num_samples));
  if (is_log_zero(out)) throw StateError("all importance weights vanished");
  return out;
}

double finexp_loglik_is(const ObservationRecord& rec, const PriorParams& params, int pool_size,
                        int num_samples, Rng& rng) {
  const auto samples = draw_importance_samples(rec.votes(), pool_size, num_samples, rng);
  return importance_loglik(samples, num_samples, pool_size, alpha_from(rec.f(), params));
}

double finexp_loglik_exact(const ObservationRecord& rec, const PriorParams& params, int pool_size,
                           std::uint64_t limit) {
  const auto& votes = rec.votes();
  check_pool(votes, pool_size);
  const int remaining = pool_size - votes.total();
  const auto support = composition_count(remaining, votes.size());
  if (support > limit) throw SupportTooLarge(support, limit);
  const auto alpha = alpha_from(rec.f(), params);
  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(support));
  for_each_composition(remaining, votes.size(), [&](const CountVector& extra) {
    const CountVector full = votes + extra;
    terms.push_back(dirmult_logpmf(full, pool_size, alpha) +
                    mv_hypergeo_logpmf(votes, full, votes.total()));
  });
  return log_sum_exp(terms);
}

std::vector<double> to_log_coordinates(const PriorParams& params) {
  std::vector<double> u;
  u.reserve(params.tau.size() + 2);
  u.push_back(std::log(params.theta));
  u.push_back(std::log(params.phi));
  for (const double t : params.tau) u.push_back(std::log(t));
  return u;
}

PriorParams from_log_coordinates(std::span<const double> u) {
  if (u.size() < 4) throw ArgumentError("log coordinates need at least 4 entries");
  PriorParams p;
  p.theta = std::exp(u[0]);
  p.phi = std::exp(u[1]);
  p.tau.reserve(u.size() - 2);
  for (std::size_t k = 2; k < u.size(); ++k) p.tau.push_back(std::exp(u[k]));
  return p;
}

MapObjective::MapObjective(const WindowDataset& data, HyperPriorConfig hyper, int num_samples)
    : hyper_(hyper), num_samples_(num_samples), pool_size_(data.pool_size()) {
  if (data.empty()) throw EmptyDataError("MAP objective over an empty window");
  hyper_.validate();
  if (hyper_.regime == Regime::FinExp && num_samples < 1) {
    throw ArgumentError("FinExp objective needs M >= 1");
  }
  num_classes_ = data.records().front().votes().size();
  terms_.reserve(data.size());
  for (const auto& rec : data.records()) {
    terms_.push_back({clamped_log_probs(rec.f()), rec.votes(), {}});
  }
}

void MapObjective::resample(Rng& rng) {
  if (hyper_.regime != Regime::FinExp) return;
  for (auto& term : terms_) {
    term.samples = draw_importance_samples(term.votes, pool_size_, num_samples_, rng);
  }
  sampled_ = true;
}

double MapObjective::loss(const PriorParams& params) const { return accumulate(params, nullptr); }

LossAndGradient MapObjective::evaluate(const PriorParams& params) const {
  LossAndGradient out;
  out.loss = accumulate(params, &out.gradient);
  return out;
}

double MapObjective::accumulate(const PriorParams& params, std::vector<double>* gradient) const {
  params.validate();
  if (params.tau.size() != num_classes_) throw ArgumentError("params dimension differs from data");
  if (hyper_.regime == Regime::FinExp && !sampled_) {
    throw StateError("FinExp objective evaluated before resample()");
  }
  const std::size_t k = num_classes_;
  double loglik = 0.0;
  // d loglik / d alpha for one record
  std::vector<double> g_alpha(k);
  std::vector<double> grad_u;
  if (gradient != nullptr) grad_u.assign(k + 2, 0.0);

  std::vector<double> log_weights;
  const std::size_t table_size = k * (static_cast<std::size_t>(pool_size_) + 1);
  std::vector<double> lg_table(hyper_.regime == Regime::FinExp ? table_size : 0);
  std::vector<double> dg_table(lg_table.size());
  for (const auto& term : terms_) {
    const AlphaTransform at = alpha_transform(term.log_f, params);
    const auto& alpha = at.alpha;
    double a_sum = 0.0;
    for (const double a : alpha) a_sum += a;

    if (hyper_.regime == Regime::InfExp) {
      const int n = term.votes.total();
      double ll = log_gamma(a_sum) + log_factorial(n) - log_gamma(a_sum + n);
      for (std::size_t j = 0; j < k; ++j) {
        if (term.votes[j] > 0) {
          ll += log_gamma(alpha[j] + term.votes[j]) - log_gamma(alpha[j]) -
                log_factorial(term.votes[j]);
        }
      }
      loglik += ll;
      if (gradient != nullptr) {
        const double shared = digamma(a_sum) - digamma(a_sum + n);
        for (std::size_t j = 0; j < k; ++j) {
          g_alpha[j] = shared;
          if (term.votes[j] > 0) g_alpha[j] += digamma(alpha[j] + term.votes[j]) - digamma(alpha[j]);
        }
      }
    } else {
      // Completion counts are integers in [0, N], so
      //   lnG(a + h) - lnG(a) = sum_{i<h} log(a + i),  psi(a + h) - psi(a) = sum_{i<h} 1 / (a + i)
      // and both come from prefix tables built once per record.
      const std::size_t stride = static_cast<std::size_t>(pool_size_) + 1;
      for (std::size_t j = 0; j < k; ++j) {
        double lg = 0.0;
        double dg = 0.0;
        lg_table[j * stride] = 0.0;
        dg_table[j * stride] = 0.0;
        for (int i = 0; i < pool_size_; ++i) {
          lg += std::log(alpha[j] + i);
          dg += 1.0 / (alpha[j] + i);
          lg_table[j * stride + static_cast<std::size_t>(i) + 1] = lg;
          dg_table[j * stride + static_cast<std::size_t>(i) + 1] = dg;
        }
      }
      const double shared = shared_log_term(alpha, pool_size_);
      log_weights.clear();
      for (const auto& s : term.samples) {
        double w = std::log(s.multiplicity) + s.log_base + shared;
        for (std::size_t j = 0; j < k; ++j) {
          w += lg_table[j * stride + static_cast<std::size_t>(s.completion[j])];
        }
        log_weights.push_back(w);
      }
      const double lse = log_sum_exp(log_weights);
      loglik += lse - std::log(static_cast<double>(num_samples_));
      if (gradient != nullptr) {
        // Self-normalized weights times d log DirMult(H_j; N, alpha) / d alpha.
        const double shared_g = digamma(a_sum) - digamma(a_sum + pool_size_);
        std::fill(g_alpha.begin(), g_alpha.end(), shared_g);
        for (std::size_t s = 0; s < term.samples.size(); ++s) {
          const double w = std::exp(log_weights[s] - lse);
          if (w == 0.0) continue;
          const auto& h = term.samples[s].completion;
          for (std::size_t j = 0; j < k; ++j) {
            g_alpha[j] += w * dg_table[j * stride + static_cast<std::size_t>(h[j])];
          }
        }
      }
    }

    if (gradient != nullptr) {
      // alpha_j = theta s_j + phi, s = softmax(tau (.) log f)
      double gs = 0.0;
      double g_sum = 0.0;
      for (std::size_t j = 0; j < k; ++j) {
        gs += g_alpha[j] * at.softmax[j];
        g_sum += g_alpha[j];
      }
      grad_u[0] += params.theta * gs;
      grad_u[1] += params.phi * g_sum;
      for (std::size_t j = 0; j < k; ++j) {
        grad_u[2 + j] +=
            params.tau[j] * params.theta * at.log_f[j] * at.softmax[j] * (g_alpha[j] - gs);
      }
    }
  }

  const double lp = log_prior(params, hyper_);
  if (gradient != nullptr) {
    // d/du log Gamma-pdf(e^u; a, b) = (a - 1) - b e^u
    grad_u[0] += (hyper_.theta.shape - 1.0) - hyper_.theta.rate * params.theta;
    grad_u[1] += (hyper_.phi.shape - 1.0) - hyper_.phi.rate * params.phi;
    for (std::size_t j = 0; j < k; ++j) {
      grad_u[2 + j] += (hyper_.tau.shape - 1.0) - hyper_.tau.rate * params.tau[j];
    }
    for (double& g : grad_u) g = -g;
    *gradient = std::move(grad_u);
  }
  return -(loglik + lp);
}

double map_loss(const PriorParams& params, const WindowDataset& data, const HyperPriorConfig& hyper,
                int num_samples, Rng& rng) {
  MapObjective objective(data, hyper, num_samples);
  objective.resample(rng);
  return objective.loss(params);
}

std::vector<double> map_gradient(const PriorParams& params, const WindowDataset& data,
                                 const HyperPriorConfig& hyper, int num_samples, Rng& rng) {
  MapObjective objective(data, hyper, num_samples);
  objective.resample(rng);
  return objective.evaluate(params).gradient;
}

}  // namespace consensus
