#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <vector>

#include "consensus/prior.hpp"
#include "consensus/rng.hpp"
#include "consensus/types.hpp"

namespace consensus {

// One past timestep: classifier output and the votes bought for it.
class ObservationRecord {
 public:
  // Requires at least one queried vote and matching dimensions.
  ObservationRecord(Simplex f, CountVector votes);

  const Simplex& f() const noexcept { return f_; }
  const CountVector& votes() const noexcept { return votes_; }
  int n_queried() const noexcept { return votes_.total(); }

 private:
  Simplex f_;
  CountVector votes_;
};

// FIFO window of the most recent records. capacity == 0 means unbounded.
class WindowDataset {
 public:
  static constexpr std::size_t kDefaultCapacity = 500;

  explicit WindowDataset(int pool_size, std::size_t capacity = kDefaultCapacity);

  void push(ObservationRecord record);
  void clear() noexcept { records_.clear(); }

  int pool_size() const noexcept { return pool_size_; }
  std::size_t capacity() const noexcept { return capacity_; }
  std::size_t size() const noexcept { return records_.size(); }
  bool empty() const noexcept { return records_.empty(); }
  const std::deque<ObservationRecord>& records() const noexcept { return records_; }

 private:
  int pool_size_;
  std::size_t capacity_;
  std::deque<ObservationRecord> records_;
};

// Closed-form likelihood of the queried votes in the infinite-expert regime.
double infexp_loglik(const ObservationRecord& rec, const PriorParams& params);

// Proposal q: votes + Multinomial(N - n, (votes + 1) / (n + K)). Every
// completion with non-zero hypergeometric probability has support.
CountVector proposal_sample(const CountVector& votes, int pool_size, Rng& rng);
double proposal_logpmf(const CountVector& completion, const CountVector& votes, int pool_size);

// A distinct completion drawn from q together with its Theta-free log weight
//   log N! - sum_k log H_k! - log q(H | votes) + log HyperGeo(votes; H, n)
// and how many of the M draws produced it.
struct ImportanceSample {
  CountVector completion;
  double log_base = 0.0;
  double multiplicity = 0.0;
};

// Draws M completions from q and merges duplicates. Independent of Theta, so
// the same set can be reused across loss and gradient evaluations.
std::vector<ImportanceSample> draw_importance_samples(const CountVector& votes, int pool_size,
                                                      int num_samples, Rng& rng);

// log of (1/M) sum_j p(H_j | alpha) / q(H_j) * p(votes | H_j).
double importance_loglik(std::span<const ImportanceSample> samples, int num_samples,
                         int pool_size, const ConcentrationVector& alpha);

double finexp_loglik_is(const ObservationRecord& rec, const PriorParams& params, int pool_size,
                        int num_samples, Rng& rng);

inline constexpr std::uint64_t kDefaultEnumerationLimit = 1'000'000;

// Exact finite-expert likelihood by summing over every completion of the pool.
// Throws SupportTooLarge when C(N - n + K - 1, K - 1) exceeds `limit`.
double finexp_loglik_exact(const ObservationRecord& rec, const PriorParams& params, int pool_size,
                           std::uint64_t limit = kDefaultEnumerationLimit);

// Unconstrained coordinates (log theta, log phi, log tau_1..K).
std::vector<double> to_log_coordinates(const PriorParams& params);
PriorParams from_log_coordinates(std::span<const double> u);

struct LossAndGradient {
  double loss = 0.0;
  std::vector<double> gradient;  // d loss / d (log theta, log phi, log tau)
};

// Negative log posterior over a window. In the FinExp regime each record's
// likelihood is an importance-sampling estimate; resample() draws a fresh set
// of completions and loss/evaluate then use that fixed set.
class MapObjective {
 public:
  MapObjective(const WindowDataset& data, HyperPriorConfig hyper, int num_samples);

  void resample(Rng& rng);
  double loss(const PriorParams& params) const;
  LossAndGradient evaluate(const PriorParams& params) const;

  const HyperPriorConfig& hyper() const noexcept { return hyper_; }
  std::size_t num_classes() const noexcept { return num_classes_; }

 private:
  struct Term {
    std::vector<double> log_f;
    CountVector votes;
    std::vector<ImportanceSample> samples;
  };
  double accumulate(const PriorParams& params, std::vector<double>* gradient) const;

  HyperPriorConfig hyper_;
  int num_samples_;
  int pool_size_;
  std::size_t num_classes_;
  std::vector<Term> terms_;
  bool sampled_ = false;
};

// -[sum_i log p(votes_i | f_i, Theta) + log p(Theta)]. Throws EmptyDataError on an empty window.
double map_loss(const PriorParams& params, const WindowDataset& data, const HyperPriorConfig& hyper,
                int num_samples, Rng& rng);

// Gradient of map_loss in (log theta, log phi, log tau). For FinExp the same rng
// state yields the same importance samples as map_loss.
std::vector<double> map_gradient(const PriorParams& params, const WindowDataset& data,
                                 const HyperPriorConfig& hyper, int num_samples, Rng& rng);

}  // namespace consensus
