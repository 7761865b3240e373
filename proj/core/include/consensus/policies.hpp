#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "consensus/inference.hpp"
#include "consensus/prior.hpp"
#include "consensus/rng.hpp"
#include "consensus/types.hpp"

namespace consensus {

// FixedFin / FixedInf pin theta = phi = tau = 1 and never learn.
enum class ThresholdRegime { FinExp, InfExp, FixedFin, FixedInf };

std::string_view to_string(ThresholdRegime r) noexcept;
ThresholdRegime threshold_regime_from_string(std::string_view s);
bool is_learning(ThresholdRegime r) noexcept;
bool uses_finite_pool(ThresholdRegime r) noexcept;
Regime likelihood_regime(ThresholdRegime r) noexcept;

// Query until the posterior accuracy of the leading class exceeds rho.
struct ThresholdPolicy {
  double rho = 0.9;
  ThresholdRegime regime = ThresholdRegime::InfExp;
};

// Query Q ~ Binomial(N, beta) experts.
struct RandomPolicy {
  double beta = 0.5;
};

// beta_t = clamp(v * H(f_t), 0, 1), H the class-averaged entropy of f.
struct EntropyPolicy {
  double v = 1.0;
};

// Single-model adaptation of Model Picker: beta_t from the Bernoulli variance
// of the exponentially weighted agreement p* = sum_k f_k softmax(-eta l)_k.
struct ModelPickerPolicy {
  double scale = 1.0;
  double eta = 0.3;
};

using PolicyKind = std::variant<ThresholdPolicy, RandomPolicy, EntropyPolicy, ModelPickerPolicy>;

std::string policy_name(const PolicyKind& kind);
// The policy's swept hyperparameter (rho, beta, v or scale).
double policy_parameter(const PolicyKind& kind);
void validate(const PolicyKind& kind);

// Mutable per-stream state: learned prior for threshold policies, per-class
// loss estimates for Model Picker.
struct PolicyState {
  PolicyKind kind;
  int pool_size = 1;
  PriorParams params;
  std::vector<double> class_loss;

  static PolicyState create(PolicyKind kind, int pool_size, std::size_t num_classes,
                            const std::optional<HyperPriorConfig>& hyper = std::nullopt);
};

struct Query {};
struct Commit {
  std::size_t cls = 0;
  double acc = 0.0;
};
using Decision = std::variant<Query, Commit>;

// True when the current leader cannot be overtaken by `remaining` more votes.
bool plurality_guaranteed(const CountVector& votes, int remaining);

// Consensus posterior under the policy's regime with alpha = alpha_from(f, params).
ConsensusPosterior threshold_posterior(const CountVector& votes, const Simplex& f,
                                       const PolicyState& state, int num_samples, Rng& rng);

// Commit when acc > rho, when the pool is exhausted, or when the leading
// class's plurality is already guaranteed; otherwise Query. Once the consensus
// is determined by the observed votes the committed class is that consensus
// (ties split evenly) whatever the regime. `tie_rng` breaks ties in the final
// argmax; the single-generator overload uses `rng` for both.
Decision threshold_decide(const CountVector& votes, const Simplex& f, const PolicyState& state,
                          Rng& rng, Rng& tie_rng, int num_samples = kDefaultInferenceSamples);
Decision threshold_decide(const CountVector& votes, const Simplex& f, const PolicyState& state,
                          Rng& rng, int num_samples = kDefaultInferenceSamples);

int random_draw_count(double beta, int pool_size, Rng& rng);

// -(1/K) sum_k f_k ln f_k
double class_averaged_entropy(const Simplex& f);
double entropy_beta(const Simplex& f, double v);

double model_picker_beta(const Simplex& f, const PolicyState& state);
// Adds one unit of loss to every class other than the plurality of the
// observed votes (ties at random). No-op when no votes were observed.
void model_picker_update(PolicyState& state, const CountVector& observed_votes, Rng& rng);

// Query budget for the binomial-count baselines at the start of a sample.
double baseline_beta(const Simplex& f, const PolicyState& state);

}  // namespace consensus
