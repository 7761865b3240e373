#include "consensus/policies.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "consensus/errors.hpp"

namespace consensus {

std::string_view to_string(ThresholdRegime r) noexcept {
  switch (r) {
    case ThresholdRegime::FinExp: return "finexp";
    case ThresholdRegime::InfExp: return "infexp";
    case ThresholdRegime::FixedFin: return "fixed-finexp";
    case ThresholdRegime::FixedInf: return "fixed-infexp";
  }
  return "unknown";
}

ThresholdRegime threshold_regime_from_string(std::string_view s) {
  if (s == "finexp") return ThresholdRegime::FinExp;
  if (s == "infexp") return ThresholdRegime::InfExp;
  if (s == "fixed-finexp") return ThresholdRegime::FixedFin;
  if (s == "fixed-infexp") return ThresholdRegime::FixedInf;
  throw ConfigError("unknown threshold regime '" + std::string(s) + "'");
}

bool is_learning(ThresholdRegime r) noexcept {
  return r == ThresholdRegime::FinExp || r == ThresholdRegime::InfExp;
}

bool uses_finite_pool(ThresholdRegime r) noexcept {
  return r == ThresholdRegime::FinExp || r == ThresholdRegime::FixedFin;
}

Regime likelihood_regime(ThresholdRegime r) noexcept {
  return uses_finite_pool(r) ? Regime::FinExp : Regime::InfExp;
}

std::string policy_name(const PolicyKind& kind) {
  struct Namer {
    std::string operator()(const ThresholdPolicy& p) const { return std::string(to_string(p.regime)); }
    std::string operator()(const RandomPolicy&) const { return "random"; }
    std::string operator()(const EntropyPolicy&) const { return "entropy"; }
    std::string operator()(const ModelPickerPolicy&) const { return "model-picker"; }
  };
  return std::visit(Namer{}, kind);
}

double policy_parameter(const PolicyKind& kind) {
  struct Param {
    double operator()(const ThresholdPolicy& p) const { return p.rho; }
    double operator()(const RandomPolicy& p) const { return p.beta; }
    double operator()(const EntropyPolicy& p) const { return p.v; }
    double operator()(const ModelPickerPolicy& p) const { return p.scale; }
  };
  return std::visit(Param{}, kind);
}

void validate(const PolicyKind& kind) {
  struct Check {
    void operator()(const ThresholdPolicy& p) const {
      if (!(p.rho >= 0.0 && p.rho <= 1.0)) throw ConfigError("rho must lie in [0, 1]");
    }
    void operator()(const RandomPolicy& p) const {
      if (!(p.beta >= 0.0 && p.beta <= 1.0)) throw ConfigError("beta must lie in [0, 1]");
    }
    void operator()(const EntropyPolicy& p) const {
      if (!(p.v >= 0.0) || !std::isfinite(p.v)) throw ConfigError("entropy scale v must be >= 0");
    }
    void operator()(const ModelPickerPolicy& p) const {
      if (!(p.scale >= 0.0) || !std::isfinite(p.scale)) throw ConfigError("MP scale must be >= 0");
      if (!(p.eta >= 0.0)) throw ConfigError("MP eta must be >= 0");
    }
  };
  std::visit(Check{}, kind);
}

PolicyState PolicyState::create(PolicyKind kind, int pool_size, std::size_t num_classes,
                                const std::optional<HyperPriorConfig>& hyper) {
  validate(kind);
  if (pool_size < 1) throw ConfigError("expert pool size must be >= 1");
  PolicyState state{std::move(kind), pool_size, PriorParams::ones(num_classes),
                    std::vector<double>(num_classes, 0.0)};
  if (const auto* t = std::get_if<ThresholdPolicy>(&state.kind); t != nullptr && is_learning(t->regime)) {
    const auto h = hyper.value_or(HyperPriorConfig::defaults_for(likelihood_regime(t->regime)));
    state.params = prior_mode(h, num_classes);
  }
  return state;
}

bool plurality_guaranteed(const CountVector& votes, int remaining) {
  int first = -1;
  int second = -1;
  for (const int c : votes.values()) {
    if (c > first) {
      second = first;
      first = c;
    } else if (c > second) {
      second = c;
    }
  }
  return first - second > remaining;
}

ConsensusPosterior threshold_posterior(const CountVector& votes, const Simplex& f,
                                       const PolicyState& state, int num_samples, Rng& rng) {
  const auto& policy = std::get<ThresholdPolicy>(state.kind);
  const ConcentrationVector alpha = alpha_from(f, state.params);
  if (uses_finite_pool(policy.regime)) {
    return consensus_posterior_finexp(votes, alpha, state.pool_size, num_samples, rng);
  }
  return consensus_posterior_infexp(votes, alpha, num_samples, rng);
}

Decision threshold_decide(const CountVector& votes, const Simplex& f, const PolicyState& state,
                          Rng& rng, Rng& tie_rng, int num_samples) {
  const auto& policy = std::get<ThresholdPolicy>(state.kind);
  const int remaining = state.pool_size - votes.total();
  if (remaining < 0) throw ArgumentError("more votes than experts in the pool");
  if (remaining == 0 || plurality_guaranteed(votes, remaining)) {
    const auto settled = observed_plurality(votes);
    return Commit{predict(settled, tie_rng), settled.acc};
  }
  const ConsensusPosterior posterior = threshold_posterior(votes, f, state, num_samples, rng);
  if (posterior.acc > policy.rho) return Commit{predict(posterior, tie_rng), posterior.acc};
  return Query{};
}

Decision threshold_decide(const CountVector& votes, const Simplex& f, const PolicyState& state,
                          Rng& rng, int num_samples) {
  return threshold_decide(votes, f, state, rng, rng, num_samples);
}

int random_draw_count(double beta, int pool_size, Rng& rng) {
  if (!(beta >= 0.0 && beta <= 1.0)) throw ArgumentError("beta must lie in [0, 1]");
  int q = 0;
  for (int i = 0; i < pool_size; ++i) q += rng.bernoulli(beta) ? 1 : 0;
  return q;
}

double class_averaged_entropy(const Simplex& f) {
  double h = 0.0;
  for (const double p : f.values()) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return h / static_cast<double>(f.size());
}

double entropy_beta(const Simplex& f, double v) {
  if (!(v >= 0.0)) throw ArgumentError("entropy scale must be >= 0");
  return std::clamp(v * class_averaged_entropy(f), 0.0, 1.0);
}

double model_picker_beta(const Simplex& f, const PolicyState& state) {
  const auto& mp = std::get<ModelPickerPolicy>(state.kind);
  const auto& loss = state.class_loss;
  double low = loss[0];
  for (const double l : loss) low = std::min(low, l);
  std::vector<double> q(loss.size());
  double z = 0.0;
  for (std::size_t k = 0; k < loss.size(); ++k) {
    q[k] = std::exp(-mp.eta * (loss[k] - low));
    z += q[k];
  }
  double p_star = 0.0;
  for (std::size_t k = 0; k < loss.size(); ++k) p_star += f[k] * q[k] / z;
  p_star = std::clamp(p_star, 0.0, 1.0);
  return std::clamp(mp.scale * 4.0 * p_star * (1.0 - p_star), 0.0, 1.0);
}

void model_picker_update(PolicyState& state, const CountVector& observed_votes, Rng& rng) {
  if (observed_votes.total() == 0) return;
  const std::size_t winner = argmax_random_tie<int>(observed_votes.values(), rng);
  for (std::size_t k = 0; k < state.class_loss.size(); ++k) {
    if (k != winner) state.class_loss[k] += 1.0;
  }
}

double baseline_beta(const Simplex& f, const PolicyState& state) {
  struct Beta {
    const Simplex& f;
    const PolicyState& state;
    double operator()(const ThresholdPolicy&) const {
      throw StateError("threshold policies do not draw a binomial budget");
    }
    double operator()(const RandomPolicy& p) const { return p.beta; }
    double operator()(const EntropyPolicy& p) const { return entropy_beta(f, p.v); }
    double operator()(const ModelPickerPolicy&) const { return model_picker_beta(f, state); }
  };
  return std::visit(Beta{f, state}, state.kind);
}

}  // namespace consensus
