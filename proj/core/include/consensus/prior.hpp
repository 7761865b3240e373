#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "consensus/types.hpp"

namespace consensus {

// Finite-expert (exact hypergeometric) vs. infinite-expert (Dirichlet limit) modelling.
enum class Regime { FinExp, InfExp };

std::string_view to_string(Regime r) noexcept;
Regime regime_from_string(std::string_view s);

// Learnable prior parameters. theta: how many expert votes the classifier is
// worth; phi: concentration floor shared by all classes; tau: per-class
// calibration exponent applied to the classifier's log-probabilities.
struct PriorParams {
  double theta = 1.0;
  double phi = 1.0;
  std::vector<double> tau;

  static PriorParams ones(std::size_t k) { return {1.0, 1.0, std::vector<double>(k, 1.0)}; }

  std::size_t num_classes() const noexcept { return tau.size(); }
  // Throws ArgumentError unless theta > 0, phi > 0, every tau_k > 0 and K >= 2.
  void validate() const;

  bool operator==(const PriorParams&) const = default;
};

struct GammaPrior {
  double shape = 1.0;
  double rate = 1.0;
};

struct HyperPriorConfig {
  GammaPrior theta;
  GammaPrior phi;
  GammaPrior tau;
  Regime regime = Regime::InfExp;

  // Gamma(1.1, 1) on every parameter for FinExp, Gamma(3, 2) for InfExp.
  static HyperPriorConfig defaults_for(Regime regime);
  void validate() const;
};

// Classifier probabilities are clamped to [kProbabilityFloor, 1] and
// renormalized before taking logs.
inline constexpr double kProbabilityFloor = 1e-8;
// Initial value for a parameter whose hyperprior mode sits at the boundary (shape <= 1).
inline constexpr double kBoundaryModeFloor = 1e-2;

// Intermediate quantities of the alpha transform, kept for gradient evaluation.
struct AlphaTransform {
  std::vector<double> log_f;    // log of the clamped, renormalized classifier output
  std::vector<double> softmax;  // softmax(tau * log_f)
  std::vector<double> alpha;    // theta * softmax + phi
};

std::vector<double> clamped_log_probs(const Simplex& f);
AlphaTransform alpha_transform(std::span<const double> log_f, const PriorParams& params);

// alpha_k = theta * softmax(tau (.) log f)_k + phi
ConcentrationVector alpha_from(const Simplex& f, const PriorParams& params);

double log_prior(const PriorParams& params, const HyperPriorConfig& hyper);

PriorParams prior_mode(const HyperPriorConfig& hyper, std::size_t num_classes);

}  // namespace consensus
