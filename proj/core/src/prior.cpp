#include "consensus/prior.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "consensus/distributions.hpp"
#include "consensus/errors.hpp"

namespace consensus {

std::string_view to_string(Regime r) noexcept { return r == Regime::FinExp ? "finexp" : "infexp"; }

Regime regime_from_string(std::string_view s) {
  if (s == "finexp") return Regime::FinExp;
  if (s == "infexp") return Regime::InfExp;
  throw ConfigError("unknown regime '" + std::string(s) + "' (expected finexp or infexp)");
}

void PriorParams::validate() const {
  auto ok = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (tau.size() < 2) throw ArgumentError("PriorParams needs K >= 2 calibration entries");
  if (!ok(theta)) throw ArgumentError("theta must be finite and > 0");
  if (!ok(phi)) throw ArgumentError("phi must be finite and > 0");
  for (const double t : tau) {
    if (!ok(t)) throw ArgumentError("tau entries must be finite and > 0");
  }
}

HyperPriorConfig HyperPriorConfig::defaults_for(Regime regime) {
  const GammaPrior g = regime == Regime::FinExp ? GammaPrior{1.1, 1.0} : GammaPrior{3.0, 2.0};
  return {g, g, g, regime};
}

void HyperPriorConfig::validate() const {
  for (const auto& g : {theta, phi, tau}) {
    if (!(g.shape > 0.0) || !(g.rate > 0.0)) {
      throw ArgumentError("hyperprior shape and rate must be > 0");
    }
  }
}

std::vector<double> clamped_log_probs(const Simplex& f) {
  std::vector<double> out(f.size());
  double sum = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) {
    out[k] = std::clamp(f[k], kProbabilityFloor, 1.0);
    sum += out[k];
  }
  const double log_sum = std::log(sum);
  for (double& v : out) v = std::log(v) - log_sum;
  return out;
}

AlphaTransform alpha_transform(std::span<const double> log_f, const PriorParams& params) {
  const std::size_t k = log_f.size();
  if (params.tau.size() != k) throw ArgumentError("alpha transform: tau has wrong dimension");
  AlphaTransform out;
  out.log_f.assign(log_f.begin(), log_f.end());
  out.softmax.resize(k);
  out.alpha.resize(k);
  double peak = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < k; ++j) {
    out.softmax[j] = params.tau[j] * log_f[j];
    peak = std::max(peak, out.softmax[j]);
  }
  double z = 0.0;
  for (double& s : out.softmax) {
    s = std::exp(s - peak);
    z += s;
  }
  for (std::size_t j = 0; j < k; ++j) {
    out.softmax[j] /= z;
    out.alpha[j] = params.theta * out.softmax[j] + params.phi;
  }
  return out;
}

ConcentrationVector alpha_from(const Simplex& f, const PriorParams& params) {
  const auto log_f = clamped_log_probs(f);
  return ConcentrationVector(alpha_transform(log_f, params).alpha);
}

double log_prior(const PriorParams& params, const HyperPriorConfig& hyper) {
  double out = gamma_logpdf(params.theta, hyper.theta.shape, hyper.theta.rate) +
               gamma_logpdf(params.phi, hyper.phi.shape, hyper.phi.rate);
  for (const double t : params.tau) out += gamma_logpdf(t, hyper.tau.shape, hyper.tau.rate);
  return out;
}

namespace {
double gamma_mode_or_floor(const GammaPrior& g) {
  return g.shape > 1.0 ? (g.shape - 1.0) / g.rate : kBoundaryModeFloor;
}
}  // namespace

PriorParams prior_mode(const HyperPriorConfig& hyper, std::size_t num_classes) {
  return {gamma_mode_or_floor(hyper.theta), gamma_mode_or_floor(hyper.phi),
          std::vector<double>(num_classes, gamma_mode_or_floor(hyper.tau))};
}

}  // namespace consensus
