#include "consensus/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "consensus/errors.hpp"

namespace consensus {

void OptimizerConfig::validate() const {
  if (!(learning_rate > 0.0) || max_iters < 1 || !(tol > 0.0) || patience < 1 || mc_samples < 1 ||
      refit_interval < 1) {
    throw ConfigError("optimizer settings must all be positive");
  }
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0) || !(epsilon > 0.0)) {
    throw ConfigError("Adam moment decay rates must lie in [0, 1)");
  }
}

Adam::Adam(std::size_t dim, double learning_rate, double beta1, double beta2, double epsilon)
    : lr_(learning_rate), beta1_(beta1), beta2_(beta2), eps_(epsilon), m_(dim, 0.0), v_(dim, 0.0) {}

std::vector<double> Adam::step(const std::vector<double>& gradient) {
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  std::vector<double> delta(m_.size());
  for (std::size_t i = 0; i < m_.size(); ++i) {
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * gradient[i];
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * gradient[i] * gradient[i];
    delta[i] = -lr_ * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + eps_);
  }
  return delta;
}

namespace {

constexpr int kMaxRetries = 5;
constexpr std::uint64_t kFinalCheckStream = 0xF17A1;
constexpr std::uint64_t kFixedSetStream = 0xF1CED;

bool all_finite(const LossAndGradient& e) {
  if (!std::isfinite(e.loss)) return false;
  return std::all_of(e.gradient.begin(), e.gradient.end(), [](double g) { return std::isfinite(g); });
}

double max_abs_change(const PriorParams& a, const PriorParams& b) {
  double out = std::max(std::abs(a.theta - b.theta), std::abs(a.phi - b.phi));
  for (std::size_t k = 0; k < a.tau.size(); ++k) out = std::max(out, std::abs(a.tau[k] - b.tau[k]));
  return out;
}

bool params_finite(const PriorParams& p) {
  auto ok = [](double v) { return std::isfinite(v) && v > 0.0; };
  return ok(p.theta) && ok(p.phi) && std::all_of(p.tau.begin(), p.tau.end(), ok);
}

}  // namespace

MapFit fit_map(const WindowDataset& data, const HyperPriorConfig& hyper, const OptimizerConfig& cfg,
               const PriorParams& init, Rng& rng) {
  cfg.validate();
  init.validate();
  MapObjective objective(data, hyper, cfg.mc_samples);
  const Rng base = rng.split({rng.next()});
  const bool stochastic = hyper.regime == Regime::FinExp && cfg.resample_each_iteration;
  if (!stochastic) {
    Rng fit_rng = base.split({kFixedSetStream});
    objective.resample(fit_rng);
  }

  MapFit fit;
  std::vector<double> u = to_log_coordinates(init);
  std::vector<double> prev_u = u;
  PriorParams current = init;
  PriorParams best = init;
  double best_loss = std::numeric_limits<double>::infinity();
  Adam adam(u.size(), cfg.learning_rate, cfg.beta1, cfg.beta2, cfg.epsilon);
  int calm = 0;

  for (int it = 0; it < cfg.max_iters; ++it) {
    if (stochastic) {
      Rng iter_rng = base.split({static_cast<std::uint64_t>(it)});
      objective.resample(iter_rng);
    }
    LossAndGradient eval = objective.evaluate(current);
    while (!all_finite(eval)) {
      if (it == 0 || fit.retries >= kMaxRetries) {
        eval.loss = std::numeric_limits<double>::quiet_NaN();
        break;
      }
      ++fit.retries;
      for (std::size_t i = 0; i < u.size(); ++i) u[i] = prev_u[i] + 0.5 * (u[i] - prev_u[i]);
      current = from_log_coordinates(u);
      eval = objective.evaluate(current);
    }
    if (!all_finite(eval)) break;
    if (it == 0) fit.initial_loss = eval.loss;
    if (eval.loss < best_loss) {
      best_loss = eval.loss;
      best = current;
    }
    fit.iterations = it + 1;

    prev_u = u;
    const auto delta = adam.step(eval.gradient);
    for (std::size_t i = 0; i < u.size(); ++i) u[i] += delta[i];
    PriorParams next = from_log_coordinates(u);
    calm = max_abs_change(next, current) < cfg.tol ? calm + 1 : 0;
    current = std::move(next);
    if (calm >= cfg.patience) {
      fit.converged = true;
      break;
    }
  }

  // With a fixed objective the best iterate is well defined. Per-iteration
  // sample sets make losses incomparable; keep the last iterate instead.
  PriorParams candidate = stochastic ? current : best;
  if (!params_finite(candidate)) candidate = best;
  if (stochastic) {
    Rng check_rng = base.split({kFinalCheckStream});
    objective.resample(check_rng);
  }
  const double init_loss = objective.loss(init);
  double cand_loss = objective.loss(candidate);
  if (!std::isfinite(cand_loss) || cand_loss > init_loss) {
    candidate = init;
    cand_loss = init_loss;
  }
  fit.params = std::move(candidate);
  fit.final_loss = cand_loss;
  return fit;
}

PriorParams optimize_map(const WindowDataset& data, const HyperPriorConfig& hyper,
                         const OptimizerConfig& cfg, const PriorParams& init, Rng& rng) {
  return fit_map(data, hyper, cfg, init, rng).params;
}

}  // namespace consensus
