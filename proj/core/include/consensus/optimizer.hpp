#pragma once

#include <cstdint>
#include <vector>

#include "consensus/likelihood.hpp"
#include "consensus/prior.hpp"
#include "consensus/rng.hpp"

namespace consensus {

struct OptimizerConfig {
  double learning_rate = 0.1;
  int max_iters = 1000;
  // Stop once the largest per-parameter change stays below tol for `patience`
  // consecutive iterations.
  double tol = 0.01;
  int patience = 10;
  // Monte-Carlo completions per record (FinExp only).
  int mc_samples = 64;
  // FinExp: draw a fresh completion set every iteration instead of once per fit.
  // A per-iteration set keeps the objective noisy, so the tol/patience test
  // rarely fires and fits run to max_iters.
  bool resample_each_iteration = false;
  // Refit cadence, in committed samples.
  int refit_interval = 20;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  void validate() const;
};

// Adaptive-moment first-order update on a flat parameter vector.
class Adam {
 public:
  Adam(std::size_t dim, double learning_rate, double beta1 = 0.9, double beta2 = 0.999,
       double epsilon = 1e-8);

  // Returns the displacement to add to the parameters for this gradient.
  std::vector<double> step(const std::vector<double>& gradient);

  double learning_rate() const noexcept { return lr_; }
  void set_learning_rate(double lr) noexcept { lr_ = lr; }
  long steps() const noexcept { return t_; }

 private:
  double lr_, beta1_, beta2_, eps_;
  long t_ = 0;
  std::vector<double> m_, v_;
};

struct MapFit {
  PriorParams params;
  int iterations = 0;
  int retries = 0;
  bool converged = false;
  double initial_loss = 0.0;
  double final_loss = 0.0;
};

// Minimizes map_loss over (log theta, log phi, log tau) starting from `init`.
// FinExp importance samples are drawn from seeds derived from `rng` (once per
// fit, or per iteration when resample_each_iteration is set), so the result is
// a pure function of (data, hyper, cfg, init, rng state). Non-finite losses
// halve the step, up to five times, after which the best parameters seen so
// far are returned. The returned parameters never score worse than `init` on a
// common sample set.
MapFit fit_map(const WindowDataset& data, const HyperPriorConfig& hyper, const OptimizerConfig& cfg,
               const PriorParams& init, Rng& rng);

PriorParams optimize_map(const WindowDataset& data, const HyperPriorConfig& hyper,
                         const OptimizerConfig& cfg, const PriorParams& init, Rng& rng);

}  // namespace consensus
