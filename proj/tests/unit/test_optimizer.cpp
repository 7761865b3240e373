#include <cmath>
#include <vector>

#include "consensus/distributions.hpp"
#include "consensus/errors.hpp"
#include "consensus/likelihood.hpp"
#include "consensus/optimizer.hpp"
#include "doctest.h"

using namespace consensus;

namespace {

// Records drawn from the model itself: pi ~ Dirichlet(alpha_from(f, truth)),
// votes ~ Multinomial(n, pi).
WindowDataset generated_window(const PriorParams& truth, int pool, int queried, std::size_t size,
                               std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t k = truth.num_classes();
  WindowDataset w(pool, 0);
  for (std::size_t i = 0; i < size; ++i) {
    std::vector<double> raw(k);
    for (auto& v : raw) v = 0.05 + rng.uniform();
    const auto f = Simplex::normalized(raw);
    const auto pi = dirichlet_sample(alpha_from(f, truth), rng);
    w.push(ObservationRecord(f, multinomial_sample(queried, pi, rng)));
  }
  return w;
}

}  // namespace

TEST_SUITE("optimizer") {
  TEST_CASE("config validation") {
    OptimizerConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.learning_rate = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = {};
    cfg.patience = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
  }

  TEST_CASE("adam first step moves by the learning rate against the gradient") {
    Adam adam(2, 0.1);
    const auto d = adam.step({3.0, -0.5});
    CHECK(d[0] == doctest::Approx(-0.1).epsilon(1e-6));
    CHECK(d[1] == doctest::Approx(0.1).epsilon(1e-6));
  }

  TEST_CASE("theta is recovered from generated data") {
    const PriorParams truth{5.0, 0.1, {1.0, 1.0, 1.0}};
    const auto window = generated_window(truth, 10, 10, 500, 41);
    Rng rng(42);
    const auto hyper = HyperPriorConfig::defaults_for(Regime::InfExp);
    const auto fit = fit_map(window, hyper, {}, prior_mode(hyper, 3), rng);
    INFO("theta* = " << fit.params.theta << " phi* = " << fit.params.phi);
    CHECK(std::abs(fit.params.theta / truth.theta - 1.0) < 0.3);
    CHECK(fit.final_loss <= fit.initial_loss);
  }

  TEST_CASE("final loss never exceeds the initial loss") {
    for (const auto regime : {Regime::InfExp, Regime::FinExp}) {
      const auto hyper = HyperPriorConfig::defaults_for(regime);
      for (std::uint64_t seed = 0; seed < 6; ++seed) {
        const auto window = generated_window({2.0, 0.5, {1.5, 0.7, 1.0}}, 6, 1 + static_cast<int>(seed % 4), 40, seed);
        OptimizerConfig cfg;
        cfg.max_iters = 200;
        cfg.resample_each_iteration = seed % 2 == 1;
        Rng rng(seed + 100);
        const auto fit = fit_map(window, hyper, cfg, prior_mode(hyper, 3), rng);
        CHECK(fit.final_loss <= fit.initial_loss);
        CHECK(std::isfinite(fit.final_loss));
      }
    }
  }

  TEST_CASE("a start at the optimum stays put") {
    const auto hyper = HyperPriorConfig::defaults_for(Regime::InfExp);
    const auto window = generated_window({3.0, 0.3, {1.2, 0.8, 1.0}}, 8, 8, 200, 43);
    OptimizerConfig tight;
    tight.max_iters = 5000;
    tight.tol = 1e-6;
    Rng r1(44);
    const auto optimum = fit_map(window, hyper, tight, prior_mode(hyper, 3), r1).params;
    Rng r2(45);
    const auto again = optimize_map(window, hyper, {}, optimum, r2);
    const auto a = to_log_coordinates(optimum);
    const auto b = to_log_coordinates(again);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) <= 0.01);
  }

  TEST_CASE("optimizer output is deterministic") {
    const auto hyper = HyperPriorConfig::defaults_for(Regime::FinExp);
    const auto window = generated_window({2.0, 0.5, {1.0, 1.0, 1.0}}, 6, 2, 30, 46);
    OptimizerConfig cfg;
    cfg.max_iters = 100;
    Rng a(7);
    Rng b(7);
    CHECK(optimize_map(window, hyper, cfg, prior_mode(hyper, 3), a) ==
          optimize_map(window, hyper, cfg, prior_mode(hyper, 3), b));
  }

  TEST_CASE("finexp fits on a fixed sample set converge") {
    const auto hyper = HyperPriorConfig::defaults_for(Regime::FinExp);
    const auto window = generated_window({3.0, 0.3, {1.2, 0.8, 1.0}}, 7, 3, 300, 47);
    Rng rng(48);
    const auto fit = fit_map(window, hyper, {}, prior_mode(hyper, 3), rng);
    CHECK(fit.converged);
    CHECK(fit.iterations < OptimizerConfig{}.max_iters);
  }

  TEST_CASE("per-iteration resampling is deterministic") {
    const auto hyper = HyperPriorConfig::defaults_for(Regime::FinExp);
    const auto window = generated_window({2.0, 0.5, {1.0, 1.0, 1.0}}, 6, 2, 30, 49);
    OptimizerConfig cfg;
    cfg.max_iters = 50;
    cfg.resample_each_iteration = true;
    Rng a(8);
    Rng b(8);
    CHECK(optimize_map(window, hyper, cfg, prior_mode(hyper, 3), a) ==
          optimize_map(window, hyper, cfg, prior_mode(hyper, 3), b));
  }

  TEST_CASE("empty windows are refused") {
    Rng rng(1);
    const auto hyper = HyperPriorConfig::defaults_for(Regime::InfExp);
    CHECK_THROWS_AS(optimize_map(WindowDataset(3), hyper, {}, PriorParams::ones(3), rng), EmptyDataError);
  }
}
