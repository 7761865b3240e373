#include <cmath>
#include <vector>

#include "consensus/errors.hpp"
#include "consensus/policies.hpp"
#include "doctest.h"

using namespace consensus;

namespace {

PolicyState threshold_state(double rho, ThresholdRegime regime, int pool, std::size_t k) {
  return PolicyState::create(ThresholdPolicy{rho, regime}, pool, k);
}

}  // namespace

TEST_SUITE("policies") {
  TEST_CASE("names, parameters and validation") {
    CHECK(policy_name(ThresholdPolicy{0.5, ThresholdRegime::FinExp}) == "finexp");
    CHECK(policy_name(ThresholdPolicy{0.5, ThresholdRegime::FixedInf}) == "fixed-infexp");
    CHECK(policy_name(RandomPolicy{0.2}) == "random");
    CHECK(policy_name(ModelPickerPolicy{3.0}) == "model-picker");
    CHECK(policy_parameter(EntropyPolicy{7.0}) == 7.0);
    CHECK_THROWS_AS(validate(ThresholdPolicy{1.5, ThresholdRegime::InfExp}), ConfigError);
    CHECK_THROWS_AS(validate(RandomPolicy{-0.1}), ConfigError);
    CHECK_THROWS_AS(validate(EntropyPolicy{-1.0}), ConfigError);
    CHECK(threshold_regime_from_string("fixed-finexp") == ThresholdRegime::FixedFin);
    CHECK_THROWS_AS(threshold_regime_from_string("nope"), ConfigError);
  }

  TEST_CASE("learning regimes start at the prior mode, fixed regimes at ones") {
    const auto inf = threshold_state(0.9, ThresholdRegime::InfExp, 5, 3);
    CHECK(inf.params == PriorParams::ones(3));
    const auto fin = threshold_state(0.9, ThresholdRegime::FinExp, 5, 3);
    CHECK(fin.params.theta == doctest::Approx(0.1));
    const auto fixed = threshold_state(0.9, ThresholdRegime::FixedFin, 5, 3);
    CHECK(fixed.params == PriorParams::ones(3));
    CHECK(is_learning(ThresholdRegime::FinExp));
    CHECK_FALSE(is_learning(ThresholdRegime::FixedInf));
    CHECK(uses_finite_pool(ThresholdRegime::FixedFin));
    CHECK(likelihood_regime(ThresholdRegime::FixedInf) == Regime::InfExp);
  }

  TEST_CASE("rho zero commits without queries") {
    Rng rng(60);
    for (const auto regime : {ThresholdRegime::FinExp, ThresholdRegime::InfExp, ThresholdRegime::FixedFin,
                              ThresholdRegime::FixedInf}) {
      const auto state = threshold_state(0.0, regime, 6, 3);
      const auto d = threshold_decide(CountVector(3), Simplex{0.2, 0.5, 0.3}, state, rng, 256);
      CHECK(std::holds_alternative<Commit>(d));
    }
  }

  TEST_CASE("rho one keeps querying until the consensus is settled") {
    Rng rng(61);
    const auto state = threshold_state(1.0, ThresholdRegime::InfExp, 5, 2);
    const Simplex f{0.7, 0.3};
    CHECK(std::holds_alternative<Query>(threshold_decide({2, 1}, f, state, rng, 512)));
    CHECK(std::holds_alternative<Query>(threshold_decide({2, 0}, f, state, rng, 512)));
    const auto settled = threshold_decide({3, 0}, f, state, rng, 512);
    REQUIRE(std::holds_alternative<Commit>(settled));
    CHECK(std::get<Commit>(settled).cls == 0);
    CHECK(std::get<Commit>(settled).acc == 1.0);
    const auto exhausted = threshold_decide({2, 3}, f, state, rng, 512);
    REQUIRE(std::holds_alternative<Commit>(exhausted));
    CHECK(std::get<Commit>(exhausted).cls == 1);
  }

  TEST_CASE("threshold against the five-sixths posterior") {
    Rng rng(62);
    auto state = threshold_state(0.8, ThresholdRegime::FinExp, 3, 2);
    state.params = {1.0, 0.5, {1.0, 1.0}};  // alpha = [1, 1] for uniform f
    const Simplex f = Simplex::uniform(2);
    const auto commit = threshold_decide({1, 0}, f, state, rng, 20000);
    REQUIRE(std::holds_alternative<Commit>(commit));
    CHECK(std::get<Commit>(commit).cls == 0);
    CHECK(std::abs(std::get<Commit>(commit).acc - 5.0 / 6.0) < 0.02);
    state.kind = ThresholdPolicy{0.9, ThresholdRegime::FinExp};
    CHECK(std::holds_alternative<Query>(threshold_decide({1, 0}, f, state, rng, 20000)));
  }

  TEST_CASE("guaranteed plurality") {
    CHECK(plurality_guaranteed({3, 0}, 2));
    CHECK_FALSE(plurality_guaranteed({2, 0}, 2));
    CHECK(plurality_guaranteed({1, 1, 0}, 0) == false);
    CHECK(plurality_guaranteed({2, 1, 0}, 0));
  }

  TEST_CASE("binomial draw counts") {
    Rng rng(63);
    for (int i = 0; i < 100; ++i) {
      CHECK(random_draw_count(0.0, 6, rng) == 0);
      CHECK(random_draw_count(1.0, 6, rng) == 6);
    }
    double s = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) s += random_draw_count(0.5, 6, rng);
    CHECK(std::abs(s / n - 3.0) < 0.02);
  }

  TEST_CASE("entropy baseline") {
    CHECK(entropy_beta(Simplex::one_hot(4, 2), 5.0) == 0.0);
    CHECK(entropy_beta(Simplex::uniform(10), 1.0) == doctest::Approx(std::log(10.0) / 10.0).epsilon(1e-12));
    CHECK(entropy_beta(Simplex::uniform(10), 100.0) == 1.0);
    CHECK(class_averaged_entropy(Simplex{0.5, 0.5}) == doctest::Approx(0.5 * std::log(2.0)));
  }

  TEST_CASE("model picker beta and updates") {
    const double scale = 0.8;
    auto state = PolicyState::create(ModelPickerPolicy{scale, 0.3}, 5, 4);
    const double expected = std::clamp(scale * 4.0 * 0.25 * 0.75, 0.0, 1.0);
    CHECK(model_picker_beta(Simplex::one_hot(4, 0), state) == doctest::Approx(expected));

    auto two = PolicyState::create(ModelPickerPolicy{1.0, 0.3}, 5, 2);
    CHECK(model_picker_beta(Simplex::one_hot(2, 0), two) == doctest::Approx(1.0));

    auto lopsided = PolicyState::create(ModelPickerPolicy{1.0, 0.3}, 5, 3);
    lopsided.class_loss = {0.0, 200.0, 200.0};
    CHECK(model_picker_beta(Simplex::one_hot(3, 0), lopsided) < 1e-20);

    Rng rng(64);
    model_picker_update(state, {0, 3, 1, 0}, rng);
    CHECK(state.class_loss == std::vector<double>{1.0, 0.0, 1.0, 1.0});
    model_picker_update(state, CountVector(4), rng);
    CHECK(state.class_loss == std::vector<double>{1.0, 0.0, 1.0, 1.0});
  }

  TEST_CASE("baseline betas always lie in the unit interval") {
    Rng rng(65);
    const std::vector<PolicyKind> kinds{RandomPolicy{0.3}, EntropyPolicy{1000.0}, EntropyPolicy{0.0},
                                        ModelPickerPolicy{1000.0}, ModelPickerPolicy{0.01}};
    for (const auto& kind : kinds) {
      auto state = PolicyState::create(kind, 6, 3);
      for (int i = 0; i < 200; ++i) {
        std::vector<double> w(3);
        for (auto& v : w) v = rng.uniform();
        const double b = baseline_beta(Simplex::normalized(w), state);
        CHECK(b >= 0.0);
        CHECK(b <= 1.0);
      }
    }
  }
}
