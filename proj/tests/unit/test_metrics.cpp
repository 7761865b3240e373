#include <cmath>
#include <limits>
#include <vector>

#include "consensus/errors.hpp"
#include "consensus/metrics.hpp"
#include "doctest.h"

using namespace consensus;

namespace {

EpisodeLog synthetic_log(const std::vector<int>& queried, const std::vector<bool>& correct) {
  EpisodeLog log;
  long cost = 0;
  for (std::size_t t = 0; t < queried.size(); ++t) {
    StepRecord s;
    s.t = t;
    s.n_queried = queried[t];
    cost += queried[t];
    s.cost = cost;
    s.truth = 0;
    s.prediction = correct[t] ? 0 : 1;
    s.correct = correct[t];
    log.steps.push_back(s);
  }
  log.num_classes = 2;
  return log;
}

}  // namespace

TEST_SUITE("metrics") {
  TEST_CASE("error and cost summaries") {
    const auto all_right = synthetic_log({1, 0, 2}, {true, true, true});
    CHECK(metrics(all_right).error_rate == 0.0);
    const auto twos = synthetic_log({2, 2, 2, 2}, {true, false, true, true});
    const auto m = metrics(twos);
    CHECK(m.mean_cost == 2.0);
    CHECK(m.error_rate == 0.25);
    REQUIRE(m.bucket);
    CHECK(*m.bucket == 2.0);
    CHECK(bucket_label(m.bucket) == "2");
  }

  TEST_CASE("budget buckets use a ten percent band") {
    CHECK(budget_bucket(1.95) == 2.0);
    CHECK(budget_bucket(0.55) == 0.5);
    CHECK(budget_bucket(0.56) == std::nullopt);
    CHECK(budget_bucket(2.7) == 3.0);
    CHECK(budget_bucket(1.5) == std::nullopt);
    CHECK(bucket_label(std::nullopt).empty());
    CHECK(bucket_label(0.5) == "0.5");
  }

  TEST_CASE("trailing moving average") {
    const std::vector<double> xs{1, 2, 3, 4};
    const auto ma = moving_average(xs, 2);
    CHECK(ma == std::vector<double>{1.0, 1.5, 2.5, 3.5});
    CHECK_THROWS_AS(moving_average(xs, 0), ArgumentError);
  }

  TEST_CASE("shift split") {
    auto log = synthetic_log({1, 1, 1, 1}, {true, true, false, true});
    log.config.shift_boundary = 2;
    const auto m = metrics(log);
    CHECK(m.pre_shift_error == 0.0);
    CHECK(m.post_shift_error == 0.5);
  }

  TEST_CASE("pearson and tau correlation") {
    const std::vector<double> acc{0.3, 0.6, 0.9};
    CHECK(tau_accuracy_correlation({1, 1, {0.6, 1.2, 1.8}}, acc) == doctest::Approx(1.0));
    CHECK(tau_accuracy_correlation({1, 1, {3.0, 2.0, 1.0}}, acc) == doctest::Approx(-1.0));
    CHECK_THROWS_AS(tau_accuracy_correlation({1, 1, {1.0, 1.0, 1.0}}, acc), UndefinedCorrelation);
    CHECK_THROWS_AS(tau_accuracy_correlation({1, 1, {1.0, 2.0}}, std::vector<double>{0.1, 0.2}), ArgumentError);
    const std::vector<double> with_gap{0.3, std::numeric_limits<double>::quiet_NaN(), 0.9, 0.5};
    CHECK(std::isfinite(tau_accuracy_correlation({1, 1, {0.5, 7.0, 1.5, 0.9}}, with_gap)));
    const std::vector<double> x{1, 2, 3, 4};
    const std::vector<double> y{2, 4, 5, 9};
    // Hand-computed: centred cross products sum to 11, squares to 5 and 26.
    CHECK(pearson(x, y) == doctest::Approx(11.0 / std::sqrt(5.0 * 26.0)));
  }

  TEST_CASE("per-class model accuracy is recall per consensus class") {
    EpisodeLog log;
    log.num_classes = 3;
    const std::vector<std::pair<std::size_t, std::size_t>> pairs{{0, 0}, {0, 1}, {1, 1}, {1, 1}, {0, 0}};
    for (const auto& [truth, model] : pairs) {
      StepRecord s;
      s.truth = truth;
      s.model_prediction = model;
      log.steps.push_back(s);
    }
    const auto acc = per_class_model_accuracy(log);
    CHECK(acc[0] == doctest::Approx(2.0 / 3.0));
    CHECK(acc[1] == 1.0);
    CHECK(std::isnan(acc[2]));
  }

  TEST_CASE("expected tie floor") {
    std::vector<StreamSample> s{{"a", Simplex::uniform(2), {0, 1}, {}}, {"b", Simplex::uniform(2), {0, 0}, {}}};
    CHECK(expected_tie_floor(s) == doctest::Approx(0.25));
  }
}
