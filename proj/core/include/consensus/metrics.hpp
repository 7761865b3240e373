#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "consensus/harness.hpp"
#include "consensus/prior.hpp"

namespace consensus {

inline constexpr std::array<double, 4> kBudgetBuckets{0.5, 1.0, 2.0, 3.0};
inline constexpr double kBucketTolerance = 0.1;
inline constexpr std::size_t kDefaultMovingAverage = 100;

// The budget b with |cost - b| / b <= 10%, if any.
std::optional<double> budget_bucket(double mean_cost);
std::string bucket_label(std::optional<double> bucket);

// Trailing simple moving average; the first entries average what is available.
std::vector<double> moving_average(std::span<const double> xs, std::size_t window);

struct Summary {
  std::size_t length = 0;
  double error_rate = 0.0;
  double mean_cost = 0.0;
  std::optional<double> bucket;
  double model_error = 0.0;  // error of argmax f against consensus
  std::vector<double> moving_error;
  std::vector<double> moving_cost;
  // Distribution-shift runs.
  std::optional<double> pre_shift_error;
  std::optional<double> post_shift_error;
  // Two-phase runs.
  std::optional<double> phase1_cost;
  std::optional<double> phase2_error;
  std::optional<double> phase2_model_error;
};

Summary metrics(const EpisodeLog& log, std::size_t ma_window = kDefaultMovingAverage);

double pearson(std::span<const double> x, std::span<const double> y);

// Recall of argmax f for each consensus class over the logged steps; classes
// that never occur as consensus get NaN.
std::vector<double> per_class_model_accuracy(const EpisodeLog& log);

// Pearson correlation between tau and per-class accuracy. Requires K >= 3;
// classes with NaN accuracy are dropped. Throws UndefinedCorrelation on zero variance.
double tau_accuracy_correlation(const PriorParams& params, std::span<const double> per_class_acc);

// Realized error of a predictor that sees every vote: consensus computed from
// the pool with the run's ground-truth tie-breaks, prediction from the pool
// with the run's commit tie-breaks.
double tie_floor(const std::vector<StreamSample>& stream, std::uint64_t seed);

// Expected version: mean over samples of 1 - 1/(number of tied leaders).
double expected_tie_floor(const std::vector<StreamSample>& stream);

}  // namespace consensus
