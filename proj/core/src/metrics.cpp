#include "consensus/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include "consensus/errors.hpp"
#include "consensus/inference.hpp"

namespace consensus {

std::optional<double> budget_bucket(double mean_cost) {
  for (const double b : kBudgetBuckets) {
    // The small slack keeps decimal edges such as 0.55 inside the band.
    if (std::abs(mean_cost - b) / b <= kBucketTolerance + 1e-12) return b;
  }
  return std::nullopt;
}

std::string bucket_label(std::optional<double> bucket) {
  if (!bucket) return "";
  char buf[16];
  std::snprintf(buf, sizeof buf, "%g", *bucket);
  return buf;
}

std::vector<double> moving_average(std::span<const double> xs, std::size_t window) {
  if (window == 0) throw ArgumentError("moving average window must be >= 1");
  std::vector<double> out(xs.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sum += xs[i];
    if (i >= window) sum -= xs[i - window];
    out[i] = sum / static_cast<double>(std::min(i + 1, window));
  }
  return out;
}

namespace {

double error_between(const EpisodeLog& log, std::size_t begin, std::size_t end, bool model) {
  std::size_t wrong = 0;
  for (std::size_t i = begin; i < end; ++i) {
    const auto& s = log.steps[i];
    const std::size_t guess = model ? s.model_prediction : s.prediction;
    wrong += guess != s.truth ? 1 : 0;
  }
  return end > begin ? static_cast<double>(wrong) / static_cast<double>(end - begin) : 0.0;
}

}  // namespace

Summary metrics(const EpisodeLog& log, std::size_t ma_window) {
  Summary out;
  const std::size_t n = log.steps.size();
  out.length = n;
  if (n == 0) return out;
  std::vector<double> err(n);
  std::vector<double> cost(n);
  for (std::size_t i = 0; i < n; ++i) {
    err[i] = log.steps[i].correct ? 0.0 : 1.0;
    cost[i] = static_cast<double>(log.steps[i].n_queried);
  }
  out.error_rate = error_between(log, 0, n, false);
  out.model_error = error_between(log, 0, n, true);
  out.mean_cost = static_cast<double>(log.steps.back().cost) / static_cast<double>(n);
  out.bucket = budget_bucket(out.mean_cost);
  out.moving_error = moving_average(err, ma_window);
  out.moving_cost = moving_average(cost, ma_window);

  if (log.config.shift_boundary && *log.config.shift_boundary < n) {
    const std::size_t b = *log.config.shift_boundary;
    out.pre_shift_error = error_between(log, 0, b, false);
    out.post_shift_error = error_between(log, b, n, false);
  }
  if (log.mode == "two-phase") {
    const std::size_t b = std::min(log.config.phase_boundary, n);
    long phase1_votes = 0;
    for (std::size_t i = 0; i < b; ++i) phase1_votes += log.steps[i].n_queried;
    out.phase1_cost = b > 0 ? static_cast<double>(phase1_votes) / static_cast<double>(b) : 0.0;
    // Budget buckets refer to the querying phase.
    out.bucket = budget_bucket(*out.phase1_cost);
    if (b < n) {
      out.phase2_error = error_between(log, b, n, false);
      out.phase2_model_error = error_between(log, b, n, true);
    }
  }
  return out;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw ArgumentError("pearson needs equal-length inputs");
  const auto n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0.0 || syy <= 0.0) throw UndefinedCorrelation("correlation undefined: zero variance");
  return sxy / std::sqrt(sxx * syy);
}

std::vector<double> per_class_model_accuracy(const EpisodeLog& log) {
  std::vector<double> hits(log.num_classes, 0.0);
  std::vector<double> seen(log.num_classes, 0.0);
  for (const auto& s : log.steps) {
    seen[s.truth] += 1.0;
    hits[s.truth] += s.model_prediction == s.truth ? 1.0 : 0.0;
  }
  std::vector<double> out(log.num_classes);
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = seen[k] > 0 ? hits[k] / seen[k] : std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

double tau_accuracy_correlation(const PriorParams& params, std::span<const double> per_class_acc) {
  if (params.tau.size() != per_class_acc.size()) throw ArgumentError("tau/accuracy length mismatch");
  if (params.tau.size() < 3) throw ArgumentError("tau correlation needs K >= 3");
  std::vector<double> x;
  std::vector<double> y;
  for (std::size_t k = 0; k < per_class_acc.size(); ++k) {
    if (std::isnan(per_class_acc[k])) continue;
    x.push_back(params.tau[k]);
    y.push_back(per_class_acc[k]);
  }
  if (x.size() < 2) throw UndefinedCorrelation("fewer than two classes with observed accuracy");
  return pearson(x, y);
}

double tie_floor(const std::vector<StreamSample>& stream, std::uint64_t seed) {
  if (stream.empty()) return 0.0;
  std::size_t wrong = 0;
  for (std::size_t t = 0; t < stream.size(); ++t) {
    const CountVector h = stream[t].histogram();
    Rng truth_rng = step_rng(seed, t, StepStream::GroundTruth);
    Rng commit_rng = step_rng(seed, t, StepStream::Commit);
    const std::size_t truth = argmax_random_tie<int>(h.values(), truth_rng);
    const std::size_t guess = argmax_random_tie<int>(h.values(), commit_rng);
    wrong += truth != guess ? 1 : 0;
  }
  return static_cast<double>(wrong) / static_cast<double>(stream.size());
}

double expected_tie_floor(const std::vector<StreamSample>& stream) {
  if (stream.empty()) return 0.0;
  double total = 0.0;
  for (const auto& s : stream) {
    const CountVector h = s.histogram();
    int top = 0;
    for (const int c : h.values()) top = std::max(top, c);
    int ties = 0;
    for (const int c : h.values()) ties += c == top ? 1 : 0;
    total += 1.0 - 1.0 / ties;
  }
  return total / static_cast<double>(stream.size());
}

}  // namespace consensus
