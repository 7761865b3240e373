#include "consensus/harness.hpp"

#include <bit>
#include <cstdio>
#include <exception>

#include "consensus/distributions.hpp"
#include "consensus/errors.hpp"
#include "consensus/inference.hpp"

namespace consensus {

CountVector StreamSample::histogram() const {
  CountVector h(num_classes());
  for (const int v : vote_pool) h.increment(static_cast<std::size_t>(v));
  return h;
}

void validate_stream(const std::vector<StreamSample>& stream) {
  if (stream.empty()) throw EmptyDataError("stream is empty");
  const std::size_t k = stream.front().num_classes();
  const int n = stream.front().pool_size();
  if (n < 1) throw ValidationError("samples must carry at least one expert vote");
  for (const auto& s : stream) {
    if (s.num_classes() != k) throw ValidationError("sample " + s.id + " has a different K");
    if (s.pool_size() != n) throw ValidationError("sample " + s.id + " has a different pool size");
    for (const int v : s.vote_pool) {
      if (v < 0 || static_cast<std::size_t>(v) >= k) {
        throw ValidationError("sample " + s.id + " has a vote outside [0, K)");
      }
    }
  }
}

Rng step_rng(std::uint64_t seed, std::size_t t, StepStream purpose, std::uint64_t index) {
  return Rng(derive_seed(seed, {static_cast<std::uint64_t>(t), static_cast<std::uint64_t>(purpose), index}));
}

std::size_t ground_truth(const StreamSample& sample, Rng& rng) {
  const CountVector h = sample.histogram();
  return argmax_random_tie<int>(h.values(), rng);
}

std::string params_hash(const PriorParams& params) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](double v) {
    auto bits = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) {
      h ^= (bits >> (8 * i)) & 0xffU;
      h *= 0x100000001b3ULL;
    }
  };
  mix(params.theta);
  mix(params.phi);
  for (const double t : params.tau) mix(t);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

std::size_t model_argmax(const Simplex& f) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < f.size(); ++k) {
    if (f[k] > f[best]) best = k;
  }
  return best;
}

HyperPriorConfig hyper_for(const PolicyKind& policy, const RunConfig& cfg) {
  const auto* t = std::get_if<ThresholdPolicy>(&policy);
  const Regime regime = t ? likelihood_regime(t->regime) : Regime::InfExp;
  if (!cfg.hyper) return HyperPriorConfig::defaults_for(regime);
  // A configured hyperprior keeps its gamma pairs but follows the policy's regime.
  HyperPriorConfig h = *cfg.hyper;
  h.regime = regime;
  return h;
}

}  // namespace

OnlineRunner::OnlineRunner(PolicyKind policy, RunConfig cfg, std::size_t num_classes, int pool_size)
    : cfg_(std::move(cfg)),
      hyper_(hyper_for(policy, cfg_)),
      state_(PolicyState::create(std::move(policy), pool_size, num_classes, hyper_)),
      window_(pool_size, cfg_.window),
      num_classes_(num_classes),
      pool_size_(pool_size) {
  cfg_.optimizer.validate();
  if (cfg_.mc_inference < 1) throw ConfigError("inference sample count must be >= 1");
}

bool OnlineRunner::learning() const noexcept {
  const auto* t = std::get_if<ThresholdPolicy>(&state_.kind);
  return t != nullptr && is_learning(t->regime) && !frozen_;
}

void OnlineRunner::freeze() { frozen_ = true; }

void OnlineRunner::refit_now(std::size_t t) {
  if (pending_records_ == 0 || window_.empty()) return;
  const auto* policy = std::get_if<ThresholdPolicy>(&state_.kind);
  if (policy == nullptr || !is_learning(policy->regime)) return;
  Rng rng = step_rng(cfg_.seed, t, StepStream::Refit);
  state_.params = optimize_map(window_, hyper_, cfg_.optimizer, state_.params, rng);
  pending_records_ = 0;
  ++refits_;
}

StepRecord OnlineRunner::process(const StreamSample& sample, std::size_t t) {
  if (sample.num_classes() != num_classes_ || sample.pool_size() != pool_size_) {
    throw ArgumentError("sample " + sample.id + " does not match the runner's K or N");
  }
  if (frozen_) return process_frozen(sample, t);
  if (std::holds_alternative<ThresholdPolicy>(state_.kind)) return process_threshold(sample, t);
  return process_baseline(sample, t);
}

namespace {

StepRecord base_record(const StreamSample& sample, std::size_t t, std::uint64_t seed) {
  StepRecord rec;
  rec.t = t;
  rec.id = sample.id;
  Rng truth_rng = step_rng(seed, t, StepStream::GroundTruth);
  rec.truth = ground_truth(sample, truth_rng);
  rec.model_prediction = model_argmax(sample.f);
  return rec;
}

}  // namespace

StepRecord OnlineRunner::process_threshold(const StreamSample& sample, std::size_t t) {
  StepRecord rec = base_record(sample, t, cfg_.seed);
  CountVector remaining = sample.histogram();
  CountVector votes(num_classes_);
  Rng commit_rng = step_rng(cfg_.seed, t, StepStream::Commit);
  for (std::uint64_t draw = 0;; ++draw) {
    Rng decision_rng = step_rng(cfg_.seed, t, StepStream::Decision, draw);
    const Decision d =
        threshold_decide(votes, sample.f, state_, decision_rng, commit_rng, cfg_.mc_inference);
    if (const auto* c = std::get_if<Commit>(&d)) {
      rec.prediction = c->cls;
      rec.acc = c->acc;
      break;
    }
    Rng vote_rng = step_rng(cfg_.seed, t, StepStream::Vote, draw);
    const std::size_t v = draw_vote_without_replacement(remaining, vote_rng);
    remaining.decrement(v);
    votes.increment(v);
  }
  rec.n_queried = votes.total();
  after_commit(sample, votes, t);
  rec.correct = rec.prediction == rec.truth;
  rec.cost = cost_;
  rec.theta_hash = params_hash(state_.params);
  return rec;
}

StepRecord OnlineRunner::process_baseline(const StreamSample& sample, std::size_t t) {
  StepRecord rec = base_record(sample, t, cfg_.seed);
  Rng budget_rng = step_rng(cfg_.seed, t, StepStream::Budget);
  const double beta = baseline_beta(sample.f, state_);
  const int budget = random_draw_count(beta, pool_size_, budget_rng);

  CountVector remaining = sample.histogram();
  CountVector votes(num_classes_);
  for (std::uint64_t draw = 0; votes.total() < budget; ++draw) {
    if (plurality_guaranteed(votes, budget - votes.total())) break;
    Rng vote_rng = step_rng(cfg_.seed, t, StepStream::Vote, draw);
    const std::size_t v = draw_vote_without_replacement(remaining, vote_rng);
    remaining.decrement(v);
    votes.increment(v);
  }
  Rng commit_rng = step_rng(cfg_.seed, t, StepStream::Commit);
  rec.prediction = votes.total() == 0 ? argmax_random_tie<double>(sample.f.values(), commit_rng)
                                      : argmax_random_tie<int>(votes.values(), commit_rng);
  rec.n_queried = votes.total();
  if (std::holds_alternative<ModelPickerPolicy>(state_.kind)) {
    Rng loss_rng = step_rng(cfg_.seed, t, StepStream::PickerUpdate);
    model_picker_update(state_, votes, loss_rng);
  }
  after_commit(sample, votes, t);
  rec.correct = rec.prediction == rec.truth;
  rec.cost = cost_;
  rec.theta_hash = params_hash(state_.params);
  return rec;
}

StepRecord OnlineRunner::process_frozen(const StreamSample& sample, std::size_t t) {
  StepRecord rec = base_record(sample, t, cfg_.seed);
  rec.phase = 2;
  Rng commit_rng = step_rng(cfg_.seed, t, StepStream::Commit);
  if (std::holds_alternative<ThresholdPolicy>(state_.kind)) {
    Rng decision_rng = step_rng(cfg_.seed, t, StepStream::Decision);
    const auto posterior =
        threshold_posterior(CountVector(num_classes_), sample.f, state_, cfg_.mc_inference, decision_rng);
    rec.prediction = predict(posterior, commit_rng);
    rec.acc = posterior.acc;
  } else {
    rec.prediction = argmax_random_tie<double>(sample.f.values(), commit_rng);
  }
  ++committed_;
  rec.correct = rec.prediction == rec.truth;
  rec.cost = cost_;
  rec.theta_hash = params_hash(state_.params);
  return rec;
}

void OnlineRunner::after_commit(const StreamSample& sample, const CountVector& votes, std::size_t t) {
  cost_ += votes.total();
  ++committed_;
  if (!learning()) return;
  if (votes.total() >= 1) {
    window_.push(ObservationRecord(sample.f, votes));
    ++pending_records_;
  }
  if (committed_ % static_cast<std::size_t>(cfg_.optimizer.refit_interval) == 0) refit_now(t);
}

namespace {

EpisodeLog start_log(const std::vector<StreamSample>& stream, const PolicyKind& policy,
                     const RunConfig& cfg, std::string mode) {
  validate_stream(stream);
  EpisodeLog log;
  log.policy = policy_name(policy);
  log.parameter = policy_parameter(policy);
  log.mode = std::move(mode);
  log.config = cfg;
  log.num_classes = stream.front().num_classes();
  log.pool_size = stream.front().pool_size();
  log.steps.reserve(stream.size());
  return log;
}

void finish_log(EpisodeLog& log, const OnlineRunner& runner) {
  log.refits = runner.refits();
  if (std::holds_alternative<ThresholdPolicy>(runner.state().kind)) {
    log.final_params = runner.state().params;
  }
}

}  // namespace

EpisodeLog run_sequence(const std::vector<StreamSample>& stream, const PolicyKind& policy,
                        const RunConfig& cfg) {
  EpisodeLog log = start_log(stream, policy, cfg, cfg.shift_boundary ? "shift" : "standard");
  OnlineRunner runner(policy, cfg, log.num_classes, log.pool_size);
  try {
    for (std::size_t t = 0; t < stream.size(); ++t) log.steps.push_back(runner.process(stream[t], t));
  } catch (const std::exception& e) {
    log.valid = false;
    log.error = e.what();
  }
  finish_log(log, runner);
  return log;
}

EpisodeLog run_two_phase(const std::vector<StreamSample>& stream, const PolicyKind& policy,
                         const RunConfig& cfg) {
  if (cfg.phase_boundary == 0 || cfg.phase_boundary > stream.size()) {
    throw ConfigError("phase boundary must lie in [1, stream length]");
  }
  RunConfig phase_cfg = cfg;
  phase_cfg.window = 0;  // unbounded: learn from every phase-1 record
  EpisodeLog log = start_log(stream, policy, phase_cfg, "two-phase");
  OnlineRunner runner(policy, phase_cfg, log.num_classes, log.pool_size);
  try {
    for (std::size_t t = 0; t < stream.size(); ++t) {
      if (t == cfg.phase_boundary) {
        runner.refit_now(t);
        runner.freeze();
      }
      log.steps.push_back(runner.process(stream[t], t));
    }
  } catch (const std::exception& e) {
    log.valid = false;
    log.error = e.what();
  }
  finish_log(log, runner);
  return log;
}

std::vector<StreamSample> make_shift_stream(std::vector<StreamSample> clean,
                                            std::vector<StreamSample> noisy, std::uint64_t seed) {
  if (clean.empty() || noisy.empty()) throw ArgumentError("shift stream needs two non-empty halves");
  Rng clean_rng(derive_seed(seed, {1}));
  Rng noisy_rng(derive_seed(seed, {2}));
  clean_rng.shuffle(std::span<StreamSample>(clean));
  noisy_rng.shuffle(std::span<StreamSample>(noisy));
  clean.insert(clean.end(), std::make_move_iterator(noisy.begin()), std::make_move_iterator(noisy.end()));
  return clean;
}

}  // namespace consensus
