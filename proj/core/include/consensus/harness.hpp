#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "consensus/likelihood.hpp"
#include "consensus/optimizer.hpp"
#include "consensus/policies.hpp"
#include "consensus/rng.hpp"
#include "consensus/types.hpp"

namespace consensus {

struct StreamSample {
  std::string id;
  Simplex f;
  // The N hidden expert votes as class indices.
  std::vector<int> vote_pool;
  // Generating class for synthetic samples; never serialized.
  std::optional<std::size_t> latent_class;

  std::size_t num_classes() const noexcept { return f.size(); }
  int pool_size() const noexcept { return static_cast<int>(vote_pool.size()); }
  CountVector histogram() const;
};

// Checks every sample shares K and N and every vote lies in [0, K).
void validate_stream(const std::vector<StreamSample>& stream);

struct RunConfig {
  std::size_t window = WindowDataset::kDefaultCapacity;
  int mc_inference = kDefaultInferenceSamples;
  OptimizerConfig optimizer;
  // Defaults to the hyperprior of the policy's likelihood regime.
  std::optional<HyperPriorConfig> hyper;
  std::size_t phase_boundary = 1000;
  // Set for distribution-shift runs; only used for reporting.
  std::optional<std::size_t> shift_boundary;
  std::uint64_t seed = 3;
};

struct StepRecord {
  std::size_t t = 0;
  std::string id;
  int n_queried = 0;
  std::size_t prediction = 0;
  std::size_t truth = 0;
  bool correct = false;
  long cost = 0;  // cumulative votes bought through t
  std::optional<double> acc;
  std::size_t model_prediction = 0;  // argmax of f, lowest index on ties
  int phase = 1;
  std::string theta_hash;
};

struct EpisodeLog {
  std::vector<StepRecord> steps;
  std::string policy;
  double parameter = 0.0;
  std::string mode = "standard";
  RunConfig config;
  std::size_t num_classes = 0;
  int pool_size = 0;
  std::optional<PriorParams> final_params;
  int refits = 0;
  bool valid = true;
  std::string error;
};

// Independent random streams per timestep. Streams are keyed by (seed, t,
// purpose, index) so runs that buy different numbers of votes still see the
// same vote order and the same ground-truth tie-breaks.
enum class StepStream : std::uint64_t {
  GroundTruth = 1,
  Vote = 2,
  Decision = 3,
  Commit = 4,
  Budget = 5,
  PickerUpdate = 6,
  Refit = 7,
};

Rng step_rng(std::uint64_t seed, std::size_t t, StepStream purpose, std::uint64_t index = 0);

// Plurality of the full pool; ties broken uniformly at random.
std::size_t ground_truth(const StreamSample& sample, Rng& rng);

// 16-hex-digit FNV-1a digest of the parameter bit patterns.
std::string params_hash(const PriorParams& params);

// Drives one policy over a stream, one sample at a time.
class OnlineRunner {
 public:
  OnlineRunner(PolicyKind policy, RunConfig cfg, std::size_t num_classes, int pool_size);

  StepRecord process(const StreamSample& sample, std::size_t t);

  // Stops learning and querying; later samples are predicted from f and the
  // current parameters alone.
  void freeze();
  // Refits immediately if records arrived since the last refit.
  void refit_now(std::size_t t);

  const WindowDataset& window() const noexcept { return window_; }
  const PolicyState& state() const noexcept { return state_; }
  long cost() const noexcept { return cost_; }
  int refits() const noexcept { return refits_; }
  bool learning() const noexcept;

 private:
  StepRecord process_threshold(const StreamSample& sample, std::size_t t);
  StepRecord process_baseline(const StreamSample& sample, std::size_t t);
  StepRecord process_frozen(const StreamSample& sample, std::size_t t);
  void after_commit(const StreamSample& sample, const CountVector& votes, std::size_t t);

  RunConfig cfg_;
  HyperPriorConfig hyper_;
  PolicyState state_;
  WindowDataset window_;
  std::size_t num_classes_;
  int pool_size_;
  long cost_ = 0;
  std::size_t committed_ = 0;
  std::size_t pending_records_ = 0;
  int refits_ = 0;
  bool frozen_ = false;
};

EpisodeLog run_sequence(const std::vector<StreamSample>& stream, const PolicyKind& policy,
                        const RunConfig& cfg);

// Phase 1 (t < phase_boundary) learns over an unbounded window; phase 2
// forbids queries and predicts from the frozen parameters.
EpisodeLog run_two_phase(const std::vector<StreamSample>& stream, const PolicyKind& policy,
                         const RunConfig& cfg);

// Each half shuffled independently (seeded) and concatenated clean-first.
std::vector<StreamSample> make_shift_stream(std::vector<StreamSample> clean,
                                            std::vector<StreamSample> noisy, std::uint64_t seed);

}  // namespace consensus
