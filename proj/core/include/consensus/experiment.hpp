#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "consensus/datagen.hpp"
#include "consensus/harness.hpp"
#include "consensus/metrics.hpp"
#include "consensus/policies.hpp"

namespace consensus {

enum class RunMode { Standard, TwoPhase, Shift };

std::string_view to_string(RunMode m) noexcept;
RunMode run_mode_from_string(std::string_view s);

// Where samples come from: a dataset file or a synthetic generator.
struct StreamSource {
  std::optional<std::string> dataset;
  std::optional<SyntheticConfig> synthetic;
};

// One policy family with the hyperparameter values to sweep.
struct PolicySpec {
  std::string policy = "threshold";  // threshold | random | entropy | model-picker
  ThresholdRegime regime = ThresholdRegime::InfExp;
  std::vector<double> grid{0.9};
  double eta = 0.3;  // model-picker learning rate

  PolicyKind at(double parameter) const;
  void validate() const;
};

struct ExperimentConfig {
  StreamSource source;
  // Distribution-shift runs: the noisy half follows the clean source. Without
  // one the single stream is split at `shift_boundary` (default: half way).
  std::optional<StreamSource> shift_source;
  std::optional<std::size_t> shift_boundary;
  std::vector<PolicySpec> policies{PolicySpec{}};
  std::optional<int> experts;
  std::vector<std::uint64_t> seeds{3, 4, 5};
  RunMode mode = RunMode::Standard;
  RunConfig run;
  std::string out = "out";
  int threads = 1;

  void validate() const;
};

// Command-line overrides applied on top of the config file.
struct Overrides {
  std::optional<std::string> config;
  std::optional<std::string> policy;
  std::optional<std::string> regime;
  std::optional<double> rho;
  std::optional<double> beta;
  std::optional<double> scale;
  std::optional<std::uint64_t> seed;
  std::optional<int> experts;
  std::optional<int> mc;
  std::optional<std::size_t> window;
  std::optional<std::string> mode;
  std::optional<std::string> out;
  std::optional<int> threads;
};

ExperimentConfig parse_experiment_config(const std::string& json_text);
ExperimentConfig load_experiment_config(const Overrides& ov);
void apply_overrides(ExperimentConfig& cfg, const Overrides& ov);

// The stream a given seed runs on, with the shift boundary set when relevant.
struct PreparedStream {
  std::vector<StreamSample> samples;
  std::optional<std::size_t> shift_boundary;
};
PreparedStream prepare_stream(const ExperimentConfig& cfg, std::uint64_t seed);

struct RunResult {
  EpisodeLog log;
  Summary summary;
};
RunResult execute_run(const ExperimentConfig& cfg, const PolicyKind& policy, std::uint64_t seed);

std::string summary_line(const RunResult& r);

// Each returns a process exit code; messages go to `err`.
int cmd_run(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_sweep(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_report(const std::filesystem::path& points_csv, const std::filesystem::path& logs_dir,
               const std::filesystem::path& out_dir, std::ostream& out, std::ostream& err);
int cmd_synth(const ExperimentConfig& cfg, const std::filesystem::path& dest, std::uint64_t seed,
              std::ostream& out, std::ostream& err);

// Shortest round-trip decimal form used in every CSV this tool writes.
std::string format_number(double v);

struct PointRow {
  std::string policy;
  double parameter = 0.0;
  std::uint64_t seed = 0;
  double mean_cost = 0.0;
  double error_rate = 0.0;
  std::optional<double> bucket;
  double model_error = 0.0;
  std::optional<double> pre_shift_error;
  std::optional<double> post_shift_error;
  std::optional<double> phase2_error;
  std::optional<double> phase2_model_error;
  bool failed = false;
  std::string message;
  std::string log;
};

void write_points_csv(std::ostream& os, const std::vector<PointRow>& rows);
std::vector<PointRow> read_points_csv(std::istream& is);

// Mean and standard error (NA when fewer than two values).
struct MeanSe {
  std::size_t n = 0;
  std::optional<double> mean;
  std::optional<double> se;
};
MeanSe mean_se(const std::vector<double>& xs);

}  // namespace consensus
