#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "consensus/errors.hpp"
#include "consensus/experiment.hpp"

namespace {

void add_overrides(CLI::App* cmd, consensus::Overrides& ov) {
  cmd->add_option("--config", ov.config, "Experiment config (JSON)");
  cmd->add_option("--policy", ov.policy, "threshold, random, entropy or model-picker");
  cmd->add_option("--regime", ov.regime, "finexp, infexp, fixed-finexp or fixed-infexp");
  cmd->add_option("--rho", ov.rho, "Threshold policy accuracy target");
  cmd->add_option("--beta", ov.beta, "Random policy query fraction");
  cmd->add_option("--scale", ov.scale, "Entropy / Model Picker scale");
  cmd->add_option("--seed", ov.seed, "Run a single seed");
  cmd->add_option("--experts", ov.experts, "Experts kept per sample");
  cmd->add_option("--mc", ov.mc, "Monte-Carlo samples for the consensus posterior");
  cmd->add_option("--window", ov.window, "MAP refit window (0 = unbounded)");
  cmd->add_option("--mode", ov.mode, "standard, two-phase or shift");
  cmd->add_option("--out", ov.out, "Output location");
  cmd->add_option("--threads", ov.threads, "Sweep worker threads");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online consensus prediction with a learned classifier prior"};
  app.require_subcommand(1);

  consensus::Overrides run_ov;
  auto* run = app.add_subcommand("run", "Replay one policy over one stream");
  add_overrides(run, run_ov);

  consensus::Overrides sweep_ov;
  auto* sweep = app.add_subcommand("sweep", "Run every (policy, parameter, seed) combination");
  add_overrides(sweep, sweep_ov);

  std::string points;
  std::string logs;
  std::string report_out = "report";
  auto* report = app.add_subcommand("report", "Aggregate sweep results into tables");
  report->add_option("--points", points, "points.csv from a sweep")->required();
  report->add_option("--logs", logs, "Directory of episode logs")->required();
  report->add_option("--out", report_out, "Directory for the tables");

  consensus::Overrides synth_ov;
  auto* synth = app.add_subcommand("synth", "Write a synthetic dataset file");
  add_overrides(synth, synth_ov);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return consensus::cmd_run(consensus::load_experiment_config(run_ov), std::cout, std::cerr);
    if (*sweep) return consensus::cmd_sweep(consensus::load_experiment_config(sweep_ov), std::cout, std::cerr);
    if (*report) return consensus::cmd_report(points, logs, report_out, std::cout, std::cerr);
    if (*synth) {
      const std::string dest = synth_ov.out.value_or("dataset.csv");
      const auto cfg = consensus::load_experiment_config(synth_ov);
      return consensus::cmd_synth(cfg, dest, cfg.seeds.front(), std::cout, std::cerr);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
