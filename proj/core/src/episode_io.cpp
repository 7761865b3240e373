#include "consensus/episode_io.hpp"

#include <istream>
#include <ostream>
#include <sstream>

#include "consensus/errors.hpp"
#include "json.hpp"

namespace consensus {

using nlohmann::json;

namespace {

json params_json(const PriorParams& p) {
  return json{{"theta", p.theta}, {"phi", p.phi}, {"tau", p.tau}};
}

PriorParams params_from_json(const json& j) {
  return {j.at("theta").get<double>(), j.at("phi").get<double>(), j.at("tau").get<std::vector<double>>()};
}

template <class T>
json opt(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

json step_json(const StepRecord& s) {
  return json{{"t", s.t},
              {"id", s.id},
              {"phase", s.phase},
              {"n_queried", s.n_queried},
              {"prediction", s.prediction},
              {"truth", s.truth},
              {"correct", s.correct},
              {"cost", s.cost},
              {"acc", opt(s.acc)},
              {"model_prediction", s.model_prediction},
              {"theta_hash", s.theta_hash}};
}

json summary_json(const EpisodeLog& log, const Summary& m) {
  json cfg{{"window", log.config.window},
           {"mc_inference", log.config.mc_inference},
           {"mc_likelihood", log.config.optimizer.mc_samples},
           {"refit_interval", log.config.optimizer.refit_interval},
           {"learning_rate", log.config.optimizer.learning_rate},
           {"max_iters", log.config.optimizer.max_iters},
           {"tol", log.config.optimizer.tol},
           {"patience", log.config.optimizer.patience},
           {"resample_each_iteration", log.config.optimizer.resample_each_iteration},
           {"phase_boundary", log.config.phase_boundary},
           {"shift_boundary", opt(log.config.shift_boundary)}};
  json j{{"summary", true},
         {"valid", log.valid},
         {"error", log.error},
         {"policy", log.policy},
         {"parameter", log.parameter},
         {"seed", log.config.seed},
         {"mode", log.mode},
         {"K", log.num_classes},
         {"N", log.pool_size},
         {"config", cfg},
         {"T", m.length},
         {"error_rate", m.error_rate},
         {"mean_cost", m.mean_cost},
         {"bucket", opt(m.bucket)},
         {"model_error", m.model_error},
         {"refits", log.refits},
         {"final_params", log.final_params ? params_json(*log.final_params) : json(nullptr)},
         {"pre_shift_error", opt(m.pre_shift_error)},
         {"post_shift_error", opt(m.post_shift_error)},
         {"phase1_cost", opt(m.phase1_cost)},
         {"phase2_error", opt(m.phase2_error)},
         {"phase2_model_error", opt(m.phase2_model_error)}};
  json tau_corr = nullptr;
  json per_class = per_class_model_accuracy(log);
  if (log.final_params && log.num_classes >= 3) {
    try {
      tau_corr = tau_accuracy_correlation(*log.final_params, per_class_model_accuracy(log));
    } catch (const std::exception&) {
      tau_corr = nullptr;
    }
  }
  // NaN is not valid JSON; unobserved classes become null.
  for (auto& v : per_class) {
    if (v.is_number_float() && std::isnan(v.get<double>())) v = nullptr;
  }
  j["per_class_model_accuracy"] = per_class;
  j["tau_accuracy_correlation"] = tau_corr;
  return j;
}

}  // namespace

void write_episode_jsonl(std::ostream& os, const EpisodeLog& log, const Summary& summary) {
  for (const auto& s : log.steps) os << step_json(s).dump() << '\n';
  os << summary_json(log, summary).dump() << '\n';
}

std::string episode_jsonl(const EpisodeLog& log, const Summary& summary) {
  std::ostringstream os;
  write_episode_jsonl(os, log, summary);
  return os.str();
}

EpisodeLog read_episode_jsonl(std::istream& is) {
  EpisodeLog log;
  std::string line;
  std::size_t lineno = 0;
  bool saw_summary = false;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(lineno, e.what());
    }
    if (j.value("summary", false)) {
      saw_summary = true;
      log.valid = j.at("valid").get<bool>();
      log.error = j.at("error").get<std::string>();
      log.policy = j.at("policy").get<std::string>();
      log.parameter = j.at("parameter").get<double>();
      log.mode = j.at("mode").get<std::string>();
      log.num_classes = j.at("K").get<std::size_t>();
      log.pool_size = j.at("N").get<int>();
      log.refits = j.at("refits").get<int>();
      log.config.seed = j.at("seed").get<std::uint64_t>();
      const auto& cfg = j.at("config");
      log.config.window = cfg.at("window").get<std::size_t>();
      log.config.mc_inference = cfg.at("mc_inference").get<int>();
      log.config.optimizer.mc_samples = cfg.at("mc_likelihood").get<int>();
      log.config.optimizer.refit_interval = cfg.at("refit_interval").get<int>();
      log.config.optimizer.learning_rate = cfg.at("learning_rate").get<double>();
      log.config.optimizer.max_iters = cfg.at("max_iters").get<int>();
      log.config.optimizer.tol = cfg.at("tol").get<double>();
      log.config.optimizer.patience = cfg.at("patience").get<int>();
      log.config.optimizer.resample_each_iteration = cfg.value("resample_each_iteration", false);
      log.config.phase_boundary = cfg.at("phase_boundary").get<std::size_t>();
      if (!cfg.at("shift_boundary").is_null()) {
        log.config.shift_boundary = cfg.at("shift_boundary").get<std::size_t>();
      }
      if (!j.at("final_params").is_null()) log.final_params = params_from_json(j.at("final_params"));
      continue;
    }
    StepRecord s;
    s.t = j.at("t").get<std::size_t>();
    s.id = j.at("id").get<std::string>();
    s.phase = j.at("phase").get<int>();
    s.n_queried = j.at("n_queried").get<int>();
    s.prediction = j.at("prediction").get<std::size_t>();
    s.truth = j.at("truth").get<std::size_t>();
    s.correct = j.at("correct").get<bool>();
    s.cost = j.at("cost").get<long>();
    if (!j.at("acc").is_null()) s.acc = j.at("acc").get<double>();
    s.model_prediction = j.at("model_prediction").get<std::size_t>();
    s.theta_hash = j.at("theta_hash").get<std::string>();
    log.steps.push_back(std::move(s));
  }
  if (!saw_summary) throw ParseError(lineno, "episode log has no summary object");
  return log;
}

std::string read_summary_line(std::istream& is) {
  std::string line;
  std::string last;
  while (std::getline(is, line)) {
    if (!line.empty()) last = line;
  }
  if (last.empty()) throw ParseError(0, "empty episode log");
  return last;
}

}  // namespace consensus
