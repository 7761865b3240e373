#include "consensus/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <istream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "consensus/episode_io.hpp"
#include "consensus/errors.hpp"
#include "json.hpp"

namespace consensus {

using nlohmann::json;
namespace fs = std::filesystem;

std::string_view to_string(RunMode m) noexcept {
  switch (m) {
    case RunMode::Standard: return "standard";
    case RunMode::TwoPhase: return "two-phase";
    case RunMode::Shift: return "shift";
  }
  return "standard";
}

RunMode run_mode_from_string(std::string_view s) {
  if (s == "standard") return RunMode::Standard;
  if (s == "two-phase") return RunMode::TwoPhase;
  if (s == "shift") return RunMode::Shift;
  throw ConfigError("unknown mode '" + std::string(s) + "' (expected standard, two-phase or shift)");
}

PolicyKind PolicySpec::at(double parameter) const {
  if (policy == "threshold") return ThresholdPolicy{parameter, regime};
  if (policy == "random") return RandomPolicy{parameter};
  if (policy == "entropy") return EntropyPolicy{parameter};
  if (policy == "model-picker") return ModelPickerPolicy{parameter, eta};
  throw ConfigError("unknown policy '" + policy + "'");
}

void PolicySpec::validate() const {
  if (grid.empty()) throw ConfigError("policy '" + policy + "' has an empty grid");
  const bool unit = policy == "threshold" || policy == "random";
  const double hi = unit ? 1.0 : 1000.0;
  for (const double g : grid) {
    if (!(g >= 0.0 && g <= hi)) {
      throw ConfigError("policy '" + policy + "' parameter " + format_number(g) + " outside [0, " +
                        format_number(hi) + "]");
    }
    consensus::validate(at(g));
  }
  if (!(eta > 0.0)) throw ConfigError("model-picker eta must be > 0");
}

void ExperimentConfig::validate() const {
  auto check_source = [](const StreamSource& s, const char* what) {
    if (s.dataset.has_value() == s.synthetic.has_value()) {
      throw ConfigError(std::string(what) + " needs exactly one of dataset or synthetic");
    }
    if (s.synthetic) s.synthetic->validate();
  };
  check_source(source, "source");
  if (shift_source) check_source(*shift_source, "shift source");
  if (policies.empty()) throw ConfigError("no policies configured");
  for (const auto& p : policies) p.validate();
  if (experts && *experts < 1) throw ConfigError("experts must be >= 1");
  if (seeds.empty()) throw ConfigError("seed list is empty");
  if (threads < 1) throw ConfigError("threads must be >= 1");
  if (run.mc_inference < 1) throw ConfigError("mc_inference must be >= 1");
  run.optimizer.validate();
  if (run.hyper) run.hyper->validate();
}

namespace {

void require_known(const json& obj, std::initializer_list<std::string_view> keys, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, _] : obj.items()) {
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      throw ConfigError("unknown key '" + key + "' in " + where);
    }
  }
}

PriorParams parse_params(const json& j, const std::string& where) {
  require_known(j, {"theta", "phi", "tau"}, where);
  PriorParams p{j.at("theta").get<double>(), j.at("phi").get<double>(), j.at("tau").get<std::vector<double>>()};
  try {
    p.validate();
  } catch (const std::exception& e) {
    throw ConfigError(where + ": " + e.what());
  }
  return p;
}

SyntheticConfig parse_synthetic(const json& j) {
  require_known(j,
                {"K", "N", "T", "class_prior", "kappa", "base", "confusion", "confusion_diagonal",
                 "temperature", "model_concentration", "generative_prior", "seed", "id_prefix"},
                "synthetic");
  SyntheticConfig c;
  c.num_classes = j.value("K", c.num_classes);
  c.pool_size = j.value("N", c.pool_size);
  c.length = j.value("T", c.length);
  c.class_prior = j.value("class_prior", c.class_prior);
  c.kappa = j.value("kappa", c.kappa);
  c.base = j.value("base", c.base);
  if (j.contains("confusion") && j.contains("confusion_diagonal")) {
    throw ConfigError("synthetic: give confusion or confusion_diagonal, not both");
  }
  if (j.contains("confusion")) c.confusion = j.at("confusion").get<std::vector<std::vector<double>>>();
  if (j.contains("confusion_diagonal")) {
    c.confusion = diagonal_confusion(j.at("confusion_diagonal").get<std::vector<double>>());
  }
  c.temperature = j.value("temperature", c.temperature);
  c.model_concentration = j.value("model_concentration", c.model_concentration);
  if (j.contains("generative_prior")) c.generative_prior = parse_params(j.at("generative_prior"), "generative_prior");
  c.seed = j.value("seed", c.seed);
  c.id_prefix = j.value("id_prefix", c.id_prefix);
  return c;
}

StreamSource parse_source(const json& j, const std::string& where) {
  require_known(j, {"dataset", "synthetic"}, where);
  StreamSource s;
  if (j.contains("dataset")) s.dataset = j.at("dataset").get<std::string>();
  if (j.contains("synthetic")) s.synthetic = parse_synthetic(j.at("synthetic"));
  return s;
}

PolicySpec parse_policy(const json& j) {
  require_known(j, {"policy", "regime", "grid", "parameter", "eta"}, "policy");
  PolicySpec p;
  p.policy = j.value("policy", p.policy);
  if (j.contains("regime")) p.regime = threshold_regime_from_string(j.at("regime").get<std::string>());
  if (j.contains("grid") && j.contains("parameter")) throw ConfigError("policy: give grid or parameter, not both");
  if (j.contains("grid")) p.grid = j.at("grid").get<std::vector<double>>();
  if (j.contains("parameter")) p.grid = {j.at("parameter").get<double>()};
  p.eta = j.value("eta", p.eta);
  return p;
}

GammaPrior parse_gamma(const json& j, const std::string& where) {
  require_known(j, {"shape", "rate"}, where);
  return {j.at("shape").get<double>(), j.at("rate").get<double>()};
}

void parse_run(const json& j, RunConfig& r) {
  require_known(j,
                {"window", "mc_inference", "mc_likelihood", "refit_interval", "learning_rate", "max_iters",
                 "tol", "patience", "resample_each_iteration", "phase_boundary"},
                "run");
  r.window = j.value("window", r.window);
  r.mc_inference = j.value("mc_inference", r.mc_inference);
  r.optimizer.mc_samples = j.value("mc_likelihood", r.optimizer.mc_samples);
  r.optimizer.refit_interval = j.value("refit_interval", r.optimizer.refit_interval);
  r.optimizer.learning_rate = j.value("learning_rate", r.optimizer.learning_rate);
  r.optimizer.max_iters = j.value("max_iters", r.optimizer.max_iters);
  r.optimizer.tol = j.value("tol", r.optimizer.tol);
  r.optimizer.patience = j.value("patience", r.optimizer.patience);
  r.optimizer.resample_each_iteration =
      j.value("resample_each_iteration", r.optimizer.resample_each_iteration);
  r.phase_boundary = j.value("phase_boundary", r.phase_boundary);
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& json_text) {
  ExperimentConfig cfg;
  try {
    const json j = json::parse(json_text, nullptr, true, true);
    require_known(j,
                  {"source", "shift", "policies", "policy", "regime", "parameter", "grid", "experts", "seeds",
                   "mode", "run", "hyperprior", "out", "threads"},
                  "config");
    if (j.contains("source")) cfg.source = parse_source(j.at("source"), "source");
    if (j.contains("shift")) {
      const auto& s = j.at("shift");
      require_known(s, {"boundary", "source"}, "shift");
      if (s.contains("boundary")) cfg.shift_boundary = s.at("boundary").get<std::size_t>();
      if (s.contains("source")) cfg.shift_source = parse_source(s.at("source"), "shift.source");
    }
    if (j.contains("policies")) {
      if (j.contains("policy")) throw ConfigError("give policies or policy, not both");
      cfg.policies.clear();
      for (const auto& p : j.at("policies")) cfg.policies.push_back(parse_policy(p));
    } else if (j.contains("policy") || j.contains("regime") || j.contains("grid") || j.contains("parameter")) {
      json single = json::object();
      for (const char* key : {"policy", "regime", "grid", "parameter"}) {
        if (j.contains(key)) single[key] = j.at(key);
      }
      cfg.policies = {parse_policy(single)};
    }
    if (j.contains("experts")) cfg.experts = j.at("experts").get<int>();
    if (j.contains("seeds")) cfg.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    if (j.contains("mode")) cfg.mode = run_mode_from_string(j.at("mode").get<std::string>());
    if (j.contains("run")) parse_run(j.at("run"), cfg.run);
    if (j.contains("hyperprior")) {
      const auto& h = j.at("hyperprior");
      require_known(h, {"theta", "phi", "tau"}, "hyperprior");
      HyperPriorConfig hp = HyperPriorConfig::defaults_for(Regime::InfExp);
      if (h.contains("theta")) hp.theta = parse_gamma(h.at("theta"), "hyperprior.theta");
      if (h.contains("phi")) hp.phi = parse_gamma(h.at("phi"), "hyperprior.phi");
      if (h.contains("tau")) hp.tau = parse_gamma(h.at("tau"), "hyperprior.tau");
      cfg.run.hyper = hp;
    }
    cfg.out = j.value("out", cfg.out);
    cfg.threads = j.value("threads", cfg.threads);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return cfg;
}

void apply_overrides(ExperimentConfig& cfg, const Overrides& ov) {
  if (ov.policy) {
    PolicySpec spec;
    spec.policy = *ov.policy;
    if (!cfg.policies.empty()) spec.regime = cfg.policies.front().regime;
    for (const auto& p : cfg.policies) {
      if (p.policy == spec.policy) {
        spec = p;
        break;
      }
    }
    cfg.policies = {spec};
  }
  if (ov.regime) {
    const auto r = threshold_regime_from_string(*ov.regime);
    for (auto& p : cfg.policies) p.regime = r;
  }
  auto pin = [&](const std::optional<double>& value, std::initializer_list<std::string_view> names,
                 const char* flag) {
    if (!value) return;
    bool matched = false;
    for (auto& p : cfg.policies) {
      if (std::find(names.begin(), names.end(), p.policy) != names.end()) {
        p.grid = {*value};
        matched = true;
      }
    }
    if (!matched) throw ConfigError(std::string(flag) + " does not apply to the configured policies");
  };
  pin(ov.rho, {"threshold"}, "--rho");
  pin(ov.beta, {"random"}, "--beta");
  pin(ov.scale, {"entropy", "model-picker"}, "--scale");
  if (ov.seed) cfg.seeds = {*ov.seed};
  if (ov.experts) cfg.experts = *ov.experts;
  if (ov.mc) cfg.run.mc_inference = *ov.mc;
  if (ov.window) cfg.run.window = *ov.window;
  if (ov.mode) cfg.mode = run_mode_from_string(*ov.mode);
  if (ov.out) cfg.out = *ov.out;
  if (ov.threads) cfg.threads = *ov.threads;
}

ExperimentConfig load_experiment_config(const Overrides& ov) {
  ExperimentConfig cfg;
  if (ov.config) {
    std::ifstream is(*ov.config);
    if (!is) throw ConfigError("cannot read config " + *ov.config);
    std::stringstream buf;
    buf << is.rdbuf();
    cfg = parse_experiment_config(buf.str());
  } else {
    SyntheticConfig s;
    cfg.source.synthetic = s;
  }
  apply_overrides(cfg, ov);
  cfg.validate();
  return cfg;
}

namespace {

std::vector<StreamSample> materialize(const StreamSource& src, std::uint64_t seed, std::uint64_t salt) {
  if (src.synthetic) {
    SyntheticConfig c = *src.synthetic;
    c.seed = derive_seed(c.seed, {seed, salt});
    return generate_stream(c);
  }
  Dataset d = load_dataset(*src.dataset);
  // Replayed datasets see a seed-dependent sample order.
  Rng order(derive_seed(seed, {0x0D, salt}));
  order.shuffle(std::span<StreamSample>(d.samples));
  return std::move(d.samples);
}

std::vector<StreamSample> with_experts(std::vector<StreamSample> s, const std::optional<int>& experts,
                                       std::uint64_t seed) {
  const int n = experts.value_or(s.front().pool_size());
  return subsample_experts(s, n, seed);
}

}  // namespace

PreparedStream prepare_stream(const ExperimentConfig& cfg, std::uint64_t seed) {
  PreparedStream out;
  auto clean = with_experts(materialize(cfg.source, seed, 0), cfg.experts, seed);
  if (cfg.mode != RunMode::Shift) {
    out.samples = std::move(clean);
    return out;
  }
  std::vector<StreamSample> noisy;
  if (cfg.shift_source) {
    noisy = with_experts(materialize(*cfg.shift_source, seed, 1), cfg.experts, seed);
  } else {
    const std::size_t b = cfg.shift_boundary.value_or(clean.size() / 2);
    if (b == 0 || b >= clean.size()) throw ConfigError("shift boundary must split the stream");
    noisy.assign(std::make_move_iterator(clean.begin() + static_cast<std::ptrdiff_t>(b)),
                 std::make_move_iterator(clean.end()));
    clean.resize(b);
  }
  out.shift_boundary = clean.size();
  out.samples = make_shift_stream(std::move(clean), std::move(noisy), seed);
  validate_stream(out.samples);
  return out;
}

RunResult execute_run(const ExperimentConfig& cfg, const PolicyKind& policy, std::uint64_t seed) {
  const PreparedStream stream = prepare_stream(cfg, seed);
  RunConfig rc = cfg.run;
  rc.seed = seed;
  rc.shift_boundary = stream.shift_boundary;
  RunResult r;
  r.log = cfg.mode == RunMode::TwoPhase ? run_two_phase(stream.samples, policy, rc)
                                        : run_sequence(stream.samples, policy, rc);
  r.summary = metrics(r.log);
  return r;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "NA";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

std::string na(const std::optional<double>& v) { return v ? format_number(*v) : "NA"; }

std::string clean_field(std::string s) {
  for (char& c : s) {
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  }
  return s;
}

std::string log_name(const std::string& policy, double parameter, std::uint64_t seed) {
  return policy + "_" + format_number(parameter) + "_" + std::to_string(seed) + ".jsonl";
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << text;
  if (!os) throw std::runtime_error("failed writing " + path.string());
}

PointRow point_from(const RunResult& r, std::string log_file) {
  PointRow p;
  p.policy = r.log.policy;
  p.parameter = r.log.parameter;
  p.seed = r.log.config.seed;
  p.mean_cost = r.summary.mean_cost;
  p.error_rate = r.summary.error_rate;
  p.bucket = r.summary.bucket;
  p.model_error = r.summary.model_error;
  p.pre_shift_error = r.summary.pre_shift_error;
  p.post_shift_error = r.summary.post_shift_error;
  p.phase2_error = r.summary.phase2_error;
  p.phase2_model_error = r.summary.phase2_model_error;
  p.failed = !r.log.valid;
  p.message = r.log.error;
  p.log = std::move(log_file);
  return p;
}

}  // namespace

std::string summary_line(const RunResult& r) {
  std::ostringstream os;
  os << "policy=" << r.log.policy << " parameter=" << format_number(r.log.parameter)
     << " seed=" << r.log.config.seed << " mode=" << r.log.mode << " T=" << r.summary.length
     << " error_rate=" << format_number(r.summary.error_rate)
     << " mean_cost=" << format_number(r.summary.mean_cost) << " bucket=" << bucket_label(r.summary.bucket);
  if (r.summary.pre_shift_error) {
    os << " pre_shift_error=" << na(r.summary.pre_shift_error)
       << " post_shift_error=" << na(r.summary.post_shift_error);
  }
  if (r.summary.phase2_error) {
    os << " phase1_cost=" << na(r.summary.phase1_cost) << " phase2_error=" << na(r.summary.phase2_error)
       << " phase2_model_error=" << na(r.summary.phase2_model_error);
  }
  if (!r.log.valid) os << " invalid=\"" << r.log.error << "\"";
  return os.str();
}

int cmd_run(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    const PolicySpec& spec = cfg.policies.front();
    const RunResult r = execute_run(cfg, spec.at(spec.grid.front()), cfg.seeds.front());
    const fs::path dir(cfg.out);
    fs::create_directories(dir);
    write_text(dir / "episode.jsonl", episode_jsonl(r.log, r.summary));
    std::ostringstream ma;
    ma << "t,error,cost\n";
    for (std::size_t t = 0; t < r.summary.moving_error.size(); ++t) {
      ma << t << ',' << format_number(r.summary.moving_error[t]) << ','
         << format_number(r.summary.moving_cost[t]) << '\n';
    }
    write_text(dir / "moving_average.csv", ma.str());
    out << summary_line(r) << '\n';
    if (!r.log.valid) {
      err << "run failed: " << r.log.error << '\n';
      return 1;
    }
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

void write_points_csv(std::ostream& os, const std::vector<PointRow>& rows) {
  os << "policy,parameter,seed,mean_cost,error_rate,bucket,model_error,pre_shift_error,post_shift_error,"
        "phase2_error,phase2_model_error,failed,message,log\n";
  for (const auto& r : rows) {
    os << r.policy << ',' << format_number(r.parameter) << ',' << r.seed << ',' << format_number(r.mean_cost)
       << ',' << format_number(r.error_rate) << ',' << na(r.bucket) << ',' << format_number(r.model_error)
       << ',' << na(r.pre_shift_error) << ',' << na(r.post_shift_error) << ',' << na(r.phase2_error) << ','
       << na(r.phase2_model_error) << ',' << (r.failed ? 1 : 0) << ',' << clean_field(r.message) << ','
       << clean_field(r.log) << '\n';
  }
}

namespace {

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

double to_double(const std::string& s, std::size_t lineno) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw ParseError(lineno, "malformed number '" + s + "'");
  }
  return v;
}

std::optional<double> to_optional(const std::string& s, std::size_t lineno) {
  if (s == "NA") return std::nullopt;
  return to_double(s, lineno);
}

}  // namespace

std::vector<PointRow> read_points_csv(std::istream& is) {
  std::vector<PointRow> rows;
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(is, line)) throw ParseError(1, "points file is empty");
  ++lineno;
  constexpr std::size_t kColumns = 14;
  if (split_row(line).size() != kColumns) throw ParseError(lineno, "unexpected points header");
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_row(line);
    if (f.size() != kColumns) throw ParseError(lineno, "expected 14 fields");
    PointRow r;
    r.policy = f[0];
    r.parameter = to_double(f[1], lineno);
    r.seed = static_cast<std::uint64_t>(to_double(f[2], lineno));
    r.mean_cost = to_double(f[3], lineno);
    r.error_rate = to_double(f[4], lineno);
    r.bucket = to_optional(f[5], lineno);
    r.model_error = to_double(f[6], lineno);
    r.pre_shift_error = to_optional(f[7], lineno);
    r.post_shift_error = to_optional(f[8], lineno);
    r.phase2_error = to_optional(f[9], lineno);
    r.phase2_model_error = to_optional(f[10], lineno);
    r.failed = f[11] == "1";
    r.message = f[12];
    r.log = f[13];
    rows.push_back(std::move(r));
  }
  return rows;
}

int cmd_sweep(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err) {
  struct Job {
    PolicyKind policy;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (const auto& spec : cfg.policies) {
    for (const double g : spec.grid) {
      for (const auto seed : cfg.seeds) jobs.push_back({spec.at(g), seed});
    }
  }
  const fs::path dir(cfg.out);
  const fs::path logs = dir / "logs";
  try {
    fs::create_directories(logs);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }

  std::vector<PointRow> rows(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      const Job& job = jobs[i];
      const std::string name = log_name(policy_name(job.policy), policy_parameter(job.policy), job.seed);
      try {
        const RunResult r = execute_run(cfg, job.policy, job.seed);
        write_text(logs / name, episode_jsonl(r.log, r.summary));
        rows[i] = point_from(r, "logs/" + name);
      } catch (const std::exception& e) {
        PointRow p;
        p.policy = policy_name(job.policy);
        p.parameter = policy_parameter(job.policy);
        p.seed = job.seed;
        p.failed = true;
        p.message = e.what();
        rows[i] = std::move(p);
      }
    }
  };
  const int n_threads = std::min<int>(cfg.threads, static_cast<int>(jobs.size()));
  std::vector<std::thread> pool;
  for (int t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::ostringstream csv;
  write_points_csv(csv, rows);
  try {
    write_text(dir / "points.csv", csv.str());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  const auto failed = std::count_if(rows.begin(), rows.end(), [](const PointRow& r) { return r.failed; });
  out << "runs=" << rows.size() << " failed=" << failed << " points=" << (dir / "points.csv").string() << '\n';
  return 0;
}

MeanSe mean_se(const std::vector<double>& xs) {
  MeanSe r;
  r.n = xs.size();
  if (xs.empty()) return r;
  double sum = 0.0;
  for (const double x : xs) sum += x;
  const double mean = sum / static_cast<double>(xs.size());
  r.mean = mean;
  if (xs.size() >= 2) {
    double ss = 0.0;
    for (const double x : xs) ss += (x - mean) * (x - mean);
    r.se = std::sqrt(ss / static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size()));
  }
  return r;
}

namespace {

std::string ms(const MeanSe& m) { return na(m.mean) + ',' + na(m.se); }

std::vector<std::string> policies_in_order(const std::vector<PointRow>& rows) {
  std::vector<std::string> out;
  for (const auto& r : rows) {
    if (std::find(out.begin(), out.end(), r.policy) == out.end()) out.push_back(r.policy);
  }
  return out;
}

template <class Pred, class Value>
std::vector<double> collect(const std::vector<PointRow>& rows, Pred pred, Value value) {
  std::vector<double> out;
  for (const auto& r : rows) {
    if (pred(r)) out.push_back(value(r));
  }
  return out;
}

}  // namespace

int cmd_report(const fs::path& points_csv, const fs::path& logs_dir, const fs::path& out_dir, std::ostream& out,
               std::ostream& err) {
  try {
    std::ifstream is(points_csv);
    if (!is) throw std::runtime_error("cannot read " + points_csv.string());
    std::vector<PointRow> rows = read_points_csv(is);
    std::erase_if(rows, [](const PointRow& r) { return r.failed; });
    const auto policies = policies_in_order(rows);
    fs::create_directories(out_dir);

    std::ostringstream buckets;
    buckets << "policy,bucket,n,error_mean,error_se,cost_mean,cost_se\n";
    std::ostringstream shift;
    shift << "policy,bucket,n,pre_shift_error_mean,pre_shift_error_se,post_shift_error_mean,post_shift_error_se\n";
    std::ostringstream two_phase;
    two_phase << "policy,bucket,n,phase2_error_mean,phase2_error_se,improvement_points_mean,"
                 "improvement_points_se\n";
    for (const auto& policy : policies) {
      for (const double b : kBudgetBuckets) {
        auto in = [&](const PointRow& r) { return r.policy == policy && r.bucket && *r.bucket == b; };
        const auto err_m = mean_se(collect(rows, in, [](const PointRow& r) { return r.error_rate; }));
        const auto cost_m = mean_se(collect(rows, in, [](const PointRow& r) { return r.mean_cost; }));
        buckets << policy << ',' << format_number(b) << ',' << err_m.n << ',' << ms(err_m) << ',' << ms(cost_m)
                << '\n';

        auto in_shift = [&](const PointRow& r) { return in(r) && r.pre_shift_error && r.post_shift_error; };
        const auto pre = mean_se(collect(rows, in_shift, [](const PointRow& r) { return *r.pre_shift_error; }));
        const auto post = mean_se(collect(rows, in_shift, [](const PointRow& r) { return *r.post_shift_error; }));
        shift << policy << ',' << format_number(b) << ',' << pre.n << ',' << ms(pre) << ',' << ms(post) << '\n';

        auto in_two = [&](const PointRow& r) { return in(r) && r.phase2_error && r.phase2_model_error; };
        const auto p2 = mean_se(collect(rows, in_two, [](const PointRow& r) { return *r.phase2_error; }));
        const auto gain = mean_se(collect(rows, in_two, [](const PointRow& r) {
          return 100.0 * (*r.phase2_model_error - *r.phase2_error);
        }));
        two_phase << policy << ',' << format_number(b) << ',' << p2.n << ',' << ms(p2) << ',' << ms(gain) << '\n';
      }
    }

    // Correlations come from the summary objects of the logs.
    std::vector<fs::path> files;
    if (fs::is_directory(logs_dir)) {
      for (const auto& e : fs::directory_iterator(logs_dir)) {
        if (e.path().extension() == ".jsonl") files.push_back(e.path());
      }
    }
    std::sort(files.begin(), files.end());
    std::map<std::string, std::vector<double>> corr;
    std::vector<std::string> corr_order;
    for (const auto& f : files) {
      std::ifstream ls(f);
      const json s = json::parse(read_summary_line(ls));
      if (!s.value("valid", false)) continue;
      const std::string policy = s.at("policy").get<std::string>();
      if (!corr.count(policy)) corr_order.push_back(policy);
      auto& bucket = corr[policy];
      const auto& c = s.at("tau_accuracy_correlation");
      if (!c.is_null()) bucket.push_back(c.get<double>());
    }
    std::ostringstream tau;
    tau << "policy,n,correlation_mean,correlation_se\n";
    for (const auto& policy : corr_order) {
      const auto m = mean_se(corr[policy]);
      tau << policy << ',' << m.n << ',' << ms(m) << '\n';
    }

    write_text(out_dir / "buckets.csv", buckets.str());
    write_text(out_dir / "shift.csv", shift.str());
    write_text(out_dir / "two_phase.csv", two_phase.str());
    write_text(out_dir / "tau_correlation.csv", tau.str());
    out << "points=" << rows.size() << " policies=" << policies.size() << " logs=" << files.size()
        << " tables=" << out_dir.string() << '\n';
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

int cmd_synth(const ExperimentConfig& cfg, const fs::path& dest, std::uint64_t seed, std::ostream& out,
              std::ostream& err) {
  try {
    if (!cfg.source.synthetic) throw ConfigError("synth needs a synthetic source");
    SyntheticConfig c = *cfg.source.synthetic;
    c.seed = derive_seed(c.seed, {seed, 0});
    const auto samples = generate_stream(c);
    if (dest.has_parent_path()) fs::create_directories(dest.parent_path());
    write_dataset_file(dest.string(), samples);
    out << "samples=" << samples.size() << " K=" << c.num_classes << " N=" << c.pool_size
        << " path=" << dest.string() << '\n';
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace consensus
