#include "consensus/datagen.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "consensus/distributions.hpp"
#include "consensus/errors.hpp"
#include "json.hpp"

namespace consensus {

void SyntheticConfig::validate() const {
  const std::size_t k = num_classes;
  if (k < 2) throw ConfigError("synthetic: K must be >= 2");
  if (pool_size < 1) throw ConfigError("synthetic: N must be >= 1");
  if (length < 1) throw ConfigError("synthetic: T must be >= 1");
  if (!(kappa > 0.0) || !(base > 0.0)) throw ConfigError("synthetic: kappa and base must be > 0");
  if (!(model_concentration >= 0.0)) throw ConfigError("synthetic: model concentration must be >= 0");
  if (!class_prior.empty()) static_cast<void>(Simplex(class_prior));
  if (!confusion.empty()) {
    if (confusion.size() != k) throw ConfigError("synthetic: confusion must be K x K");
    for (const auto& row : confusion) {
      if (row.size() != k) throw ConfigError("synthetic: confusion must be K x K");
      try {
        Simplex{row};
      } catch (const ArgumentError& e) {
        throw ConfigError(std::string("synthetic: confusion rows must be stochastic: ") + e.what());
      }
    }
  }
  if (!temperature.empty()) {
    if (temperature.size() != k) throw ConfigError("synthetic: temperature needs K entries");
    for (const double t : temperature) {
      if (!(t > 0.0)) throw ConfigError("synthetic: temperatures must be > 0");
    }
  }
  if (generative_prior) {
    generative_prior->validate();
    if (generative_prior->tau.size() != k) throw ConfigError("synthetic: generative prior has wrong K");
  }
}

std::vector<std::vector<double>> diagonal_confusion(const std::vector<double>& diagonal) {
  const std::size_t k = diagonal.size();
  std::vector<std::vector<double>> out(k, std::vector<double>(k));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      out[i][j] = i == j ? diagonal[i] : (1.0 - diagonal[i]) / static_cast<double>(k - 1);
    }
  }
  return out;
}

namespace {

std::size_t sample_index(std::span<const double> p, Rng& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < p.size(); ++k) {
    acc += p[k];
    if (u < acc) return k;
  }
  return p.size() - 1;
}

Simplex synthesize_model_output(const SyntheticConfig& cfg, std::size_t reported, Rng& rng) {
  const std::size_t k = cfg.num_classes;
  std::vector<double> conc(k, 1.0);
  conc[reported] += cfg.model_concentration;
  std::vector<double> logw;
  dirichlet_log_weights(ConcentrationVector(conc), rng, logw);
  // The reported class is the classifier's top choice before temperature.
  const auto top = static_cast<std::size_t>(std::max_element(logw.begin(), logw.end()) - logw.begin());
  std::swap(logw[top], logw[reported]);
  for (std::size_t j = 0; j < k; ++j) {
    const double temp = cfg.temperature.empty() ? 1.0 : cfg.temperature[j];
    logw[j] /= temp;
  }
  double peak = logw[0];
  for (const double w : logw) peak = std::max(peak, w);
  std::vector<double> p(k);
  for (std::size_t j = 0; j < k; ++j) p[j] = std::exp(logw[j] - peak);
  return Simplex::normalized(std::move(p));
}

}  // namespace

std::vector<StreamSample> generate_stream(const SyntheticConfig& cfg) {
  cfg.validate();
  const std::size_t k = cfg.num_classes;
  const std::vector<double> prior =
      cfg.class_prior.empty() ? std::vector<double>(k, 1.0 / static_cast<double>(k)) : cfg.class_prior;
  std::vector<double> identity_row(k, 0.0);

  std::vector<StreamSample> out;
  out.reserve(cfg.length);
  for (std::size_t t = 0; t < cfg.length; ++t) {
    Rng rng(derive_seed(cfg.seed, {static_cast<std::uint64_t>(t)}));
    const std::size_t z = sample_index(prior, rng);
    std::size_t reported = z;
    if (!cfg.confusion.empty()) reported = sample_index(cfg.confusion[z], rng);
    Simplex f = synthesize_model_output(cfg, reported, rng);

    ConcentrationVector expert_alpha;
    if (cfg.generative_prior) {
      expert_alpha = alpha_from(f, *cfg.generative_prior);
    } else {
      std::vector<double> a(k, cfg.base);
      a[z] += cfg.kappa;
      expert_alpha = ConcentrationVector(std::move(a));
    }
    const Simplex pi = dirichlet_sample(expert_alpha, rng);
    std::vector<int> votes(static_cast<std::size_t>(cfg.pool_size));
    for (auto& v : votes) v = static_cast<int>(sample_index(pi.values(), rng));

    out.push_back({cfg.id_prefix + std::to_string(t), std::move(f), std::move(votes), z});
  }
  return out;
}

namespace {

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

template <class T>
T parse_number(std::string_view field, std::size_t lineno, const char* what) {
  T value{};
  const auto* end = field.data() + field.size();
  const auto res = std::from_chars(field.data(), end, value);
  if (res.ec != std::errc() || res.ptr != end) {
    throw ParseError(lineno, std::string("malformed ") + what + " '" + std::string(field) + "'");
  }
  return value;
}

}  // namespace

void write_dataset(std::ostream& os, const std::vector<StreamSample>& samples) {
  validate_stream(samples);
  const std::size_t k = samples.front().num_classes();
  const int n = samples.front().pool_size();
  nlohmann::ordered_json header{{"format", "consensus-votes"},
                                {"version", kDatasetFormatVersion},
                                {"K", k},
                                {"N", n}};
  os << header.dump() << '\n';
  os << "id";
  for (std::size_t j = 0; j < k; ++j) os << ",p" << j;
  for (int i = 0; i < n; ++i) os << ",v" << i;
  os << '\n';
  for (const auto& s : samples) {
    if (s.id.find_first_of(",\n\r") != std::string::npos) {
      throw ValidationError("sample id '" + s.id + "' contains a delimiter");
    }
    os << s.id;
    for (const double p : s.f.values()) os << ',' << format_double(p);
    for (const int v : s.vote_pool) os << ',' << v;
    os << '\n';
  }
}

void write_dataset_file(const std::string& path, const std::vector<StreamSample>& samples) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  write_dataset(os, samples);
  if (!os) throw std::runtime_error("failed writing " + path);
}

Dataset parse_dataset(std::istream& is) {
  Dataset out;
  std::string line;
  std::size_t lineno = 1;
  if (!std::getline(is, line)) throw ParseError(1, "missing header line");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(line);
    if (header.at("format").get<std::string>() != "consensus-votes") {
      throw ParseError(1, "unknown format tag");
    }
    if (header.at("version").get<int>() != kDatasetFormatVersion) {
      throw ParseError(1, "unsupported format version");
    }
    out.num_classes = header.at("K").get<std::size_t>();
    out.pool_size = header.at("N").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(1, std::string("bad header: ") + e.what());
  }
  if (out.num_classes < 2 || out.pool_size < 1) throw ParseError(1, "header needs K >= 2 and N >= 1");
  const std::size_t k = out.num_classes;
  const auto n = static_cast<std::size_t>(out.pool_size);

  ++lineno;
  if (!std::getline(is, line)) throw ParseError(lineno, "missing column header");
  if (split_csv(line).size() != 1 + k + n) throw ParseError(lineno, "column header has wrong width");

  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != 1 + k + n) {
      throw ParseError(lineno, "expected " + std::to_string(1 + k + n) + " fields, got " +
                                   std::to_string(fields.size()));
    }
    std::vector<double> probs(k);
    double sum = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      probs[j] = parse_number<double>(fields[1 + j], lineno, "probability");
      if (!(probs[j] >= 0.0 && probs[j] <= 1.0)) {
        throw ValidationError("line " + std::to_string(lineno) + ": probability outside [0, 1]");
      }
      sum += probs[j];
    }
    if (std::abs(sum - 1.0) > kDatasetSumTolerance) {
      throw ValidationError("line " + std::to_string(lineno) + ": probabilities sum to " +
                            std::to_string(sum));
    }
    std::vector<int> votes(n);
    for (std::size_t i = 0; i < n; ++i) {
      votes[i] = parse_number<int>(fields[1 + k + i], lineno, "vote");
      if (votes[i] < 0 || static_cast<std::size_t>(votes[i]) >= k) {
        throw ValidationError("line " + std::to_string(lineno) + ": vote " + std::to_string(votes[i]) +
                              " outside [0, K)");
      }
    }
    Simplex f = std::abs(sum - 1.0) > Simplex::kSumTolerance ? Simplex::normalized(std::move(probs))
                                                             : Simplex(std::move(probs));
    out.samples.push_back({std::string(fields[0]), std::move(f), std::move(votes), std::nullopt});
  }
  if (out.samples.empty()) throw ParseError(lineno, "dataset has no rows");
  return out;
}

Dataset load_dataset(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open dataset " + path);
  return parse_dataset(is);
}

std::vector<StreamSample> subsample_experts(const std::vector<StreamSample>& samples, int n_sub,
                                            std::uint64_t seed) {
  validate_stream(samples);
  const int n = samples.front().pool_size();
  if (n_sub < 1 || n_sub > n) {
    throw ArgumentError("cannot keep " + std::to_string(n_sub) + " of " + std::to_string(n) + " experts");
  }
  std::vector<int> columns(static_cast<std::size_t>(n));
  std::iota(columns.begin(), columns.end(), 0);
  Rng column_rng(derive_seed(seed, {0xC01}));
  column_rng.shuffle(std::span<int>(columns));
  columns.resize(static_cast<std::size_t>(n_sub));
  std::sort(columns.begin(), columns.end());

  std::vector<StreamSample> out;
  out.reserve(samples.size());
  for (std::size_t t = 0; t < samples.size(); ++t) {
    StreamSample s = samples[t];
    std::vector<int> kept;
    kept.reserve(columns.size());
    for (const int c : columns) kept.push_back(samples[t].vote_pool[static_cast<std::size_t>(c)]);
    Rng order_rng(derive_seed(seed, {0x0DE, static_cast<std::uint64_t>(t)}));
    order_rng.shuffle(std::span<int>(kept));
    s.vote_pool = std::move(kept);
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace consensus
