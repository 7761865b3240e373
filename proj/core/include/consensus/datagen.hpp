#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "consensus/harness.hpp"
#include "consensus/prior.hpp"

namespace consensus {

// Synthetic stream with known generating parameters.
//
// Per sample: z ~ class_prior; the classifier reports c ~ confusion[z] and
// f = normalize(g^(1/temperature)) with g ~ Dirichlet(model_concentration *
// onehot(c) + 1); expert beliefs pi ~ Dirichlet(kappa * onehot(z) + base),
// or pi ~ Dirichlet(alpha_from(f, generative_prior)) when that is set; then
// N ordered votes are drawn i.i.d. from pi.
struct SyntheticConfig {
  std::size_t num_classes = 3;
  int pool_size = 6;
  std::size_t length = 1000;
  std::vector<double> class_prior;              // empty: uniform
  double kappa = 5.0;
  double base = 0.5;
  std::vector<std::vector<double>> confusion;   // empty: identity
  std::vector<double> temperature;              // empty: all ones
  double model_concentration = 10.0;
  std::optional<PriorParams> generative_prior;
  std::uint64_t seed = 0;
  std::string id_prefix = "s";

  void validate() const;
};

std::vector<StreamSample> generate_stream(const SyntheticConfig& cfg);

// Confusion matrix with the given diagonal and the off-diagonal mass spread evenly.
std::vector<std::vector<double>> diagonal_confusion(const std::vector<double>& diagonal);

struct Dataset {
  std::vector<StreamSample> samples;
  std::size_t num_classes = 0;
  int pool_size = 0;
};

inline constexpr int kDatasetFormatVersion = 1;
inline constexpr double kDatasetSumTolerance = 1e-6;

// Line 1: JSON header {"format":"consensus-votes","version":1,"K":..,"N":..}
// Line 2: column names id,p0..p{K-1},v0..v{N-1}
// Then one CSV row per sample; probabilities use shortest round-trip formatting.
void write_dataset(std::ostream& os, const std::vector<StreamSample>& samples);
void write_dataset_file(const std::string& path, const std::vector<StreamSample>& samples);

Dataset parse_dataset(std::istream& is);
Dataset load_dataset(const std::string& path);

// Keeps the same n_sub expert columns (chosen uniformly without replacement)
// for every sample, then shuffles each sample's vote order.
std::vector<StreamSample> subsample_experts(const std::vector<StreamSample>& samples, int n_sub,
                                            std::uint64_t seed);

}  // namespace consensus
