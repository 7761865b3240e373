#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace consensus {

// Vote histogram over K >= 2 classes.
class CountVector {
 public:
  CountVector() = default;
  // Zero vector of dimension k.
  explicit CountVector(std::size_t k);
  CountVector(std::initializer_list<int> counts);
  explicit CountVector(std::vector<int> counts);

  std::size_t size() const noexcept { return counts_.size(); }
  int total() const noexcept { return total_; }
  int operator[](std::size_t k) const { return counts_[k]; }
  std::span<const int> values() const noexcept { return counts_; }

  void increment(std::size_t k, int by = 1);
  void decrement(std::size_t k);

  CountVector operator+(const CountVector& other) const;
  // Element-wise difference; throws ArgumentError if any entry would go negative.
  CountVector operator-(const CountVector& other) const;
  bool operator==(const CountVector& other) const noexcept { return counts_ == other.counts_; }
  auto operator<=>(const CountVector& other) const noexcept { return counts_ <=> other.counts_; }

  // True when every entry is <= the corresponding entry of `other`.
  bool dominated_by(const CountVector& other) const;

 private:
  void validate() const;

  std::vector<int> counts_;
  int total_ = 0;
};

// Probability vector over K >= 2 classes; entries non-negative, sum 1 within 1e-9.
class Simplex {
 public:
  static constexpr double kSumTolerance = 1e-9;

  Simplex() = default;
  Simplex(std::initializer_list<double> probs);
  explicit Simplex(std::vector<double> probs);

  // Divides by the sum; rejects negative, non-finite, or all-zero input.
  static Simplex normalized(std::vector<double> weights);
  static Simplex uniform(std::size_t k);
  static Simplex one_hot(std::size_t k, std::size_t index);

  std::size_t size() const noexcept { return probs_.size(); }
  double operator[](std::size_t k) const { return probs_[k]; }
  std::span<const double> values() const noexcept { return probs_; }
  bool operator==(const Simplex& other) const noexcept { return probs_ == other.probs_; }

 private:
  std::vector<double> probs_;
};

// Dirichlet concentration; every entry finite and strictly positive.
class ConcentrationVector {
 public:
  ConcentrationVector() = default;
  ConcentrationVector(std::initializer_list<double> alpha);
  explicit ConcentrationVector(std::vector<double> alpha);

  std::size_t size() const noexcept { return alpha_.size(); }
  double operator[](std::size_t k) const { return alpha_[k]; }
  std::span<const double> values() const noexcept { return alpha_; }
  double total() const noexcept { return total_; }

  // Posterior concentration alpha + counts.
  ConcentrationVector operator+(const CountVector& counts) const;

 private:
  std::vector<double> alpha_;
  double total_ = 0.0;
};

}  // namespace consensus
