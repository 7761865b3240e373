#include "consensus/types.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "consensus/errors.hpp"

namespace consensus {

CountVector::CountVector(std::size_t k) : counts_(k, 0) {
  if (k < 2) throw ArgumentError("CountVector needs K >= 2, got " + std::to_string(k));
}

CountVector::CountVector(std::initializer_list<int> counts) : CountVector(std::vector<int>(counts)) {}

CountVector::CountVector(std::vector<int> counts) : counts_(std::move(counts)) {
  validate();
  total_ = std::accumulate(counts_.begin(), counts_.end(), 0);
}

void CountVector::validate() const {
  if (counts_.size() < 2) throw ArgumentError("CountVector needs K >= 2");
  for (const int c : counts_) {
    if (c < 0) throw ArgumentError("CountVector entries must be non-negative");
  }
}

void CountVector::increment(std::size_t k, int by) {
  if (counts_.at(k) + by < 0) throw ArgumentError("CountVector entry would become negative");
  counts_[k] += by;
  total_ += by;
}

void CountVector::decrement(std::size_t k) { increment(k, -1); }

CountVector CountVector::operator+(const CountVector& other) const {
  if (size() != other.size()) throw ArgumentError("CountVector dimension mismatch");
  std::vector<int> out(counts_);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] += other.counts_[k];
  return CountVector(std::move(out));
}

CountVector CountVector::operator-(const CountVector& other) const {
  if (size() != other.size()) throw ArgumentError("CountVector dimension mismatch");
  std::vector<int> out(counts_);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] -= other.counts_[k];
  return CountVector(std::move(out));
}

bool CountVector::dominated_by(const CountVector& other) const {
  if (size() != other.size()) throw ArgumentError("CountVector dimension mismatch");
  for (std::size_t k = 0; k < size(); ++k) {
    if (counts_[k] > other.counts_[k]) return false;
  }
  return true;
}

Simplex::Simplex(std::initializer_list<double> probs) : Simplex(std::vector<double>(probs)) {}

Simplex::Simplex(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.size() < 2) throw ArgumentError("Simplex needs K >= 2");
  double sum = 0.0;
  for (const double p : probs_) {
    if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
      throw ArgumentError("Simplex entries must lie in [0, 1], got " + std::to_string(p));
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > kSumTolerance) {
    throw ArgumentError("Simplex entries must sum to 1, got " + std::to_string(sum));
  }
}

Simplex Simplex::normalized(std::vector<double> weights) {
  double sum = 0.0;
  for (const double w : weights) {
    if (!std::isfinite(w) || w < 0.0) throw ArgumentError("weights must be finite and non-negative");
    sum += w;
  }
  if (!(sum > 0.0)) throw ArgumentError("weights must not all be zero");
  for (double& w : weights) w /= sum;
  return Simplex(std::move(weights));
}

Simplex Simplex::uniform(std::size_t k) {
  return Simplex(std::vector<double>(k, 1.0 / static_cast<double>(k)));
}

Simplex Simplex::one_hot(std::size_t k, std::size_t index) {
  std::vector<double> p(k, 0.0);
  p.at(index) = 1.0;
  return Simplex(std::move(p));
}

ConcentrationVector::ConcentrationVector(std::initializer_list<double> alpha)
    : ConcentrationVector(std::vector<double>(alpha)) {}

ConcentrationVector::ConcentrationVector(std::vector<double> alpha) : alpha_(std::move(alpha)) {
  if (alpha_.size() < 2) throw ArgumentError("ConcentrationVector needs K >= 2");
  for (const double a : alpha_) {
    if (!std::isfinite(a) || !(a > 0.0)) {
      throw ArgumentError("concentration entries must be finite and > 0, got " + std::to_string(a));
    }
    total_ += a;
  }
}

ConcentrationVector ConcentrationVector::operator+(const CountVector& counts) const {
  if (counts.size() != size()) throw ArgumentError("dimension mismatch in alpha + counts");
  std::vector<double> out(alpha_);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] += counts[k];
  return ConcentrationVector(std::move(out));
}

}  // namespace consensus
