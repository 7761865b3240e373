#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>
#include <span>

namespace consensus {

// SplitMix64 finalizer; also used to hash (seed, t, index, tag) tuples into child seeds.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

// Combine a parent seed with a sequence of stream identifiers into a child seed.
std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path) noexcept;

// Seedable xoshiro256** generator. Every stochastic operation takes one of
// these by reference; concurrent tasks each own a generator built from a
// derived seed rather than sharing an instance.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed = 0) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }
  result_type operator()() noexcept { return next(); }

  std::uint64_t next() noexcept;

  // Child generator for an independent stream; does not advance *this.
  Rng split(std::initializer_list<std::uint64_t> path) const noexcept;

  // Uniform on the open interval (0, 1).
  double uniform() noexcept;
  // Uniform integer in [0, n); n must be positive.
  std::uint64_t uniform_index(std::uint64_t n) noexcept;
  bool bernoulli(double p) noexcept;
  double normal() noexcept;
  // log of a Gamma(shape, 1) variate. Working in log space keeps tiny
  // shapes (where the variate itself underflows to zero) usable.
  double log_gamma_variate(double shape) noexcept;

  template <class T>
  void shuffle(std::span<T> items) noexcept {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(uniform_index(i));
      using std::swap;
      swap(items[i - 1], items[j]);
    }
  }

 private:
  std::uint64_t seed_material_;
  std::uint64_t s_[4];
  // Second Box-Muller variate, handed out by the next normal() call.
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace consensus
