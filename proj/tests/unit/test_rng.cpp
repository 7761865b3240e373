#include <algorithm>
#include <cmath>
#include <vector>

#include "consensus/rng.hpp"
#include "doctest.h"

using namespace consensus;

TEST_SUITE("rng") {
  TEST_CASE("same seed gives the same sequence") {
    Rng a(42);
    Rng b(42);
    for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
    Rng c(43);
    Rng d(42);
    int same = 0;
    for (int i = 0; i < 100; ++i) same += c.next() == d.next();
    CHECK(same == 0);
  }

  TEST_CASE("split streams are reproducible and leave the parent untouched") {
    Rng parent(7);
    Rng child1 = parent.split({1, 2});
    Rng child2 = parent.split({1, 2});
    Rng other = parent.split({2, 1});
    CHECK(child1.next() == child2.next());
    CHECK(child1.next() != other.next());
    Rng fresh(7);
    CHECK(parent.next() == fresh.next());
    CHECK(derive_seed(5, {1}) != derive_seed(5, {2}));
    CHECK(derive_seed(5, {1, 2}) != derive_seed(5, {2, 1}));
  }

  TEST_CASE("uniform stays in the open unit interval with mean one half") {
    Rng rng(1);
    double sum = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
      const double u = rng.uniform();
      REQUIRE(u > 0.0);
      REQUIRE(u < 1.0);
      sum += u;
    }
    CHECK(sum / n == doctest::Approx(0.5).epsilon(0.01));
  }

  TEST_CASE("uniform_index is unbiased over a small range") {
    Rng rng(2);
    std::vector<int> counts(7, 0);
    const int n = 70000;
    for (int i = 0; i < n; ++i) ++counts[rng.uniform_index(7)];
    for (const int c : counts) CHECK(std::abs(c - 10000) < 500);
  }

  TEST_CASE("normal variates have zero mean and unit variance") {
    Rng rng(3);
    double s = 0.0;
    double s2 = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
      const double z = rng.normal();
      s += z;
      s2 += z * z;
    }
    CHECK(std::abs(s / n) < 0.01);
    CHECK(std::abs(s2 / n - 1.0) < 0.02);
  }

  TEST_CASE("gamma variates match shape for shapes above and below one") {
    for (const double shape : {0.3, 1.0, 4.5}) {
      Rng rng(4);
      double s = 0.0;
      const int n = 200000;
      for (int i = 0; i < n; ++i) s += std::exp(rng.log_gamma_variate(shape));
      CHECK(s / n == doctest::Approx(shape).epsilon(0.02));
    }
    Rng rng(5);
    for (int i = 0; i < 1000; ++i) CHECK(std::isfinite(rng.log_gamma_variate(1e-3)));
  }

  TEST_CASE("shuffle is a permutation") {
    Rng rng(6);
    std::vector<int> v{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
    rng.shuffle(std::span<int>(v));
    std::vector<int> sorted = v;
    std::sort(sorted.begin(), sorted.end());
    for (int i = 0; i < 10; ++i) CHECK(sorted[static_cast<std::size_t>(i)] == i);
  }
}
