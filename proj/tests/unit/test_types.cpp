#include <cmath>

#include "consensus/errors.hpp"
#include "consensus/types.hpp"
#include "doctest.h"

using namespace consensus;

TEST_SUITE("types") {
  TEST_CASE("count vector keeps its total in step with edits") {
    CountVector c{1, 0, 2};
    CHECK(c.total() == 3);
    c.increment(1, 2);
    c.decrement(0);
    CHECK(c == CountVector{0, 2, 2});
    CHECK(c.total() == 4);
    CHECK_THROWS_AS(c.decrement(0), ArgumentError);
  }

  TEST_CASE("count vector rejects negative entries and K < 2") {
    CHECK_THROWS_AS(CountVector({1, -1}), ArgumentError);
    CHECK_THROWS_AS(CountVector({3}), ArgumentError);
  }

  TEST_CASE("count vector arithmetic") {
    const CountVector a{1, 2};
    const CountVector b{0, 1};
    CHECK(a + b == CountVector{1, 3});
    CHECK(a - b == CountVector{1, 1});
    CHECK_THROWS_AS(b - a, ArgumentError);
    CHECK(b.dominated_by(a));
    CHECK_FALSE(a.dominated_by(b));
    CHECK_THROWS_AS((a + CountVector{1, 1, 1}), ArgumentError);
  }

  TEST_CASE("simplex validation") {
    CHECK_NOTHROW(Simplex{0.25, 0.75});
    CHECK_THROWS_AS(Simplex({0.5, 0.6}), ArgumentError);
    CHECK_THROWS_AS(Simplex({-0.1, 1.1}), ArgumentError);
    CHECK_THROWS_AS(Simplex({1.0}), ArgumentError);
    const auto s = Simplex::normalized({1.0, 3.0});
    CHECK(s[0] == doctest::Approx(0.25));
    CHECK_THROWS_AS(Simplex::normalized({0.0, 0.0}), ArgumentError);
    CHECK(Simplex::one_hot(3, 1)[1] == 1.0);
    CHECK(Simplex::uniform(4)[2] == doctest::Approx(0.25));
  }

  TEST_CASE("concentration vector must be strictly positive") {
    CHECK_THROWS_AS(ConcentrationVector({1.0, 0.0}), ArgumentError);
    CHECK_THROWS_AS(ConcentrationVector({1.0, std::nan("")}), ArgumentError);
    const ConcentrationVector a{0.5, 1.5};
    CHECK(a.total() == doctest::Approx(2.0));
    const auto post = a + CountVector{2, 0};
    CHECK(post[0] == doctest::Approx(2.5));
    CHECK(post.total() == doctest::Approx(4.0));
  }
}
