#include <cmath>
#include <vector>

#include "consensus/distributions.hpp"
#include "consensus/errors.hpp"
#include "consensus/inference.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace consensus;

namespace {

double max_gap(const ConsensusPosterior& a, const ConsensusPosterior& b) {
  double g = 0.0;
  for (std::size_t k = 0; k < a.probs.size(); ++k) g = std::max(g, std::abs(a.probs[k] - b.probs[k]));
  return g;
}

}  // namespace

TEST_SUITE("inference") {
  TEST_CASE("exhausted pool gives a point mass") {
    Rng rng(50);
    const auto p = consensus_posterior_finexp({2, 1}, {1, 1}, 3, 100, rng);
    CHECK(p.probs[0] == 1.0);
    CHECK(p.acc == 1.0);
    CHECK(p.argmax_class == 0);
  }

  TEST_CASE("finite-pool posterior against hand enumeration") {
    const auto exact = consensus_posterior_exact_finexp({1, 0}, {1, 1}, 3);
    CHECK(exact.probs[0] == doctest::Approx(5.0 / 6.0).epsilon(1e-14));
    Rng rng(51);
    const auto mc = consensus_posterior_finexp({1, 0}, {1, 1}, 3, 100000, rng);
    CHECK(std::abs(mc.probs[0] - 5.0 / 6.0) < 0.01);
    const auto sym = consensus_posterior_finexp({0, 0}, {1, 1}, 1, 100000, rng);
    CHECK(std::abs(sym.probs[0] - 0.5) < 0.01);
  }

  TEST_CASE("exact posterior agrees with the Polya urn oracle") {
    Rng rng(52);
    for (int trial = 0; trial < 60; ++trial) {
      const std::size_t k = 2 + rng.uniform_index(2);
      const int pool = 1 + static_cast<int>(rng.uniform_index(6));
      std::vector<double> alpha(k);
      for (auto& a : alpha) a = 0.1 + 3.0 * rng.uniform();
      std::vector<int> votes(k, 0);
      const int seen = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(pool + 1)));
      for (int i = 0; i < seen; ++i) ++votes[rng.uniform_index(k)];
      const auto ref = oracle::consensus_by_urn(votes, pool, alpha);
      const auto exact = consensus_posterior_exact_finexp(CountVector(votes), ConcentrationVector(alpha), pool);
      double sum = 0.0;
      for (std::size_t j = 0; j < k; ++j) {
        CHECK(std::abs(exact.probs[j] - static_cast<double>(ref[j])) < 1e-12);
        sum += exact.probs[j];
      }
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-15));
    }
  }

  TEST_CASE("even symmetric pools split tie mass exactly") {
    const auto p = consensus_posterior_exact_finexp({0, 0}, {1, 1}, 4);
    CHECK(p.probs[0] == 0.5);
    CHECK(p.probs[1] == 0.5);
  }

  TEST_CASE("infinite-pool posterior") {
    Rng rng(53);
    auto p = consensus_posterior_infexp({0, 0}, {1, 1}, 100000, rng);
    CHECK(std::abs(p.probs[0] - 0.5) < 0.01);
    p = consensus_posterior_infexp({99, 0}, {1, 1}, 100000, rng);
    CHECK(p.probs[0] >= 0.999);
    // Beta(2, 1) exceeds one half with probability 3/4.
    p = consensus_posterior_infexp({1, 0}, {1, 1}, 100000, rng);
    CHECK(std::abs(p.probs[0] - 0.75) < 0.01);
  }

  TEST_CASE("finite pool approaches the infinite limit as the pool grows") {
    const CountVector votes{3, 2, 1};
    const ConcentrationVector alpha{1.0, 1.5, 0.8};
    Rng rng(54);
    const auto inf = consensus_posterior_infexp(votes, alpha, 200000, rng);
    const double gap_small = max_gap(consensus_posterior_finexp(votes, alpha, 8, 200000, rng), inf);
    const double gap_large = max_gap(consensus_posterior_finexp(votes, alpha, 500, 200000, rng), inf);
    CHECK(gap_large < gap_small);
    CHECK(gap_large <= 0.02);
  }

  TEST_CASE("an extra vote never lowers that class's consensus probability") {
    for (std::size_t k = 2; k <= 3; ++k) {
      const std::vector<double> alpha_raw = k == 2 ? std::vector<double>{0.7, 1.6} : std::vector<double>{0.7, 1.6, 1.1};
      const ConcentrationVector alpha(alpha_raw);
      for (int pool = 1; pool <= 6; ++pool) {
        for (int seen = 0; seen < pool; ++seen) {
          for_each_composition(seen, k, [&](const CountVector& votes) {
            const auto before = consensus_posterior_exact_finexp(votes, alpha, pool);
            for (std::size_t j = 0; j < k; ++j) {
              CountVector more = votes;
              more.increment(j);
              const auto after = consensus_posterior_exact_finexp(more, alpha, pool);
              CHECK(after.probs[j] >= before.probs[j] - 1e-12);
            }
          });
        }
      }
    }
  }

  TEST_CASE("Monte-Carlo error shrinks with the sample count") {
    const CountVector votes{1, 1, 0};
    const ConcentrationVector alpha{0.8, 1.2, 2.0};
    const auto exact = consensus_posterior_exact_finexp(votes, alpha, 9);
    auto rms = [&](int m, int reps) {
      double s = 0.0;
      for (int r = 0; r < reps; ++r) {
        Rng rng(1000 + static_cast<std::uint64_t>(r));
        const double g = max_gap(consensus_posterior_finexp(votes, alpha, 9, m, rng), exact);
        s += g * g;
      }
      return std::sqrt(s / reps);
    };
    const double coarse = rms(10000, 20);
    const double fine = rms(1000000, 4);
    CHECK(coarse / fine > 4.0);
    CHECK(coarse / fine < 25.0);
  }

  TEST_CASE("support limits are enforced") {
    CHECK_THROWS_AS(consensus_posterior_exact_finexp({0, 0, 0, 0}, {1, 1, 1, 1}, 400, 1000), SupportTooLarge);
  }

  TEST_CASE("prediction and tie breaking") {
    Rng rng(55);
    CHECK(predict(ConsensusPosterior::from_weights({0.9, 0.1}), rng) == 0);
    CHECK(predict(ConsensusPosterior::from_weights({0.0, 0.0, 1.0}), rng) == 2);
    int zeros = 0;
    const auto tie = ConsensusPosterior::from_weights({0.5, 0.5});
    for (int i = 0; i < 100000; ++i) zeros += predict(tie, rng) == 0;
    CHECK(std::abs(zeros / 1e5 - 0.5) < 0.01);
    const auto op = observed_plurality({2, 2, 1});
    CHECK(op.probs[0] == 0.5);
    CHECK(op.probs[2] == 0.0);
  }

  TEST_CASE("posteriors are reproducible under a seed") {
    Rng a(56);
    Rng b(56);
    const auto pa = consensus_posterior_finexp({1, 0, 1}, {0.5, 1, 2}, 7, 500, a);
    const auto pb = consensus_posterior_finexp({1, 0, 1}, {0.5, 1, 2}, 7, 500, b);
    CHECK(pa.probs == pb.probs);
  }
}
