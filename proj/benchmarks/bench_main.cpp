#include <benchmark/benchmark.h>

#include <vector>

#include "consensus/distributions.hpp"
#include "consensus/inference.hpp"
#include "consensus/likelihood.hpp"
#include "consensus/optimizer.hpp"
#include "consensus/prior.hpp"

using namespace consensus;

namespace {

Simplex random_simplex(std::size_t k, Rng& rng) {
  std::vector<double> raw(k);
  for (auto& v : raw) v = 0.05 + rng.uniform();
  return Simplex::normalized(std::move(raw));
}

WindowDataset make_window(std::size_t k, int pool, std::size_t size) {
  Rng rng(7);
  WindowDataset w(pool, 0);
  for (std::size_t i = 0; i < size; ++i) {
    const int n = 1 + static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(pool)));
    w.push(ObservationRecord(random_simplex(k, rng), multinomial_sample(n, random_simplex(k, rng), rng)));
  }
  return w;
}

const PriorParams kParams{3.0, 0.5, {1.2, 0.8, 1.0, 1.5, 0.7}};

void BM_DirMultLogPmf(benchmark::State& state) {
  const ConcentrationVector alpha(std::vector<double>{1.3, 0.4, 2.2, 0.9, 1.1});
  const CountVector x{3, 0, 4, 1, 2};
  for (auto _ : state) benchmark::DoNotOptimize(dirmult_logpmf(x, 10, alpha));
}
BENCHMARK(BM_DirMultLogPmf);

void BM_FinExpLoglikIS(benchmark::State& state) {
  const ObservationRecord rec(Simplex{0.1, 0.2, 0.3, 0.25, 0.15}, CountVector{1, 0, 2, 0, 0});
  Rng rng(11);
  const auto m = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(finexp_loglik_is(rec, kParams, 7, m, rng));
}
BENCHMARK(BM_FinExpLoglikIS)->Arg(64)->Arg(1024);

void BM_PosteriorMC(benchmark::State& state) {
  const CountVector votes{1, 0, 2, 0, 0};
  const ConcentrationVector alpha(std::vector<double>{1.3, 0.4, 2.2, 0.9, 1.1});
  Rng rng(13);
  const bool finite = state.range(0) == 1;
  for (auto _ : state) {
    if (finite) {
      benchmark::DoNotOptimize(consensus_posterior_finexp(votes, alpha, 7, kDefaultInferenceSamples, rng));
    } else {
      benchmark::DoNotOptimize(consensus_posterior_infexp(votes, alpha, kDefaultInferenceSamples, rng));
    }
  }
}
BENCHMARK(BM_PosteriorMC)->Arg(0)->Arg(1)->ArgNames({"finite"});

void BM_MapGradient(benchmark::State& state) {
  const auto window = make_window(5, 7, 500);
  const bool finite = state.range(0) == 1;
  const auto hyper = HyperPriorConfig::defaults_for(finite ? Regime::FinExp : Regime::InfExp);
  MapObjective objective(window, hyper, 64);
  Rng rng(17);
  objective.resample(rng);
  for (auto _ : state) benchmark::DoNotOptimize(objective.evaluate(kParams));
}
BENCHMARK(BM_MapGradient)->Arg(0)->Arg(1)->ArgNames({"finite"});

void BM_MapFit(benchmark::State& state) {
  const auto window = make_window(5, 7, 500);
  const auto hyper = HyperPriorConfig::defaults_for(state.range(0) == 1 ? Regime::FinExp : Regime::InfExp);
  for (auto _ : state) {
    Rng rng(19);
    benchmark::DoNotOptimize(fit_map(window, hyper, {}, prior_mode(hyper, 5), rng));
  }
}
BENCHMARK(BM_MapFit)->Arg(0)->Arg(1)->ArgNames({"finite"})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
