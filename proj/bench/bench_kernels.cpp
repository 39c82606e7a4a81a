#include <benchmark/benchmark.h>

#include "jamgame/network_sim.hpp"
#include "jamgame/proactive.hpp"
#include "jamgame/reactive.hpp"

using namespace jamgame;

namespace {

network::RoundPolicies saddle_policies(const ScalarGaussian& g, const GameCosts& costs) {
  const auto s = solve_saddle(g, costs);
  return {s.policy(), s.estimator, network::ProactiveJammer{s.phi_star}};
}

void BM_EstimateCostSerial(benchmark::State& state) {
  const ScalarGaussian g(0.0, 1.0);
  const GameCosts costs(1.0, 0.5);
  const network::NetworkConfig net(20, 5);
  const auto policies = saddle_policies(g, costs);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        network::estimate_cost_serial(g, costs, net, policies, static_cast<std::size_t>(state.range(0)), 7));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_EstimateCostParallel(benchmark::State& state) {
  const ScalarGaussian g(0.0, 1.0);
  const GameCosts costs(1.0, 0.5);
  const network::NetworkConfig net(20, 5);
  const auto policies = saddle_policies(g, costs);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        network::estimate_cost(g, costs, net, policies, static_cast<std::size_t>(state.range(0)), 7));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

reactive::SampledModel vector_model(std::size_t samples) {
  std::vector<double> vars(10, 1.0);
  for (std::size_t i = 5; i < 10; ++i) vars[i] = 2.0;
  return reactive::SampledModel(DiagonalGaussian(std::vector<double>(10, 0.0), vars), GameCosts(1.0, 1.0),
                                samples, 3);
}

void BM_SampledEvaluateSerial(benchmark::State& state) {
  const auto model = vector_model(static_cast<std::size_t>(state.range(0)));
  const auto symbols = ReprSymbols::at(model.mean());
  const reactive::ReactivePolicy policy{0.3, 0.6};
  for (auto _ : state) benchmark::DoNotOptimize(model.evaluate_serial(symbols, policy));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_SampledEvaluateParallel(benchmark::State& state) {
  const auto model = vector_model(static_cast<std::size_t>(state.range(0)));
  const auto symbols = ReprSymbols::at(model.mean());
  const reactive::ReactivePolicy policy{0.3, 0.6};
  for (auto _ : state) benchmark::DoNotOptimize(model.evaluate(symbols, policy));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_EstimateCostSerial)->Arg(1 << 16)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EstimateCostParallel)->Arg(1 << 16)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SampledEvaluateSerial)->Arg(10'000)->Arg(100'000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SampledEvaluateParallel)->Arg(10'000)->Arg(100'000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
