#include <benchmark/benchmark.h>

#include "mfe/estimators/frechet.hpp"
#include "mfe/geometry/builtin.hpp"
#include "mfe/models/gaussian.hpp"
#include "mfe/stats/tests.hpp"

using namespace mfe;

namespace {

RiemannianGaussian hyperbolic_model() {
  const auto m = make_manifold("hyperbolic");
  return RiemannianGaussian(m, m->reference_point(), 0.5);
}

void BM_Sample(benchmark::State& state) {
  const auto g = hyperbolic_model();
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(g.sample(static_cast<int>(state.range(0)), ++seed));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Sample)->Arg(1000)->Arg(10000);

void BM_FrechetMean(benchmark::State& state) {
  const auto g = hyperbolic_model();
  const auto xs = g.sample(static_cast<int>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(frechet_mean(g.manifold(), xs));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FrechetMean)->Arg(1000)->Arg(5000);

void BM_InfluenceJacobian(benchmark::State& state) {
  const auto g = hyperbolic_model();
  const auto xs = g.sample(static_cast<int>(state.range(0)), 2);
  for (auto _ : state)
    benchmark::DoNotOptimize(influence_frechet(g.manifold(), xs, g.center(), InfluenceMode::Jacobian));
}
BENCHMARK(BM_InfluenceJacobian)->Arg(1000);

void BM_PartitionFunction(benchmark::State& state) {
  const auto m = make_manifold("hyperbolic");
  for (auto _ : state) benchmark::DoNotOptimize(RiemannianGaussian(m, m->reference_point(), 0.5).log_partition());
}
BENCHMARK(BM_PartitionFunction);

void BM_EnergyStatistic(benchmark::State& state) {
  const auto n = state.range(0);
  Eigen::MatrixXd a = Eigen::MatrixXd::Random(n, 2), b = Eigen::MatrixXd::Random(n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(energy_statistic(a, b));
}
BENCHMARK(BM_EnergyStatistic)->Arg(300)->Arg(2000);

}  // namespace
BENCHMARK_MAIN();
