#include <benchmark/benchmark.h>

#include "mfe/geometry/builtin.hpp"
#include "mfe/geometry/ops.hpp"
#include "mfe/stats/random.hpp"

using namespace mfe;

namespace {

// Arguments: 0 = closed form, 1 = generic ODE / shooting path.
GeometryOptions path_of(const benchmark::State& state) {
  GeometryOptions o;
  o.path = state.range(0) ? Path::Generic : Path::Auto;
  return o;
}

Vec tangent(const Manifold& m, const Vec& x, double scale) {
  Vec c(m.dim());
  for (int i = 0; i < m.dim(); ++i) c[i] = scale * (0.3 + 0.2 * i);
  return from_frame(m, x, c);
}

template <class Op>
void run_op(benchmark::State& state, const char* name, Op op) {
  const auto m = make_manifold(name);
  const Vec x = m->reference_point();
  const Vec v = tangent(*m, x, 0.8);
  const Vec y = exp_map(*m, x, v);
  const GeometryOptions opt = path_of(state);
  for (auto _ : state) benchmark::DoNotOptimize(op(*m, x, v, y, opt));
}

void BM_Exp(benchmark::State& state, const char* name) {
  run_op(state, name, [](const Manifold& m, const Vec& x, const Vec& v, const Vec&, const GeometryOptions& o) {
    return exp_map(m, x, v, o);
  });
}

void BM_Log(benchmark::State& state, const char* name) {
  run_op(state, name, [](const Manifold& m, const Vec& x, const Vec&, const Vec& y, const GeometryOptions& o) {
    return log_map(m, x, y, o);
  });
}

void BM_Transport(benchmark::State& state, const char* name) {
  run_op(state, name, [](const Manifold& m, const Vec& x, const Vec& v, const Vec& y, const GeometryOptions& o) {
    return parallel_transport(m, x, y, v, o);
  });
}

void BM_NormalCoefficients(benchmark::State& state, const char* name) {
  const auto m = make_manifold(name);
  const Vec x = m->reference_point();
  for (auto _ : state) benchmark::DoNotOptimize(normal_coefficients(*m, x));
}

void BM_DlogBase(benchmark::State& state, const char* name) {
  const auto m = make_manifold(name);
  const Vec x = m->reference_point();
  const Vec y = exp_map(*m, x, tangent(*m, x, 0.5));
  for (auto _ : state) benchmark::DoNotOptimize(dlog_base(*m, x, y));
}

}  // namespace

BENCHMARK_CAPTURE(BM_Exp, hyperbolic, "hyperbolic")->Arg(0)->Arg(1);
BENCHMARK_CAPTURE(BM_Exp, sphere, "sphere")->Arg(0)->Arg(1);
BENCHMARK_CAPTURE(BM_Exp, spd2, "spd2")->Arg(0)->Arg(1);
BENCHMARK_CAPTURE(BM_Log, hyperbolic, "hyperbolic")->Arg(0)->Arg(1);
BENCHMARK_CAPTURE(BM_Log, spd2, "spd2")->Arg(0)->Arg(1);
BENCHMARK_CAPTURE(BM_Transport, hyperbolic, "hyperbolic")->Arg(0)->Arg(1);
BENCHMARK_CAPTURE(BM_Transport, sphere, "sphere")->Arg(0)->Arg(1);
BENCHMARK_CAPTURE(BM_NormalCoefficients, hyperbolic, "hyperbolic");
BENCHMARK_CAPTURE(BM_NormalCoefficients, spd2, "spd2");
BENCHMARK_CAPTURE(BM_DlogBase, hyperbolic, "hyperbolic");
