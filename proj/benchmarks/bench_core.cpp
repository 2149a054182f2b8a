#include <benchmark/benchmark.h>

#include <cmath>

#include "confvisc/conformal.hpp"
#include "confvisc/movingsphere.hpp"
#include "confvisc/rng.hpp"
#include "confvisc/viscosity.hpp"

using namespace confvisc;

static void BM_EigenSym(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(1);
  Mat m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = rng.uniform(-1.0, 1.0);
  const SymMatrix s = SymMatrix::from_upper(m);
  for (auto _ : state) benchmark::DoNotOptimize(eigen_sym(s));
}
BENCHMARK(BM_EigenSym)->Arg(3)->Arg(6);

static void BM_EvaluateOperator(benchmark::State& state) {
  const int n = 4;
  const OperatorSpec spec = OperatorSpec::sigma_k_root(n, 2);
  const AnalyticField v = AnalyticField::bubble(n, tuned_bubble(spec, 1.0, Vec::Zero(n)));
  Vec x = Vec::Constant(n, 0.3);
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_operator(v, x, spec));
}
BENCHMARK(BM_EvaluateOperator);

static GridField lipschitz_grid(int nodes) {
  const GridSpec g = GridSpec::cube(2, -1.0, 1.0, nodes);
  std::vector<double> v(g.size());
  for (std::size_t f = 0; f < g.size(); ++f) {
    const Vec x = g.coords(f);
    v[f] = std::abs(x[0]) + 0.5 * std::abs(x[1] - 0.2) - 0.3 * std::max(0.0, x[0] + x[1]);
  }
  return GridField(g, std::move(v), GridField::Kind::Psi);
}

static void BM_SupConvolve201(benchmark::State& state) {
  const GridField psi = lipschitz_grid(201);
  for (auto _ : state) benchmark::DoNotOptimize(sup_convolve(psi, 0.25));
}
BENCHMARK(BM_SupConvolve201)->Unit(benchmark::kMillisecond);

static void BM_ConcaveEnvelope(benchmark::State& state) {
  const GridField psi = lipschitz_grid(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(concave_envelope(psi));
}
BENCHMARK(BM_ConcaveEnvelope)->Arg(41)->Arg(101)->Unit(benchmark::kMillisecond);

static void BM_CriticalRadius(benchmark::State& state) {
  const OperatorSpec spec = OperatorSpec::sigma_k_root(3, 1);
  const BubbleParams p = tuned_bubble(spec, 1.0, Vec::Zero(3));
  const ScalarField v = AnalyticField::bubble(3, p);
  const Vec x = Vec::Unit(3, 1);
  for (auto _ : state) benchmark::DoNotOptimize(critical_radius(v, x, 100.0 / p.b));
}
BENCHMARK(BM_CriticalRadius)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
