#include <benchmark/benchmark.h>

#include <vector>

#include "anharm/catalog.hpp"
#include "anharm/metric.hpp"
#include "anharm/phasespace.hpp"
#include "anharm/quantize.hpp"
#include "anharm/schatten.hpp"
#include "anharm/spectrum.hpp"
#include "anharm/symbols.hpp"

namespace {

using namespace anharm;

void BM_AssembleSplit(benchmark::State& state) {
  const auto spec = make_builtin("quartic-1d");
  const Grid1D g(8.0, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(assemble_split(spec, g).data.data());
}
BENCHMARK(BM_AssembleSplit)->Arg(256)->Arg(512)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_Eigensolve(benchmark::State& state) {
  const auto spec = make_builtin("harmonic-1d");
  const auto M = assemble_split(spec, Grid1D(12.0, static_cast<int>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(eigensolve(M).values.data());
}
BENCHMARK(BM_Eigensolve)->Arg(256)->Arg(512)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_QuantizeWeyl(benchmark::State& state) {
  const PhaseSymbol a = PhaseSymbol::from_expression(Expression::parse("exp(-(x^2 + xi^2))"), 1, 0.0);
  const Grid1D g(8.0, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(quantize_t(a, 0.5, g).data.data());
}
BENCHMARK(BM_QuantizeWeyl)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_ExpressionEval(benchmark::State& state) {
  const Expression e = Expression::parse("x^2 + 0.1*x^4 + exp(-x^2)");
  const std::vector<double> x{1.3};
  for (auto _ : state) benchmark::DoNotOptimize(e(x, {}));
}
BENCHMARK(BM_ExpressionEval);

void BM_IntegralImu(benchmark::State& state) {
  const auto spec = make_builtin("quartic-1d");
  for (auto _ : state) benchmark::DoNotOptimize(integral_Imu(spec, 0.9).value);
}
BENCHMARK(BM_IntegralImu)->Unit(benchmark::kMillisecond);

void BM_Slowness(benchmark::State& state) {
  const auto spec = make_builtin("frac-rel-1d");
  MetricOptions o;
  o.trials = static_cast<std::uint64_t>(state.range(0));
  o.doublings = 0;
  for (auto _ : state) benchmark::DoNotOptimize(check_slowness(spec, o).verdict);
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Slowness)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_SchattenContinued(benchmark::State& state) {
  std::vector<double> s;
  for (int k = 1; k <= 2000; ++k) s.push_back(1.0 / (2.0 * k));
  const auto series = SingularValueSeries::from_values(s);
  for (auto _ : state) benchmark::DoNotOptimize(schatten_norm(series, 2.0, SchattenMode::continued).norm);
}
BENCHMARK(BM_SchattenContinued);

}  // namespace

BENCHMARK_MAIN();
