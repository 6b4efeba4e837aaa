// Serial reference vs OpenMP kernels for the sampling estimators.  Both paths
// return identical values; only the wall time differs.
#include <benchmark/benchmark.h>

#include "fwkit/constants.hpp"
#include "fwkit/geometry.hpp"
#include "fwkit/problems.hpp"

using namespace fwkit;

namespace {

Exec exec_of(const benchmark::State& state) { return state.range(0) == 0 ? Exec::serial : Exec::parallel; }

void label(benchmark::State& state) { state.SetLabel(state.range(0) == 0 ? "serial" : "parallel"); }

void BM_mu_fw(benchmark::State& state) {
  const auto spec = generate_problem("random_psd_simplex", 10, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(mu_fw_estimate(spec.objective, spec.poly, spec.xstar, 20000, 0, exec_of(state)));
  }
  label(state);
}

void BM_mu_away(benchmark::State& state) {
  const auto spec = generate_problem("random_psd_simplex", 5, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(mu_away_estimate(spec.objective, spec.poly, 2000, 0, exec_of(state)));
  }
  label(state);
}

void BM_curvature(benchmark::State& state) {
  const auto spec = generate_problem("random_psd_box", 4, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        curvature_sampled(spec.objective, spec.poly, 20000, 0, CurvatureSide::forward, exec_of(state)));
  }
  label(state);
}

void BM_pyramidal_width(benchmark::State& state) {
  const auto poly = VPolytope::simplex(4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(pyramidal_width_search(poly, 500, 0, exec_of(state)));
  }
  label(state);
}

}  // namespace

BENCHMARK(BM_mu_fw)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_mu_away)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_curvature)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_pyramidal_width)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
