// SPDX-License-Identifier: MIT
// Serial vs OpenMP timings of the parallel kernels: ratio-table build,
// grid evaluation and Monte Carlo paths. Arg 0 = serial, 1 = OpenMP.
#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "degenkernel/duhamel.hpp"
#include "degenkernel/general_kernel.hpp"
#include "degenkernel/model_kernel.hpp"
#include "degenkernel/sde_oracle.hpp"
#include "degenkernel/transform.hpp"

namespace dk = degenkernel;

static void BM_RatioTable(benchmark::State& state) {
  const bool parallel = state.range(0) != 0;
  for (auto _ : state) {
    // fresh kernel each round so the table cache is cold
    dk::PotentialKernel pk(0.0, [](double z) { return 0.5 * std::cos(z) / (1.0 + z); }, 0.625, 4);
    pk.set_parallel(parallel);
    benchmark::DoNotOptimize(dk::q_nu_V(pk, {0.7, 1.3, 0.5}).value);
  }
}
BENCHMARK(BM_RatioTable)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

static void BM_GridEval(benchmark::State& state) {
  const bool parallel = state.range(0) != 0;
  std::vector<double> xs;
  for (int i = 0; i < 64; ++i) xs.push_back(0.05 * std::pow(100.0, i / 63.0));
  std::vector<double> out(xs.size() * xs.size());
  for (auto _ : state) {
    const long n = static_cast<long>(out.size());
#pragma omp parallel for schedule(static) if (parallel)
    for (long i = 0; i < n; ++i) out[i] = dk::q_sigma(-0.3, {xs[i / 64], xs[i % 64], 0.5});
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_GridEval)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

static void BM_MonteCarlo(benchmark::State& state) {
  dk::SimConfig cfg;
  cfg.dt = 1e-3;
  cfg.n_paths = 5000;
  cfg.bridge_correction = true;
  cfg.parallel = state.range(0) != 0;
  for (auto _ : state) benchmark::DoNotOptimize(dk::simulate_model(0.0, {}, 1.0, 1.0, cfg).survival);
}
BENCHMARK(BM_MonteCarlo)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
