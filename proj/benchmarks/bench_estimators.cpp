#include <benchmark/benchmark.h>

#include <random>

#include "rsc/estimators.hpp"
#include "rsc/experiments.hpp"

using namespace rsc;

namespace {

SampleSet make_data(int n, int p, double beta, unsigned long long seed) {
  // 0.15 keeps the banded precision positive definite at every size used here.
  Matrix scatter = toeplitz_banded_precision(p, 4, 1.0, 0.15).scatter;
  return mggd_sample(n, Vector::Zero(p), scatter, beta, seed);
}

void BM_FixedPoint(benchmark::State& state) {
  const int p = static_cast<int>(state.range(0));
  SampleSet data = make_data(10 * p, p, 0.5, 1);
  RhoFamily f = RhoFamily::mggd(0.5);
  for (auto _ : state) {
    FitReport r = fit_fixed_point(data, f, {});
    benchmark::DoNotOptimize(r.scatter);
  }
}
BENCHMARK(BM_FixedPoint)->Arg(10)->Arg(20)->Arg(50);

void BM_ChordalMM(benchmark::State& state) {
  const int p = static_cast<int>(state.range(0));
  SampleSet data = make_data(10 * p, p, 0.5, 2);
  SparsityPattern band = banded_pattern(p, 4);
  RhoFamily f = RhoFamily::mggd(0.5);
  for (auto _ : state) {
    FitReport r = fit_chordal_mm(data, f, band, {});
    benchmark::DoNotOptimize(r.scatter);
  }
}
BENCHMARK(BM_ChordalMM)->Arg(10)->Arg(20)->Arg(50);

void BM_WeightedChordalSolve(benchmark::State& state) {
  const int p = static_cast<int>(state.range(0));
  const int n = 10 * p;
  SampleSet data = make_data(n, p, 1.0, 3);
  SparsityPattern band = banded_pattern(p, 4);
  Vector w = Vector::Constant(n, 0.5);
  for (auto _ : state) {
    LowerFactor c = solve_weighted_chordal_ggm(data, w, band);
    benchmark::DoNotOptimize(c.mat);
  }
}
BENCHMARK(BM_WeightedChordalSolve)->Arg(10)->Arg(20)->Arg(50)->Arg(100);

void BM_GeneralGgmSolve(benchmark::State& state) {
  const int p = static_cast<int>(state.range(0));
  const int side = static_cast<int>(std::lround(std::sqrt(double(p))));
  PrecisionModel model = grid_precision(side, side, 0.2);
  SampleSet data = mggd_sample(10 * p, Vector::Zero(p), model.scatter, 1.0, 4);
  SparsityPattern grid = grid_pattern(side, side);
  Vector w = Vector::Constant(data.n(), 0.5);
  for (auto _ : state) {
    GgmSolution sol = solve_weighted_ggm_general(data, w, grid, {});
    benchmark::DoNotOptimize(sol.scatter);
  }
}
BENCHMARK(BM_GeneralGgmSolve)->Arg(9)->Arg(25);

void BM_Sampler(benchmark::State& state) {
  const int p = 20;
  Matrix scatter = toeplitz_banded_precision(p, 4, 1.0, 0.4).scatter;
  for (auto _ : state) {
    SampleSet d = mggd_sample(static_cast<int>(state.range(0)), Vector::Zero(p), scatter, 0.5, 5);
    benchmark::DoNotOptimize(d.rows);
  }
}
BENCHMARK(BM_Sampler)->Arg(1000)->Arg(10000);

}  // namespace

BENCHMARK_MAIN();
