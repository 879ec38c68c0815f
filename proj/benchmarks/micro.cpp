#include <benchmark/benchmark.h>

#include "nidreg/dgp.hpp"
#include "nidreg/npiv.hpp"
#include "nidreg/spectral.hpp"

using namespace nidreg;

namespace {

npiv::NpivSample design_sample(std::size_t n) {
  static const dgp::NidDensity density(dgp::DgpConfig{});
  return dgp::sample(density, n, 11);
}

void BM_KdeJoint(benchmark::State& state) {
  const auto s = design_sample(static_cast<std::size_t>(state.range(0)));
  const Grid grid = Grid::midpoint(100);
  for (auto _ : state) benchmark::DoNotOptimize(npiv::kde_joint(s, npiv::KernelSpec{}, grid));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_KdeJoint)->Arg(1000)->Arg(5000);

void BM_Svd(benchmark::State& state) {
  const Grid grid = Grid::midpoint(static_cast<std::size_t>(state.range(0)));
  const auto op = npiv::build_operator(npiv::kde_joint(design_sample(2000), npiv::KernelSpec{}, grid));
  for (auto _ : state) benchmark::DoNotOptimize(svd(op));
}
BENCHMARK(BM_Svd)->Arg(50)->Arg(100)->Arg(200);

void BM_Regularize(benchmark::State& state) {
  const Grid grid = Grid::midpoint(100);
  const auto s = design_sample(2000);
  const auto cache = svd(npiv::build_operator(npiv::kde_joint(s, npiv::KernelSpec{}, grid)));
  const auto r = npiv::estimate_r(s, npiv::KernelSpec{}, grid);
  const FilterSpec spec = state.range(0) == 0 ? FilterSpec::tikhonov(0.003) : FilterSpec::landweber(1.0, 0.001);
  for (auto _ : state) benchmark::DoNotOptimize(regularize(cache, r, spec));
}
BENCHMARK(BM_Regularize)->Arg(0)->Arg(1);

void BM_NpivFit(benchmark::State& state) {
  const Grid grid = Grid::midpoint(100);
  const auto s = design_sample(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(npiv::npiv_fit(s, npiv::KernelSpec{}, FilterSpec::tikhonov(0.003), grid));
  }
}
BENCHMARK(BM_NpivFit)->Arg(1000)->Arg(5000);

}  // namespace

BENCHMARK_MAIN();
