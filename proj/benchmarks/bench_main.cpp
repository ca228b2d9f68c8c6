#include <benchmark/benchmark.h>

#include "strat2d/dispersive.hpp"
#include "strat2d/initial_data.hpp"
#include "strat2d/littlewood_paley.hpp"
#include "strat2d/solver.hpp"

namespace {

using namespace strat2d;

std::pair<SpectralField, SpectralField> data(const Grid& grid) {
  InitialDataSpec spec;
  spec.preset = "random-spectrum";
  spec.seed = 11;
  spec.xi_max = 8;
  return make_initial_data(grid, spec);
}

void BM_Fft2dRoundTrip(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  ComplexBuffer buf(static_cast<std::size_t>(n) * n, {1.0, 0.0});
  const double scale = 1.0 / (static_cast<double>(n) * n);
  for (auto _ : state) {
    fft2d_forward(buf, n);
    fft2d_backward(buf, n);
    for (auto& c : buf) c *= scale;
    benchmark::DoNotOptimize(buf.data());
  }
}
BENCHMARK(BM_Fft2dRoundTrip)->RangeMultiplier(2)->Range(64, 512);

void BM_Rhs(benchmark::State& state) {
  const Grid grid(GridSpec{static_cast<int>(state.range(0)), 1.0, 2.0 / 3.0});
  auto [w, r] = data(grid);
  const SimState s = make_state(w, r, 16.0);
  for (auto _ : state) benchmark::DoNotOptimize(rhs(s));
}
BENCHMARK(BM_Rhs)->RangeMultiplier(2)->Range(64, 256);

void BM_Step(benchmark::State& state) {
  const Grid grid(GridSpec{static_cast<int>(state.range(0)), 1.0, 2.0 / 3.0});
  auto [w, r] = data(grid);
  SimState s = make_state(w, r, 64.0);
  const Scheme scheme = state.range(1) == 0 ? Scheme::Rk4 : Scheme::IntegratingFactor;
  Stepper stepper(StepperConfig{scheme, DtPolicy::Fixed, 1e-3});
  for (auto _ : state) stepper.advance(s, 1e-3);
  state.SetLabel(scheme == Scheme::Rk4 ? "rk4" : "integrating-factor");
}
BENCHMARK(BM_Step)->ArgsProduct({{64, 128, 256}, {0, 1}});

void BM_BesovNorm(benchmark::State& state) {
  const Grid grid(GridSpec{static_cast<int>(state.range(0)), 1.0, 2.0 / 3.0});
  const DyadicBank bank(grid);
  auto [w, r] = data(grid);
  const double p = state.range(1) == 0 ? 2.0 : std::numeric_limits<double>::infinity();
  for (auto _ : state) benchmark::DoNotOptimize(besov_norm(w, BesovSpec{1.0, p, 1.0, true}, bank));
  state.SetLabel(state.range(1) == 0 ? "p=2" : "p=inf");
}
BENCHMARK(BM_BesovNorm)->ArgsProduct({{64, 128, 256}, {0, 1}});

void BM_SemigroupApply(benchmark::State& state) {
  const Grid grid(GridSpec{static_cast<int>(state.range(0)), 1.0, 2.0 / 3.0});
  auto [w, r] = data(grid);
  for (auto _ : state) benchmark::DoNotOptimize(semigroup_apply(w, 0.3, 64.0, 1));
}
BENCHMARK(BM_SemigroupApply)->RangeMultiplier(2)->Range(64, 256);

}  // namespace

BENCHMARK_MAIN();
