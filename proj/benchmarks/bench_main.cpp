#include <benchmark/benchmark.h>

#include <vector>

#include "onoff/bbm/particle_system.hpp"
#include "onoff/dual/pde.hpp"
#include "onoff/dual/picard.hpp"
#include "onoff/feller/feller.hpp"

namespace {

using namespace onoff;

const ModelParams kParams{1.0, 1.0, 0.5, 1};

// Events per second of the particle simulator at a steady population.
void BM_ParticleEvents(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  RandomSource rng(1, 0);
  bbm::ParticleSystem sys(kParams, 0.1);
  const double origin[] = {0.0};
  for (std::size_t i = 0; i < n; ++i) sys.add(origin, i % 3 ? State::active : State::dormant);
  for (auto _ : state) {
    if (sys.size() < n / 2) sys.add(origin, State::active);
    benchmark::DoNotOptimize(sys.next_event(rng));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_ParticleEvents)->Arg(100)->Arg(10000);

void BM_FellerSteps(benchmark::State& state) {
  RandomSource rng(2, 0);
  const feller::SdeScheme scheme;
  feller::FellerState s{1.0, 1.0};
  for (auto _ : state) {
    s = feller::feller_step(s, kParams, scheme, rng).state;
    benchmark::DoNotOptimize(s);
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_FellerSteps);

void BM_FellerEnsemble(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    auto ens = feller::simulate_feller_ensemble(kParams, {1.0, 1.0}, {}, 1.0, n,
                                                {.master_seed = 3, .observation_times = {1.0}});
    benchmark::DoNotOptimize(ens.p.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n) * 1000);
}
BENCHMARK(BM_FellerEnsemble)->Arg(1000)->Unit(benchmark::kMillisecond);

// One unit of dual time on the default grid (SSP-RK3 at the CFL limit).
void BM_DualPde(benchmark::State& state) {
  const auto phi = TestFunction::gaussian(1.0, 1.0, {0.0}, 0.5);
  const auto grid = dual::auto_grid(phi, 1.0, 0.02);
  const auto init = dual::initial_dual_data(phi, grid, dual::DualVariant::sbm, 0.0);
  for (auto _ : state) {
    auto f = dual::evolve_dual(kParams, init, 1.0, dual::DualVariant::sbm);
    benchmark::DoNotOptimize(f.active.data());
  }
}
BENCHMARK(BM_DualPde)->Unit(benchmark::kMillisecond);

void BM_PicardGlue(benchmark::State& state) {
  const auto phi = TestFunction::gaussian(1.0, 1.0, {0.0}, 0.5);
  const auto grid = dual::auto_grid(phi, 0.1, 0.02);
  const double T = dual::max_glue_horizon(kParams, 1.0, 2);
  for (auto _ : state) {
    auto g = dual::glue_intervals(kParams, phi, grid, T, 2);
    benchmark::DoNotOptimize(g.field.active.data());
  }
}
BENCHMARK(BM_PicardGlue)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
