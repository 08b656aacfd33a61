#include <benchmark/benchmark.h>

#include "bohm/equilibrium.hpp"
#include "bohm/pilot_wave.hpp"
#include "bohm/propagator.hpp"
#include "bohm/trajectories.hpp"

using namespace bohm;

namespace {

/// Fixed spacing (0.0625 in 1D, 0.25 in 2D), so every size stays well inside
/// the Nyquist limit at dt = 1e-3.
SpatialGrid grid_of(std::size_t dims, std::size_t points) {
  const double half = 0.5 * static_cast<double>(points) * (dims == 1 ? 0.0625 : 0.25);
  std::vector<Axis> axes(dims, Axis{-half, half, points});
  return SpatialGrid(axes);
}

WaveFunction packet(const SpatialGrid& g) {
  const std::vector<double> c(g.dims(), 0.5), s(g.dims(), 1.5), k(g.dims(), 1.0);
  return make_gaussian(g, c, s, k);
}

EvolutionPlan plan_for(std::size_t dims, std::size_t steps, bool half) {
  EvolutionPlan p;
  p.dt = 1e-3;
  p.steps = steps;
  p.snapshot_stride = 1;
  p.masses = MassVector::uniform(dims, 1.0);
  p.potential.add(potentials::Harmonic{std::vector<double>(dims, 0.5), {}});
  p.half_step_snapshots = half;
  return p;
}

void BM_SplitStep(benchmark::State& state) {
  const auto dims = static_cast<std::size_t>(state.range(0));
  const auto g = grid_of(dims, static_cast<std::size_t>(state.range(1)));
  const auto plan = plan_for(dims, 1, false);
  SplitStepPropagator prop(g, plan, 1.0);
  const auto psi = packet(g);
  std::vector<Complex> amps(psi.amplitudes().begin(), psi.amplitudes().end());
  for (auto _ : state) {
    prop.advance(amps, 1);
    benchmark::DoNotOptimize(amps.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g.size()));
}
BENCHMARK(BM_SplitStep)->Args({1, 512})->Args({1, 4096})->Args({2, 128})->Args({2, 256});

void BM_VelocityField(benchmark::State& state) {
  const auto dims = static_cast<std::size_t>(state.range(0));
  const auto g = grid_of(dims, static_cast<std::size_t>(state.range(1)));
  const auto psi = packet(g);
  const auto masses = MassVector::uniform(dims, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(velocity_field(psi, masses));
}
BENCHMARK(BM_VelocityField)->Args({1, 512})->Args({2, 128});

void BM_QuantumPotential(benchmark::State& state) {
  const auto g = grid_of(2, 128);
  const auto psi = packet(g);
  const auto masses = MassVector::uniform(2, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(quantum_potential(psi, masses));
}
BENCHMARK(BM_QuantumPotential);

void BM_SampleDensity(benchmark::State& state) {
  const auto g = grid_of(2, 128);
  const auto p = density(packet(g));
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(sample_density(g, p, n, 1));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SampleDensity)->Arg(10000);

void BM_KsDistance(benchmark::State& state) {
  const auto g = grid_of(2, 128);
  const auto p = density(packet(g));
  const auto samples = sample_density(g, p, 10000, 1);
  for (auto _ : state) benchmark::DoNotOptimize(ks_distance(samples, g, p));
}
BENCHMARK(BM_KsDistance);

/// 100 steps of the wave plus RK4 guidance for an ensemble.
void BM_EnsembleIntegration(benchmark::State& state) {
  const auto g = grid_of(1, 512);
  const auto psi = packet(g);
  const auto plan = plan_for(1, 100, true);
  const auto tl = evolve(psi, plan);
  const auto starts = sample_density(g, density(psi), static_cast<std::size_t>(state.range(0)), 3);
  IntegratorOptions opts;
  opts.threads = static_cast<std::size_t>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(integrate(tl, starts, plan.masses, 1, opts));
  state.SetItemsProcessed(state.iterations() * state.range(0) * 100);
}
BENCHMARK(BM_EnsembleIntegration)->Args({1000, 1})->Args({1000, 2})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
