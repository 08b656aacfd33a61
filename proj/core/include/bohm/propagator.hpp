#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <vector>

#include "bohm/grid.hpp"
#include "bohm/potential.hpp"
#include "bohm/spectral.hpp"
#include "bohm/wavefunction.hpp"

namespace bohm {

struct EvolutionPlan {
  double dt = 1e-3;
  std::size_t steps = 0;
  std::size_t snapshot_stride = 1;
  PotentialSpec potential;
  MassVector masses;
  /// Also record the state halfway between consecutive snapshots so the
  /// trajectory integrator can evaluate RK4 mid-stage velocities exactly.
  bool half_step_snapshots = false;
};

/// Checks the plan against the grid: positive dt, stride dividing steps,
/// masses per axis, and dt * max kinetic phase rate < pi.
void validate_plan(const EvolutionPlan& plan, const SpatialGrid& grid, double hbar);

/// Largest kinetic phase advanced by a single step (at the Nyquist corner).
[[nodiscard]] double max_kinetic_phase(const SpatialGrid& grid, const MassVector& masses,
                                       double hbar, double dt);

/// Snapshots at t0 + j * interval, optionally with midpoints between them.
class SnapshotTimeline {
 public:
  SnapshotTimeline(std::vector<WaveFunction> snapshots, std::vector<WaveFunction> midpoints,
                   double interval);

  [[nodiscard]] std::size_t size() const noexcept { return snapshots_.size(); }
  [[nodiscard]] const WaveFunction& snapshot(std::size_t j) const { return snapshots_.at(j); }
  [[nodiscard]] const WaveFunction& back() const { return snapshots_.back(); }
  [[nodiscard]] bool has_midpoints() const noexcept { return !midpoints_.empty(); }
  /// State at (time(j) + time(j+1)) / 2.
  [[nodiscard]] const WaveFunction& midpoint(std::size_t j) const { return midpoints_.at(j); }
  [[nodiscard]] double time(std::size_t j) const { return snapshots_.at(j).time(); }
  [[nodiscard]] double interval() const noexcept { return interval_; }
  [[nodiscard]] const SpatialGrid& grid() const { return snapshots_.front().grid(); }

 private:
  std::vector<WaveFunction> snapshots_;
  std::vector<WaveFunction> midpoints_;
  double interval_;
};

enum class SnapshotKind { Main, Midpoint };

/// Receives snapshots in time order: main 0, midpoint 0, main 1, ...
using SnapshotObserver =
    std::function<void(const WaveFunction& psi, SnapshotKind kind, std::size_t index)>;

/// Strang-split spectral propagator:
///   exp(-i V dt / 2hbar) F^-1 exp(-i T(k) dt / hbar) F exp(-i V dt / 2hbar).
/// An absorbing mask enters through the (complex) potential half-kicks.
class SplitStepPropagator {
 public:
  SplitStepPropagator(const SpatialGrid& grid, const EvolutionPlan& plan, double hbar);
  ~SplitStepPropagator();
  SplitStepPropagator(SplitStepPropagator&&) noexcept;
  SplitStepPropagator& operator=(SplitStepPropagator&&) noexcept;

  /// Advances raw amplitudes in place by `count` steps of dt * fraction.
  /// fraction = -1 runs backwards in time; 0.5 takes half steps.
  void advance(std::vector<Complex>& amplitudes, std::size_t count, double fraction = 1.0);

  [[nodiscard]] WaveFunction step(const WaveFunction& psi);
  [[nodiscard]] WaveFunction step_back(const WaveFunction& psi);

  [[nodiscard]] double dt() const noexcept;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// One split step.
[[nodiscard]] WaveFunction step(const WaveFunction& psi, const EvolutionPlan& plan);

/// Runs plan.steps steps, streaming snapshots to the observer.
void evolve(const WaveFunction& psi, const EvolutionPlan& plan, const SnapshotObserver& observer);

/// Runs plan.steps steps and keeps every snapshot.
[[nodiscard]] SnapshotTimeline evolve(const WaveFunction& psi, const EvolutionPlan& plan);

/// <psi|H|psi> / <psi|psi> with a spectral kinetic term and the real part of V.
[[nodiscard]] double energy(const WaveFunction& psi, const PotentialSpec& potential,
                            const MassVector& masses);

}  // namespace bohm
