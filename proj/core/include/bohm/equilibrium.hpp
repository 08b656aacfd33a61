#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "bohm/grid.hpp"
#include "bohm/propagator.hpp"
#include "bohm/trajectories.hpp"
#include "bohm/wavefunction.hpp"

namespace bohm {

/// Uniform coarse cells of cell_points grid points per axis.
struct CoarseGraining {
  std::size_t cell_points = 8;

  void validate(const SpatialGrid& grid) const;
  [[nodiscard]] std::size_t cell_count(const SpatialGrid& grid) const;
  [[nodiscard]] double cell_volume(const SpatialGrid& grid) const;
  /// Coarse-cell index of a grid point.
  [[nodiscard]] std::size_t cell_of(const SpatialGrid& grid, std::size_t flat) const;
};

struct HSeries {
  std::vector<double> times;
  std::vector<double> values;  // nats
};

/// n independent draws from the piecewise-constant density P (one cell per
/// grid point, centred on it) by rejection against max(P). Draw i uses its
/// own counter-based stream, so results are independent of `threads`.
[[nodiscard]] std::vector<Point> sample_density(const SpatialGrid& grid, std::span<const double> p,
                                                std::size_t n, std::uint64_t seed,
                                                std::size_t threads = 1);

/// Asymptotic 99% critical value of the one-sample KS statistic.
[[nodiscard]] double ks_critical_value_99(std::size_t n);

/// sup |F_n - F| for one axis marginal of P (F piecewise linear over cells).
[[nodiscard]] double ks_distance_axis(std::span<const Point> samples, const SpatialGrid& grid,
                                      std::span<const double> p, std::size_t axis);
/// Maximum of the per-axis marginal statistics.
[[nodiscard]] double ks_distance(std::span<const Point> samples, const SpatialGrid& grid,
                                 std::span<const double> p);

struct EquivarianceCheck {
  double time = 0.0;
  double distance = 0.0;
  double critical = 0.0;
  bool exceeds = false;
};

/// KS distance between the ensemble positions and |psi(t)|^2 at each check time.
[[nodiscard]] std::vector<EquivarianceCheck> equivariance_report(
    const TrajectoryEnsemble& ensemble, const SnapshotTimeline& timeline,
    std::span<const double> check_times);

/// Coarse-grained relative entropy sum rho ln(rho / P) over cell masses, with
/// rho estimated by a cell-count histogram of the samples.
[[nodiscard]] double h_function(std::span<const Point> samples, const SpatialGrid& grid,
                                std::span<const double> p, const CoarseGraining& graining);
/// Same for a density field rho given on the grid.
[[nodiscard]] double h_function(const SpatialGrid& grid, std::span<const double> rho,
                                std::span<const double> p, const CoarseGraining& graining);

/// Noise level of the histogram estimate for an equilibrium ensemble:
/// mean plus four standard deviations of the chi-square limit (K-1 dof) / 2n.
[[nodiscard]] double h_statistical_floor(std::size_t cells, std::size_t samples);

/// Plane-wave mode exp(i 2 pi n.x / L) on a periodic grid.
struct PlaneWaveMode {
  std::array<int, 2> index{};
  Complex amplitude{1.0, 0.0};
};

using ModeSuperposition = std::vector<PlaneWaveMode>;

[[nodiscard]] WaveFunction make_mode_superposition(const SpatialGrid& grid,
                                                   const ModeSuperposition& modes,
                                                   double hbar = 1.0);

namespace initial_density {
struct Equilibrium {};
/// Uniform density: the ground state of the periodic box.
struct Uniform {};
/// |phi|^2 of another mode superposition.
struct Modes {
  ModeSuperposition modes;
};
}  // namespace initial_density

using InitialDensitySpec =
    std::variant<initial_density::Equilibrium, initial_density::Uniform, initial_density::Modes>;

struct RelaxationSpec {
  SpatialGrid grid{{Axis{0.0, 6.283185307179586, 64}, Axis{0.0, 6.283185307179586, 64}}};
  MassVector masses = MassVector::uniform(2, 1.0);
  double hbar = 1.0;
  ModeSuperposition state;
  InitialDensitySpec rho0 = initial_density::Uniform{};
  CoarseGraining graining{8};
  double dt = 2e-3;
  std::size_t steps = 5000;
  std::size_t snapshot_stride = 10;
  std::size_t ensemble_size = 10000;
  std::uint64_t seed = 1;
  IntegratorOptions integrator;
};

struct RelaxationOutcome {
  HSeries h;
  TrajectoryEnsemble ensemble;
  WaveFunction initial;
  WaveFunction final;
};

/// Evolves the superposition, drives an ensemble sampled from rho0 through
/// it, and records the coarse-grained H at every snapshot.
[[nodiscard]] RelaxationOutcome relaxation_run(const RelaxationSpec& spec);

}  // namespace bohm
