#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bohm/equilibrium.hpp"
#include "bohm/grid.hpp"
#include "bohm/pilot_wave.hpp"
#include "bohm/potential.hpp"
#include "bohm/propagator.hpp"
#include "bohm/trajectories.hpp"
#include "bohm/wavefunction.hpp"

namespace bohm {

enum class Preset { DoubleSlit, PointerMeasurement, BarrierDwell, Stationary, Relaxation };

[[nodiscard]] std::string_view to_string(Preset preset) noexcept;
[[nodiscard]] std::optional<Preset> preset_from_string(std::string_view name) noexcept;

/// Post-slit state: two transverse Gaussians at +-separation/2 times a
/// boosted longitudinal Gaussian. Axes are (longitudinal, transverse).
///
/// With which_way set, a pointer is coupled to the slit by an impulsive
/// translation and the axes become (transverse, pointer). The longitudinal
/// factor separates from both and is dropped.
struct DoubleSlitParams {
  double separation = 4.0;
  double slit_width = 0.5;
  double boost = 2.0;
  double longitudinal_width = 1.5;
  double longitudinal_start = -4.0;
  bool which_way = false;
  double pointer_width = 1.0;
  /// 0 selects 7 pointer widths.
  double pointer_shift = 0.0;

  friend bool operator==(const DoubleSlitParams&, const DoubleSlitParams&) = default;
};

/// c1 psi1(x) phi(y - a) + c2 psi2(x) phi(y + a) with psi1, psi2 at -+separation/2.
struct PointerParams {
  Complex c1{0.7071067811865476, 0.0};
  Complex c2{0.7071067811865476, 0.0};
  double system_separation = 8.0;
  double system_width = 1.0;
  double pointer_width = 1.0;
  /// 0 selects 7 pointer widths.
  double pointer_shift = 0.0;
  /// Largest tolerated |<phi(y - a)|phi(y + a)>|.
  double max_overlap = 1e-8;
  bool empty_wave_check = true;

  friend bool operator==(const PointerParams&, const PointerParams&) = default;
};

struct BarrierParams {
  double v0 = 1.2;
  double a = 0.0;
  double b = 1.0;
  double start = -20.0;
  double width = 2.0;
  double boost = 1.5;
  /// Sponge width at both ends; 0 keeps the evolution unitary.
  double absorber_width = 0.0;
  double absorber_strength = 1.0;

  friend bool operator==(const BarrierParams&, const BarrierParams&) = default;
};

/// Oscillator eigenstate superposition sum_k amplitudes[k] |levels[k]>.
struct StationaryParams {
  std::vector<unsigned> levels{0};
  std::vector<Complex> amplitudes{Complex{1.0, 0.0}};
  double omega = 1.0;

  friend bool operator==(const StationaryParams&, const StationaryParams&) = default;
};

enum class RelaxationStart { Uniform, Equilibrium };

struct RelaxationParams {
  /// Modes n = (i, j) with i, j in [-side/2, side/2), side^2 = mode_count.
  std::size_t mode_count = 16;
  std::uint64_t phase_seed = 7;
  std::size_t cell_points = 8;
  RelaxationStart start = RelaxationStart::Uniform;

  friend bool operator==(const RelaxationParams&, const RelaxationParams&) = default;
};

struct ExperimentConfig {
  Preset preset = Preset::DoubleSlit;
  /// Empty selects default_grid().
  std::vector<Axis> grid;
  double dt = 0.0;
  std::size_t steps = 0;
  std::size_t snapshot_stride = 1;
  double hbar = 1.0;
  double mass = 1.0;
  std::size_t ensemble_size = 10000;
  std::uint64_t seed = 1;
  std::size_t threads = 1;
  /// Equivariance check times; empty selects start, middle and end.
  std::vector<double> check_times;
  /// Times at which full field snapshots are kept; empty selects the end.
  std::vector<double> field_times;

  DoubleSlitParams double_slit;
  PointerParams pointer;
  BarrierParams barrier;
  StationaryParams stationary;
  RelaxationParams relaxation;

  [[nodiscard]] double horizon() const noexcept { return dt * static_cast<double>(steps); }

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Documented defaults of each preset.
[[nodiscard]] ExperimentConfig default_config(Preset preset);
/// Grid used when the config leaves it empty (depends on which_way for the double slit).
[[nodiscard]] std::vector<Axis> default_grid(const ExperimentConfig& config);

/// Names of the checks the preset will report for this configuration.
[[nodiscard]] std::vector<std::string> available_checks(const ExperimentConfig& config);

struct Check {
  std::string name;
  double measured = 0.0;
  double threshold = 0.0;
  /// "<" or ">": measured must be strictly below or above threshold.
  std::string relation = "<";
  bool passed = false;
};

[[nodiscard]] Check make_check(std::string name, double measured, std::string relation,
                               double threshold);

/// Normalized histogram along one axis with the |psi|^2 marginal on the same bins.
struct Histogram {
  std::string name;
  std::size_t axis = 0;
  std::vector<double> edges;
  std::vector<double> density;
  std::vector<double> reference;
};

struct ChannelFractions {
  std::vector<double> fractions;
  std::vector<double> expected;
  double unclassified = 0.0;
};

struct DwellStats {
  std::vector<double> per_trajectory;
  double mean = 0.0;
  double stddev = 0.0;
  /// Integral over time of the barrier probability.
  double oracle = 0.0;
  double transmission = 0.0;
  double transmission_oracle = 0.0;
};

struct ScalarResult {
  std::string name;
  double value = 0.0;
};

struct ExperimentReport {
  Preset preset = Preset::DoubleSlit;
  std::vector<Histogram> histograms;
  std::optional<ChannelFractions> channels;
  std::optional<DwellStats> dwell;
  std::optional<HSeries> h;
  std::vector<EquivarianceCheck> equivariance;
  std::vector<ScalarResult> scalars;
  std::vector<Check> checks;
  std::optional<TrajectoryEnsemble> ensemble;
  std::vector<WaveFunction> fields;
  MassVector masses{{1.0}};
  PotentialSpec potential;
  double runtime_seconds = 0.0;

  [[nodiscard]] const Check* find_check(std::string_view name) const noexcept;
  [[nodiscard]] std::optional<double> scalar(std::string_view name) const noexcept;
  [[nodiscard]] bool all_passed() const noexcept;
};

/// Transverse |psi|^2 marginal along one axis (summed over the others, times cell volume).
[[nodiscard]] std::vector<double> marginal(const SpatialGrid& grid, std::span<const double> p,
                                           std::size_t axis);

struct Visibility {
  double visibility = 0.0;
  std::size_t fringes = 0;
};

/// Central-fringe contrast (I_max - I_min) / (I_max + I_min): I_max is the
/// peak, I_min the deeper of the minima right next to it. Only minima between
/// two maxima count, searched over the span from the first to the last point
/// above 10% of the peak. No such minimum means no fringes and 0.
[[nodiscard]] Visibility fringe_visibility(std::span<const double> profile);

[[nodiscard]] ExperimentReport run_double_slit(const ExperimentConfig& config);
[[nodiscard]] ExperimentReport run_pointer_measurement(const ExperimentConfig& config);
[[nodiscard]] ExperimentReport run_barrier_dwell(const ExperimentConfig& config);
[[nodiscard]] ExperimentReport run_stationary(const ExperimentConfig& config);
[[nodiscard]] ExperimentReport run_relaxation(const ExperimentConfig& config);
[[nodiscard]] ExperimentReport run_experiment(const ExperimentConfig& config);

/// The relaxation preset's superposition: equal-weight modes with phases
/// drawn from the counter RNG.
[[nodiscard]] ModeSuperposition box_modes(std::size_t count, std::uint64_t phase_seed);

}  // namespace bohm
