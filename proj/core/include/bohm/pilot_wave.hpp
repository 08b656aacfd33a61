#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "bohm/grid.hpp"
#include "bohm/potential.hpp"
#include "bohm/propagator.hpp"
#include "bohm/spectral.hpp"
#include "bohm/wavefunction.hpp"

namespace bohm {

class Trajectory;
class TrajectoryEnsemble;

struct NodeOptions {
  /// Points with P < relative_threshold * max(P) are treated as nodes.
  double relative_threshold = 1e-12;
  /// AllNodes is raised when more than this fraction of the grid is masked.
  double max_masked_fraction = 0.99;
};

/// Guidance velocity (one component per axis) with the node mask.
/// Masked points carry the velocity of the nearest unmasked point.
struct VelocityField {
  std::vector<std::vector<double>> components;
  std::vector<std::uint8_t> node_mask;
  std::size_t masked_count = 0;
  double time = 0.0;
};

struct QuantumPotentialField {
  std::vector<double> values;
  std::vector<std::uint8_t> node_mask;
  /// Unmasked points where |Q| exceeds 10x the median |Q| (typically next to nodes).
  std::vector<std::uint8_t> spike_mask;
  double median_abs = 0.0;
};

/// Density, velocity and quantum potential derived from one wavefunction.
struct PolarFields {
  std::vector<double> density;
  std::vector<std::vector<double>> velocity;
  std::vector<double> quantum_potential;
  std::vector<std::uint8_t> node_mask;
  /// hbar * unwrapped phase along a 1D grid; diagnostic only, absent in 2D.
  std::optional<std::vector<double>> action_1d;
};

/// |psi|^2 at every grid point.
[[nodiscard]] std::vector<double> density(const WaveFunction& psi);

/// v_a = (hbar / m_a) Im(d_a psi / psi) with spectral derivatives.
[[nodiscard]] VelocityField velocity_field(const WaveFunction& psi, const MassVector& masses,
                                           const NodeOptions& options = {});
/// Same, reusing caller-owned transform plans (one SpectralOps per thread).
[[nodiscard]] VelocityField velocity_field(const WaveFunction& psi, const MassVector& masses,
                                           const NodeOptions& options, SpectralOps& ops);

/// Q = -sum_a (hbar^2 / 2 m_a) (d_a^2 R) / R with R = |psi|.
///
/// Evaluated through the identity (d^2 R)/R = Re(d^2 psi / psi) + Im(d psi / psi)^2,
/// which only differentiates the smooth field psi.
[[nodiscard]] QuantumPotentialField quantum_potential(const WaveFunction& psi,
                                                      const MassVector& masses,
                                                      const NodeOptions& options = {});

[[nodiscard]] PolarFields polar_fields(const WaveFunction& psi, const MassVector& masses,
                                       const NodeOptions& options = {});

/// S along a 1D grid by summing wrapped phase differences between neighbours.
[[nodiscard]] std::vector<double> unwrapped_action_1d(const WaveFunction& psi);

/// RMS over grid points and interior snapshots of dP/dt + div(P v), using
/// centred differences in time and the spectral divergence of the current
/// (hbar / m) Im(conj(psi) grad psi).
[[nodiscard]] double continuity_residual(const SnapshotTimeline& timeline,
                                         const MassVector& masses);

/// Relative RMS mismatch between d(m v(q(t)))/dt along a trajectory and the
/// force -grad(V + Q) at q(t). Throws NodeProximity if the trajectory visits
/// masked cells.
[[nodiscard]] double quantum_newton_residual(const Trajectory& trajectory,
                                             const SnapshotTimeline& timeline,
                                             const PotentialSpec& potential,
                                             const MassVector& masses,
                                             const NodeOptions& options = {});

/// Same residual pooled over every trajectory of an ensemble.
[[nodiscard]] double quantum_newton_residual(const TrajectoryEnsemble& ensemble,
                                             const SnapshotTimeline& timeline,
                                             const PotentialSpec& potential,
                                             const MassVector& masses,
                                             const NodeOptions& options = {});

}  // namespace bohm
