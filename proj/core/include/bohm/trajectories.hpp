#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "bohm/grid.hpp"
#include "bohm/pilot_wave.hpp"
#include "bohm/propagator.hpp"
#include "bohm/spectral.hpp"

namespace bohm {

namespace step_flags {
inline constexpr std::uint8_t kNodeProximity = 1U << 0;
inline constexpr std::uint8_t kBoundaryWrap = 1U << 1;
}  // namespace step_flags

/// Positions of one particle configuration at the ensemble's record times.
/// flags(j) describes the integrator step that ended at time j.
class Trajectory {
 public:
  Trajectory(std::shared_ptr<const std::vector<double>> times, std::size_t dims);

  [[nodiscard]] std::span<const double> times() const noexcept { return *times_; }
  [[nodiscard]] std::size_t size() const noexcept { return positions_.size(); }
  [[nodiscard]] std::size_t dims() const noexcept { return dims_; }
  [[nodiscard]] const Point& position(std::size_t j) const { return positions_.at(j); }
  [[nodiscard]] const std::vector<Point>& positions() const noexcept { return positions_; }
  [[nodiscard]] std::uint8_t flags(std::size_t j) const { return flags_.at(j); }
  [[nodiscard]] bool any_flag(std::uint8_t mask) const noexcept;
  [[nodiscard]] const Point& front() const { return positions_.front(); }
  [[nodiscard]] const Point& back() const { return positions_.back(); }

  void append(const Point& q, std::uint8_t flags);
  void reserve(std::size_t n);

 private:
  std::shared_ptr<const std::vector<double>> times_;
  std::size_t dims_;
  std::vector<Point> positions_;
  std::vector<std::uint8_t> flags_;
};

enum class SamplingMode { QuantumEquilibrium, CustomDensity, ExplicitList };

class TrajectoryEnsemble {
 public:
  TrajectoryEnsemble(std::vector<Trajectory> trajectories,
                     std::shared_ptr<const std::vector<double>> times, std::uint64_t seed,
                     SamplingMode mode);

  [[nodiscard]] std::size_t size() const noexcept { return trajectories_.size(); }
  [[nodiscard]] const Trajectory& operator[](std::size_t i) const { return trajectories_[i]; }
  [[nodiscard]] const std::vector<Trajectory>& trajectories() const noexcept {
    return trajectories_;
  }
  [[nodiscard]] std::span<const double> times() const noexcept { return *times_; }
  [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
  [[nodiscard]] SamplingMode sampling_mode() const noexcept { return mode_; }
  /// All positions at record index j.
  [[nodiscard]] std::vector<Point> positions_at(std::size_t j) const;
  /// Record index whose time is closest to t.
  [[nodiscard]] std::size_t index_of_time(double t) const;

  void set_provenance(std::uint64_t seed, SamplingMode mode) noexcept {
    seed_ = seed;
    mode_ = mode;
  }

 private:
  std::vector<Trajectory> trajectories_;
  std::shared_ptr<const std::vector<double>> times_;
  std::uint64_t seed_;
  SamplingMode mode_;
};

struct IntegratorOptions {
  NodeOptions nodes;
  std::size_t threads = 1;
  /// Step halvings attempted when an RK4 stage lands on a masked cell.
  int max_node_retries = 8;
};

/// RK4 integration of the guidance equation that consumes snapshots as the
/// propagator produces them, so the full timeline never has to be stored.
/// Each main-to-main interval needs its midpoint snapshot.
class StreamingIntegrator {
 public:
  StreamingIntegrator(const SpatialGrid& grid, MassVector masses, std::vector<Point> initial,
                      IntegratorOptions options = {});
  ~StreamingIntegrator();
  StreamingIntegrator(StreamingIntegrator&&) noexcept;
  StreamingIntegrator& operator=(StreamingIntegrator&&) noexcept;

  void observe(const WaveFunction& psi, SnapshotKind kind, std::size_t index);
  [[nodiscard]] SnapshotObserver observer();

  [[nodiscard]] const std::vector<Point>& current_positions() const noexcept;
  [[nodiscard]] TrajectoryEnsemble finish(std::uint64_t seed = 0,
                                          SamplingMode mode = SamplingMode::ExplicitList);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Integrates every initial position through the timeline. Stage times must
/// coincide with recorded snapshots: with midpoints present one RK4 step per
/// snapshot interval (substeps_per_snapshot = 1) is the supported layout.
[[nodiscard]] TrajectoryEnsemble integrate(const SnapshotTimeline& timeline,
                                           std::span<const Point> initial_positions,
                                           const MassVector& masses,
                                           std::size_t substeps_per_snapshot = 1,
                                           const IntegratorOptions& options = {});

/// Axis-aligned box; each axis covers [lo, hi).
struct Region {
  Point lo{};
  Point hi{};
};

/// Index of the support containing the final position, if any. Supports are
/// half-open boxes and must be pairwise disjoint.
[[nodiscard]] std::optional<std::size_t> classify_channel(const Trajectory& trajectory,
                                                          std::span<const Region> supports);

/// Time spent inside the closed box [lo, hi], trapezoid-weighted in time so
/// the first and last samples count half.
[[nodiscard]] double dwell_time(const Trajectory& trajectory, const Region& region);

}  // namespace bohm
