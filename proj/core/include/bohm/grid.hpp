#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace bohm {

/// A configuration-space point. Unused trailing components are zero.
using Point = std::array<double, 2>;

inline constexpr std::size_t kMaxAxes = 2;
inline constexpr std::size_t kDefaultPointCap = std::size_t{1} << 22;

struct Axis {
  double min = 0.0;
  double max = 1.0;
  std::size_t points = 16;

  friend bool operator==(const Axis&, const Axis&) = default;
};

/// Uniform periodic lattice with one or two axes.
///
/// Grid point j on axis a sits at min + j * spacing(a); the domain is the
/// half-open box [min, max) and wraps periodically. Storage is row-major with
/// the last axis varying fastest.
class SpatialGrid {
 public:
  explicit SpatialGrid(std::vector<Axis> axes, std::size_t point_cap = kDefaultPointCap);

  [[nodiscard]] std::size_t dims() const noexcept { return axes_.size(); }
  [[nodiscard]] std::size_t size() const noexcept { return size_; }
  [[nodiscard]] const Axis& axis(std::size_t a) const { return axes_.at(a); }
  [[nodiscard]] const std::vector<Axis>& axes() const noexcept { return axes_; }

  [[nodiscard]] std::size_t points(std::size_t a) const { return axes_[a].points; }
  [[nodiscard]] double spacing(std::size_t a) const { return spacing_[a]; }
  [[nodiscard]] double length(std::size_t a) const { return axes_[a].max - axes_[a].min; }
  [[nodiscard]] double coordinate(std::size_t a, std::size_t j) const {
    return axes_[a].min + static_cast<double>(j) * spacing_[a];
  }
  /// Volume element: product of spacings.
  [[nodiscard]] double cell_volume() const noexcept { return cell_volume_; }
  [[nodiscard]] double volume() const noexcept;

  /// Row-major stride of axis a.
  [[nodiscard]] std::size_t stride(std::size_t a) const { return strides_[a]; }
  [[nodiscard]] std::size_t index(const std::array<std::size_t, kMaxAxes>& ij) const noexcept;
  [[nodiscard]] std::array<std::size_t, kMaxAxes> unravel(std::size_t flat) const noexcept;
  [[nodiscard]] Point point(std::size_t flat) const noexcept;

  /// Maps a coordinate into [min, max) on axis a.
  [[nodiscard]] double wrap(std::size_t a, double x) const noexcept;
  [[nodiscard]] bool contains(const Point& q) const noexcept;
  /// Index of the grid point nearest to q (periodic).
  [[nodiscard]] std::size_t nearest_index(const Point& q) const noexcept;

  friend bool operator==(const SpatialGrid& a, const SpatialGrid& b) { return a.axes_ == b.axes_; }

 private:
  std::vector<Axis> axes_;
  std::array<double, kMaxAxes> spacing_{};
  std::array<std::size_t, kMaxAxes> strides_{};
  std::size_t size_ = 0;
  double cell_volume_ = 0.0;
};

/// Per-axis particle masses. Each grid axis carries its own mass so that a
/// 2-axis grid can hold either one particle in 2D or two particles in 1D.
class MassVector {
 public:
  MassVector() = default;
  explicit MassVector(std::vector<double> masses);
  /// Same mass on every axis of the grid.
  static MassVector uniform(std::size_t dims, double mass);

  [[nodiscard]] std::size_t size() const noexcept { return masses_.size(); }
  [[nodiscard]] double operator[](std::size_t a) const { return masses_[a]; }
  [[nodiscard]] const std::vector<double>& values() const noexcept { return masses_; }

  friend bool operator==(const MassVector&, const MassVector&) = default;

 private:
  std::vector<double> masses_;
};

void require_same_grid(const SpatialGrid& a, const SpatialGrid& b);
void require_masses_match(const SpatialGrid& grid, const MassVector& masses);

}  // namespace bohm
