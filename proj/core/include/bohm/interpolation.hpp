#pragma once

#include <array>
#include <span>

#include "bohm/grid.hpp"

namespace bohm {

/// Separable Catmull-Rom stencil (4 taps per axis, periodic wrap) for one
/// configuration-space point. Build once, apply to any number of fields.
class CubicStencil {
 public:
  CubicStencil(const SpatialGrid& grid, const Point& q);

  [[nodiscard]] double apply(std::span<const double> field) const;

 private:
  std::size_t dims_;
  std::array<std::array<std::size_t, 4>, kMaxAxes> offset_{};
  std::array<std::array<double, 4>, kMaxAxes> weight_{};
};

/// Catmull-Rom weights for fractional offset f in [0, 1) relative to the
/// stencil points at -1, 0, 1, 2.
[[nodiscard]] std::array<double, 4> catmull_rom_weights(double f) noexcept;

[[nodiscard]] double interpolate(const SpatialGrid& grid, std::span<const double> field,
                                 const Point& q);

}  // namespace bohm
