#include "bohm/interpolation.hpp"

#include <cmath>

namespace bohm {

std::array<double, 4> catmull_rom_weights(double f) noexcept {
  const double f2 = f * f;
  const double f3 = f2 * f;
  return {0.5 * (-f3 + 2.0 * f2 - f), 0.5 * (3.0 * f3 - 5.0 * f2 + 2.0),
          0.5 * (-3.0 * f3 + 4.0 * f2 + f), 0.5 * (f3 - f2)};
}

CubicStencil::CubicStencil(const SpatialGrid& grid, const Point& q) : dims_(grid.dims()) {
  for (std::size_t a = 0; a < dims_; ++a) {
    const auto n = static_cast<long long>(grid.points(a));
    const double u = (q[a] - grid.axis(a).min) / grid.spacing(a);
    const double fl = std::floor(u);
    const double f = u - fl;
    long long base = static_cast<long long>(fl) % n;
    if (base < 0) base += n;
    weight_[a] = catmull_rom_weights(f);
    const auto stride = static_cast<long long>(grid.stride(a));
    for (long long t = 0; t < 4; ++t) {
      long long j = (base + t - 1) % n;
      if (j < 0) j += n;
      offset_[a][t] = static_cast<std::size_t>(j * stride);
    }
  }
}

double CubicStencil::apply(std::span<const double> field) const {
  if (dims_ == 1) {
    double s = 0.0;
    for (int t = 0; t < 4; ++t) s += weight_[0][t] * field[offset_[0][t]];
    return s;
  }
  double s = 0.0;
  for (int r = 0; r < 4; ++r) {
    const std::size_t row = offset_[0][r];
    double inner = 0.0;
    for (int c = 0; c < 4; ++c) inner += weight_[1][c] * field[row + offset_[1][c]];
    s += weight_[0][r] * inner;
  }
  return s;
}

double interpolate(const SpatialGrid& grid, std::span<const double> field, const Point& q) {
  return CubicStencil(grid, q).apply(field);
}

}  // namespace bohm
