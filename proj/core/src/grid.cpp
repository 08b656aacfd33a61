#include "bohm/grid.hpp"

#include <cmath>
#include <string>

#include "bohm/error.hpp"

namespace bohm {

namespace {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

}  // namespace

SpatialGrid::SpatialGrid(std::vector<Axis> axes, std::size_t point_cap) : axes_(std::move(axes)) {
  if (axes_.empty() || axes_.size() > kMaxAxes) {
    throw Error(ErrorKind::InvalidArgument, "grid must have 1 or 2 axes, got " +
                                                std::to_string(axes_.size()));
  }
  size_ = 1;
  cell_volume_ = 1.0;
  for (std::size_t a = 0; a < axes_.size(); ++a) {
    const Axis& ax = axes_[a];
    if (ax.points < 16 || !is_power_of_two(ax.points)) {
      throw Error(ErrorKind::InvalidArgument,
                  "axis " + std::to_string(a) + ": point count must be a power of two >= 16, got " +
                      std::to_string(ax.points));
    }
    if (!std::isfinite(ax.min) || !std::isfinite(ax.max) || !(ax.max > ax.min)) {
      throw Error(ErrorKind::InvalidArgument,
                  "axis " + std::to_string(a) + ": require finite min < max");
    }
    spacing_[a] = (ax.max - ax.min) / static_cast<double>(ax.points);
    cell_volume_ *= spacing_[a];
    size_ *= ax.points;
  }
  if (size_ > point_cap) {
    throw Error(ErrorKind::InvalidArgument, "grid has " + std::to_string(size_) +
                                                " points, exceeding the cap of " +
                                                std::to_string(point_cap));
  }
  std::size_t s = 1;
  for (std::size_t a = axes_.size(); a-- > 0;) {
    strides_[a] = s;
    s *= axes_[a].points;
  }
}

double SpatialGrid::volume() const noexcept {
  double v = 1.0;
  for (const auto& ax : axes_) v *= ax.max - ax.min;
  return v;
}

std::size_t SpatialGrid::index(const std::array<std::size_t, kMaxAxes>& ij) const noexcept {
  std::size_t flat = 0;
  for (std::size_t a = 0; a < axes_.size(); ++a) flat += ij[a] * strides_[a];
  return flat;
}

std::array<std::size_t, kMaxAxes> SpatialGrid::unravel(std::size_t flat) const noexcept {
  std::array<std::size_t, kMaxAxes> ij{};
  for (std::size_t a = 0; a < axes_.size(); ++a) {
    ij[a] = flat / strides_[a];
    flat -= ij[a] * strides_[a];
  }
  return ij;
}

Point SpatialGrid::point(std::size_t flat) const noexcept {
  const auto ij = unravel(flat);
  Point q{};
  for (std::size_t a = 0; a < axes_.size(); ++a) q[a] = coordinate(a, ij[a]);
  return q;
}

double SpatialGrid::wrap(std::size_t a, double x) const noexcept {
  const double lo = axes_[a].min;
  if (x >= lo && x < axes_[a].max) return x;
  const double len = axes_[a].max - lo;
  double y = std::fmod(x - lo, len);
  if (y < 0.0) y += len;
  // fmod of a tiny negative number can round up to len.
  if (y >= len) y = 0.0;
  return lo + y;
}

bool SpatialGrid::contains(const Point& q) const noexcept {
  for (std::size_t a = 0; a < axes_.size(); ++a) {
    if (!(q[a] >= axes_[a].min && q[a] < axes_[a].max)) return false;
  }
  return true;
}

std::size_t SpatialGrid::nearest_index(const Point& q) const noexcept {
  std::array<std::size_t, kMaxAxes> ij{};
  for (std::size_t a = 0; a < axes_.size(); ++a) {
    const auto n = static_cast<long long>(axes_[a].points);
    long long j = std::llround((q[a] - axes_[a].min) / spacing_[a]);
    j %= n;
    if (j < 0) j += n;
    ij[a] = static_cast<std::size_t>(j);
  }
  return index(ij);
}

MassVector::MassVector(std::vector<double> masses) : masses_(std::move(masses)) {
  if (masses_.empty()) throw Error(ErrorKind::InvalidArgument, "mass vector is empty");
  for (double m : masses_) {
    if (!(m > 0.0) || !std::isfinite(m)) {
      throw Error(ErrorKind::InvalidArgument, "masses must be positive and finite");
    }
  }
}

MassVector MassVector::uniform(std::size_t dims, double mass) {
  return MassVector(std::vector<double>(dims, mass));
}

void require_same_grid(const SpatialGrid& a, const SpatialGrid& b) {
  if (!(a == b)) throw Error(ErrorKind::GridMismatch, "operands live on different grids");
}

void require_masses_match(const SpatialGrid& grid, const MassVector& masses) {
  if (masses.size() != grid.dims()) {
    throw Error(ErrorKind::InvalidArgument, "mass vector has " + std::to_string(masses.size()) +
                                                " entries for a " + std::to_string(grid.dims()) +
                                                "-axis grid");
  }
}

}  // namespace bohm
