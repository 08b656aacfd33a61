#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "bohm/error.hpp"
#include "bohm/grid.hpp"

namespace testing {

inline bohm::SpatialGrid line(double lo, double hi, std::size_t n) {
  return bohm::SpatialGrid({bohm::Axis{lo, hi, n}});
}

inline bohm::SpatialGrid plane(double lo0, double hi0, std::size_t n0, double lo1, double hi1,
                               std::size_t n1) {
  return bohm::SpatialGrid({bohm::Axis{lo0, hi0, n0}, bohm::Axis{lo1, hi1, n1}});
}

template <class F>
bohm::ErrorKind error_kind_of(F&& f) {
  try {
    f();
  } catch (const bohm::Error& e) {
    return e.kind();
  }
  throw std::logic_error("expected a bohm::Error");
}

/// Density of a freely spreading Gaussian packet (hbar = m = 1 unless given).
inline double free_gaussian_sigma(double sigma0, double t, double hbar = 1.0, double m = 1.0) {
  const double r = hbar * t / (2.0 * m * sigma0 * sigma0);
  return sigma0 * std::sqrt(1.0 + r * r);
}

}  // namespace testing
