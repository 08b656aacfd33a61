#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

#include "bohm/grid.hpp"

namespace bohm {

using Complex = std::complex<double>;

enum class Normalization { Normalized, Unnormalized };

/// Discrete norm tolerance for states flagged Normalized.
inline constexpr double kNormTolerance = 1e-8;

/// Complex amplitudes on a SpatialGrid at a given time. Immutable.
class WaveFunction {
 public:
  WaveFunction(SpatialGrid grid, std::vector<Complex> amplitudes, double time = 0.0,
               double hbar = 1.0, Normalization normalization = Normalization::Normalized);

  [[nodiscard]] const SpatialGrid& grid() const noexcept { return grid_; }
  [[nodiscard]] std::span<const Complex> amplitudes() const noexcept { return amplitudes_; }
  [[nodiscard]] const Complex& operator[](std::size_t i) const { return amplitudes_[i]; }
  [[nodiscard]] std::size_t size() const noexcept { return amplitudes_.size(); }
  [[nodiscard]] double time() const noexcept { return time_; }
  [[nodiscard]] double hbar() const noexcept { return hbar_; }
  [[nodiscard]] Normalization normalization() const noexcept { return normalization_; }

  /// Copy with a different timestamp.
  [[nodiscard]] WaveFunction at_time(double t) const;

 private:
  SpatialGrid grid_;
  std::vector<Complex> amplitudes_;
  double time_;
  double hbar_;
  Normalization normalization_;
};

/// <psi1|psi2> as a Riemann sum with volume element prod(dx).
[[nodiscard]] Complex inner_product(const WaveFunction& psi1, const WaveFunction& psi2);
/// sqrt(<psi|psi>).
[[nodiscard]] double norm(const WaveFunction& psi);
[[nodiscard]] double norm(const SpatialGrid& grid, std::span<const Complex> amplitudes);

/// Scales amplitudes to unit discrete norm. Throws ZeroVector below 1e-12.
[[nodiscard]] WaveFunction normalized(SpatialGrid grid, std::vector<Complex> amplitudes,
                                      double time = 0.0, double hbar = 1.0);

/// Samples f at every grid point and normalizes.
[[nodiscard]] WaveFunction make_wavefunction(const SpatialGrid& grid,
                                             const std::function<Complex(const Point&)>& f,
                                             double time = 0.0, double hbar = 1.0);

/// Product Gaussian packet exp(-(x-c)^2 / (4 sigma^2) + i k x) per axis.
/// sigma is the standard deviation of |psi|^2 along each axis.
[[nodiscard]] WaveFunction make_gaussian(const SpatialGrid& grid, std::span<const double> center,
                                         std::span<const double> sigma,
                                         std::span<const double> wavenumber, double hbar = 1.0);

/// exp(i k.x); k must lie on the reciprocal lattice of the grid.
[[nodiscard]] WaveFunction make_plane_wave(const SpatialGrid& grid,
                                           std::span<const double> wavenumber, double hbar = 1.0);

/// Harmonic-oscillator energy eigenstate of level n on a 1D grid.
[[nodiscard]] WaveFunction make_harmonic_eigenstate(const SpatialGrid& grid, unsigned level,
                                                    double omega, double mass, double hbar = 1.0,
                                                    double center = 0.0);

/// Analytic (unnormalized) oscillator eigenfunction, used by presets and tests.
[[nodiscard]] double harmonic_eigenfunction(unsigned level, double x, double omega, double mass,
                                            double hbar);

/// Normalized c1 psi1 + c2 psi2.
[[nodiscard]] WaveFunction superpose(const WaveFunction& psi1, const WaveFunction& psi2,
                                     Complex c1, Complex c2);

}  // namespace bohm
