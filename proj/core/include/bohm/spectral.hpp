#pragma once

#include <memory>
#include <span>
#include <vector>

#include "bohm/grid.hpp"
#include "bohm/wavefunction.hpp"

namespace bohm {

/// Owning wrapper around a pair of FFTW plans for one grid shape.
///
/// Plans are created with FFTW_ESTIMATE so that two instances on the same
/// shape execute identical arithmetic; results do not depend on which
/// instance (or thread) performed a transform. Instances are not shareable
/// across threads; make one per worker.
class Fft {
 public:
  explicit Fft(const SpatialGrid& grid);
  ~Fft();
  Fft(Fft&&) noexcept;
  Fft& operator=(Fft&&) noexcept;
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;

  /// Unnormalized forward transform (exp(-i k x) kernel).
  void forward(std::span<const Complex> in, std::span<Complex> out);
  /// Inverse transform including the 1/N factor.
  void inverse(std::span<const Complex> in, std::span<Complex> out);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Angular wavenumbers 2*pi*m/L in FFT order for one axis.
[[nodiscard]] std::vector<double> wavenumbers(const SpatialGrid& grid, std::size_t axis);

/// Spectral derivatives on a periodic grid. The Nyquist mode is dropped for
/// odd-order derivatives so that real fields have real derivatives.
class SpectralOps {
 public:
  explicit SpectralOps(const SpatialGrid& grid);

  [[nodiscard]] const SpatialGrid& grid() const noexcept { return grid_; }
  [[nodiscard]] const std::vector<double>& k(std::size_t axis) const { return k_[axis]; }

  /// d/dx_axis of a complex field.
  [[nodiscard]] std::vector<Complex> derivative(std::span<const Complex> f, std::size_t axis);
  /// All first derivatives with one forward transform.
  [[nodiscard]] std::vector<std::vector<Complex>> gradient(std::span<const Complex> f);
  /// sum_a weight[a] * d^2/dx_a^2 f.
  [[nodiscard]] std::vector<Complex> weighted_laplacian(std::span<const Complex> f,
                                                        std::span<const double> weight);
  /// Gradient and weighted Laplacian sharing one forward transform.
  void gradient_and_laplacian(std::span<const Complex> f, std::span<const double> weight,
                              std::vector<std::vector<Complex>>& grad,
                              std::vector<Complex>& lap);
  /// Derivative of a real field.
  [[nodiscard]] std::vector<double> derivative(std::span<const double> f, std::size_t axis);

  Fft& fft() noexcept { return fft_; }

 private:
  [[nodiscard]] std::size_t axis_index(std::size_t flat, std::size_t axis) const;

  SpatialGrid grid_;
  Fft fft_;
  std::vector<std::vector<double>> k_;
  std::vector<Complex> spectrum_;
  std::vector<Complex> scratch_;
};

}  // namespace bohm
