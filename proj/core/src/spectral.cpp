#include "bohm/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cstring>
#include <mutex>
#include <numbers>

#include "bohm/error.hpp"

namespace bohm {

namespace {

// The FFTW planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

struct Fft::Impl {
  std::size_t n = 0;
  fftw_complex* buffer = nullptr;
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;

  ~Impl() {
    std::lock_guard lock(planner_mutex());
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
    if (buffer) fftw_free(buffer);
  }
};

Fft::Fft(const SpatialGrid& grid) : impl_(std::make_unique<Impl>()) {
  impl_->n = grid.size();
  std::vector<int> shape;
  for (const auto& ax : grid.axes()) shape.push_back(static_cast<int>(ax.points));

  std::lock_guard lock(planner_mutex());
  impl_->buffer = fftw_alloc_complex(impl_->n);
  if (!impl_->buffer) throw Error(ErrorKind::InvalidArgument, "FFT buffer allocation failed");
  impl_->forward = fftw_plan_dft(static_cast<int>(shape.size()), shape.data(), impl_->buffer,
                                 impl_->buffer, FFTW_FORWARD, FFTW_ESTIMATE);
  impl_->backward = fftw_plan_dft(static_cast<int>(shape.size()), shape.data(), impl_->buffer,
                                  impl_->buffer, FFTW_BACKWARD, FFTW_ESTIMATE);
  if (!impl_->forward || !impl_->backward) {
    throw Error(ErrorKind::InvalidArgument, "FFTW planning failed");
  }
}

Fft::~Fft() = default;
Fft::Fft(Fft&&) noexcept = default;
Fft& Fft::operator=(Fft&&) noexcept = default;

void Fft::forward(std::span<const Complex> in, std::span<Complex> out) {
  std::memcpy(impl_->buffer, in.data(), impl_->n * sizeof(fftw_complex));
  fftw_execute(impl_->forward);
  std::memcpy(static_cast<void*>(out.data()), impl_->buffer, impl_->n * sizeof(fftw_complex));
}

void Fft::inverse(std::span<const Complex> in, std::span<Complex> out) {
  std::memcpy(impl_->buffer, in.data(), impl_->n * sizeof(fftw_complex));
  fftw_execute(impl_->backward);
  const double scale = 1.0 / static_cast<double>(impl_->n);
  const auto* src = reinterpret_cast<const Complex*>(impl_->buffer);
  for (std::size_t i = 0; i < impl_->n; ++i) out[i] = src[i] * scale;
}

std::vector<double> wavenumbers(const SpatialGrid& grid, std::size_t axis) {
  const std::size_t n = grid.points(axis);
  const double dk = 2.0 * std::numbers::pi / grid.length(axis);
  std::vector<double> k(n);
  for (std::size_t j = 0; j < n; ++j) {
    const auto m = j < n / 2 ? static_cast<long long>(j)
                             : static_cast<long long>(j) - static_cast<long long>(n);
    k[j] = dk * static_cast<double>(m);
  }
  return k;
}

SpectralOps::SpectralOps(const SpatialGrid& grid)
    : grid_(grid), fft_(grid), spectrum_(grid.size()), scratch_(grid.size()) {
  for (std::size_t a = 0; a < grid.dims(); ++a) k_.push_back(wavenumbers(grid, a));
}

std::size_t SpectralOps::axis_index(std::size_t flat, std::size_t axis) const {
  return (flat / grid_.stride(axis)) % grid_.points(axis);
}

std::vector<Complex> SpectralOps::derivative(std::span<const Complex> f, std::size_t axis) {
  fft_.forward(f, spectrum_);
  const std::size_t nyq = grid_.points(axis) / 2;
  for (std::size_t i = 0; i < spectrum_.size(); ++i) {
    const std::size_t j = axis_index(i, axis);
    scratch_[i] = j == nyq ? Complex{} : spectrum_[i] * Complex{0.0, k_[axis][j]};
  }
  std::vector<Complex> out(f.size());
  fft_.inverse(scratch_, out);
  return out;
}

std::vector<std::vector<Complex>> SpectralOps::gradient(std::span<const Complex> f) {
  fft_.forward(f, spectrum_);
  std::vector<std::vector<Complex>> out;
  for (std::size_t a = 0; a < grid_.dims(); ++a) {
    const std::size_t nyq = grid_.points(a) / 2;
    for (std::size_t i = 0; i < spectrum_.size(); ++i) {
      const std::size_t j = axis_index(i, a);
      scratch_[i] = j == nyq ? Complex{} : spectrum_[i] * Complex{0.0, k_[a][j]};
    }
    out.emplace_back(f.size());
    fft_.inverse(scratch_, out.back());
  }
  return out;
}

std::vector<Complex> SpectralOps::weighted_laplacian(std::span<const Complex> f,
                                                     std::span<const double> weight) {
  fft_.forward(f, spectrum_);
  for (std::size_t i = 0; i < spectrum_.size(); ++i) {
    double k2 = 0.0;
    for (std::size_t a = 0; a < grid_.dims(); ++a) {
      const double ka = k_[a][axis_index(i, a)];
      k2 += weight[a] * ka * ka;
    }
    scratch_[i] = -k2 * spectrum_[i];
  }
  std::vector<Complex> out(f.size());
  fft_.inverse(scratch_, out);
  return out;
}

void SpectralOps::gradient_and_laplacian(std::span<const Complex> f,
                                         std::span<const double> weight,
                                         std::vector<std::vector<Complex>>& grad,
                                         std::vector<Complex>& lap) {
  fft_.forward(f, spectrum_);
  grad.resize(grid_.dims());
  for (std::size_t a = 0; a < grid_.dims(); ++a) {
    const std::size_t nyq = grid_.points(a) / 2;
    for (std::size_t i = 0; i < spectrum_.size(); ++i) {
      const std::size_t j = axis_index(i, a);
      scratch_[i] = j == nyq ? Complex{} : spectrum_[i] * Complex{0.0, k_[a][j]};
    }
    grad[a].resize(f.size());
    fft_.inverse(scratch_, grad[a]);
  }
  for (std::size_t i = 0; i < spectrum_.size(); ++i) {
    double k2 = 0.0;
    for (std::size_t a = 0; a < grid_.dims(); ++a) {
      const double ka = k_[a][axis_index(i, a)];
      k2 += weight[a] * ka * ka;
    }
    scratch_[i] = -k2 * spectrum_[i];
  }
  lap.resize(f.size());
  fft_.inverse(scratch_, lap);
}

std::vector<double> SpectralOps::derivative(std::span<const double> f, std::size_t axis) {
  std::vector<Complex> c(f.begin(), f.end());
  const auto d = derivative(std::span<const Complex>(c), axis);
  std::vector<double> out(d.size());
  std::transform(d.begin(), d.end(), out.begin(), [](const Complex& z) { return z.real(); });
  return out;
}

}  // namespace bohm
