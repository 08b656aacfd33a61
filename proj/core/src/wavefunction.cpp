#include "bohm/wavefunction.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "bohm/error.hpp"

namespace bohm {

namespace {

double squared_norm(const SpatialGrid& grid, std::span<const Complex> amplitudes) {
  double s = 0.0;
  for (const auto& z : amplitudes) s += std::norm(z);
  return s * grid.cell_volume();
}

void require_axis_count(const SpatialGrid& grid, std::size_t n, const char* what) {
  if (n != grid.dims()) {
    throw Error(ErrorKind::InvalidArgument,
                std::string(what) + " needs one entry per grid axis");
  }
}

}  // namespace

WaveFunction::WaveFunction(SpatialGrid grid, std::vector<Complex> amplitudes, double time,
                           double hbar, Normalization normalization)
    : grid_(std::move(grid)),
      amplitudes_(std::move(amplitudes)),
      time_(time),
      hbar_(hbar),
      normalization_(normalization) {
  if (amplitudes_.size() != grid_.size()) {
    throw Error(ErrorKind::GridMismatch, "amplitude count " + std::to_string(amplitudes_.size()) +
                                             " does not match grid size " +
                                             std::to_string(grid_.size()));
  }
  if (!(hbar_ > 0.0) || !std::isfinite(hbar_)) {
    throw Error(ErrorKind::InvalidArgument, "hbar must be positive");
  }
  if (!std::isfinite(time_)) throw Error(ErrorKind::InvalidArgument, "time must be finite");
  for (const auto& z : amplitudes_) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
      throw Error(ErrorKind::NonFiniteAmplitude, "wavefunction contains non-finite amplitudes");
    }
  }
  if (normalization_ == Normalization::Normalized) {
    const double n2 = squared_norm(grid_, amplitudes_);
    if (std::abs(n2 - 1.0) > kNormTolerance) {
      throw Error(ErrorKind::NonNormalized,
                  "state flagged normalized has squared norm " + std::to_string(n2));
    }
  }
}

WaveFunction WaveFunction::at_time(double t) const {
  WaveFunction copy = *this;
  copy.time_ = t;
  return copy;
}

Complex inner_product(const WaveFunction& psi1, const WaveFunction& psi2) {
  require_same_grid(psi1.grid(), psi2.grid());
  Complex s{0.0, 0.0};
  const auto a = psi1.amplitudes();
  const auto b = psi2.amplitudes();
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s * psi1.grid().cell_volume();
}

double norm(const SpatialGrid& grid, std::span<const Complex> amplitudes) {
  return std::sqrt(squared_norm(grid, amplitudes));
}

double norm(const WaveFunction& psi) { return norm(psi.grid(), psi.amplitudes()); }

WaveFunction normalized(SpatialGrid grid, std::vector<Complex> amplitudes, double time,
                        double hbar) {
  if (amplitudes.size() != grid.size()) {
    throw Error(ErrorKind::GridMismatch, "amplitude count does not match grid size");
  }
  const double n = norm(grid, amplitudes);
  if (!(n >= 1e-12)) throw Error(ErrorKind::ZeroVector, "cannot normalize a (near) zero state");
  for (auto& z : amplitudes) z /= n;
  return WaveFunction(std::move(grid), std::move(amplitudes), time, hbar);
}

WaveFunction make_wavefunction(const SpatialGrid& grid,
                               const std::function<Complex(const Point&)>& f, double time,
                               double hbar) {
  std::vector<Complex> amps(grid.size());
  for (std::size_t i = 0; i < amps.size(); ++i) amps[i] = f(grid.point(i));
  return normalized(grid, std::move(amps), time, hbar);
}

WaveFunction make_gaussian(const SpatialGrid& grid, std::span<const double> center,
                           std::span<const double> sigma, std::span<const double> wavenumber,
                           double hbar) {
  require_axis_count(grid, center.size(), "center");
  require_axis_count(grid, sigma.size(), "sigma");
  require_axis_count(grid, wavenumber.size(), "wavenumber");
  for (std::size_t a = 0; a < grid.dims(); ++a) {
    const Axis& ax = grid.axis(a);
    if (!(center[a] >= ax.min && center[a] < ax.max)) {
      throw Error(ErrorKind::InvalidArgument, "packet center lies outside the grid");
    }
    if (!(sigma[a] >= 3.0 * grid.spacing(a))) {
      throw Error(ErrorKind::UnresolvablePacket,
                  "sigma " + std::to_string(sigma[a]) + " below 3 grid spacings on axis " +
                      std::to_string(a));
    }
    const double d = std::min(center[a] - ax.min, ax.max - center[a]);
    const double tail = std::exp(-d * d / (4.0 * sigma[a] * sigma[a]));
    if (tail >= 1e-6) {
      throw Error(ErrorKind::BoundaryLeak, "packet amplitude at the boundary is " +
                                               std::to_string(tail) + " of its peak");
    }
  }
  return make_wavefunction(
      grid,
      [&](const Point& q) {
        double re_exp = 0.0;
        double phase = 0.0;
        for (std::size_t a = 0; a < grid.dims(); ++a) {
          const double dx = q[a] - center[a];
          re_exp -= dx * dx / (4.0 * sigma[a] * sigma[a]);
          phase += wavenumber[a] * q[a];
        }
        return std::polar(std::exp(re_exp), phase);
      },
      0.0, hbar);
}

WaveFunction make_plane_wave(const SpatialGrid& grid, std::span<const double> wavenumber,
                             double hbar) {
  require_axis_count(grid, wavenumber.size(), "wavenumber");
  for (std::size_t a = 0; a < grid.dims(); ++a) {
    const double dk = 2.0 * std::numbers::pi / grid.length(a);
    const double m = wavenumber[a] / dk;
    if (std::abs(m - std::round(m)) > 1e-9) {
      throw Error(ErrorKind::InvalidArgument,
                  "plane-wave wavenumber is not on the reciprocal lattice");
    }
  }
  return make_wavefunction(
      grid,
      [&](const Point& q) {
        double phase = 0.0;
        for (std::size_t a = 0; a < grid.dims(); ++a) phase += wavenumber[a] * q[a];
        return std::polar(1.0, phase);
      },
      0.0, hbar);
}

double harmonic_eigenfunction(unsigned level, double x, double omega, double mass, double hbar) {
  // Normalized Hermite functions via the stable three-term recurrence.
  const double alpha = std::sqrt(mass * omega / hbar);
  const double xi = alpha * x;
  const double g = std::exp(-0.5 * xi * xi) * std::sqrt(alpha) / std::pow(std::numbers::pi, 0.25);
  double prev = g;
  if (level == 0) return prev;
  double cur = std::sqrt(2.0) * xi * g;
  for (unsigned n = 1; n < level; ++n) {
    const double next = std::sqrt(2.0 / (n + 1)) * xi * cur - std::sqrt(static_cast<double>(n) / (n + 1)) * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

WaveFunction make_harmonic_eigenstate(const SpatialGrid& grid, unsigned level, double omega,
                                      double mass, double hbar, double center) {
  if (grid.dims() != 1) throw Error(ErrorKind::InvalidArgument, "eigenstates are built in 1D");
  if (!(omega > 0.0) || !(mass > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "omega and mass must be positive");
  }
  return make_wavefunction(
      grid,
      [&](const Point& q) {
        return Complex{harmonic_eigenfunction(level, q[0] - center, omega, mass, hbar), 0.0};
      },
      0.0, hbar);
}

WaveFunction superpose(const WaveFunction& psi1, const WaveFunction& psi2, Complex c1,
                       Complex c2) {
  require_same_grid(psi1.grid(), psi2.grid());
  if (psi1.time() != psi2.time()) {
    throw Error(ErrorKind::InvalidArgument, "superposed states must share the same time");
  }
  if (psi1.hbar() != psi2.hbar()) {
    throw Error(ErrorKind::InvalidArgument, "superposed states must share hbar");
  }
  std::vector<Complex> amps(psi1.size());
  for (std::size_t i = 0; i < amps.size(); ++i) amps[i] = c1 * psi1[i] + c2 * psi2[i];
  return normalized(psi1.grid(), std::move(amps), psi1.time(), psi1.hbar());
}

}  // namespace bohm
