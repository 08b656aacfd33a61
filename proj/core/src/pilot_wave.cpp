#include "bohm/pilot_wave.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>

#include "bohm/error.hpp"
#include "bohm/interpolation.hpp"
#include "bohm/spectral.hpp"
#include "bohm/trajectories.hpp"

namespace bohm {

namespace {

std::vector<std::uint8_t> node_mask(const SpatialGrid& grid, std::span<const double> p,
                                    const NodeOptions& options, std::size_t& masked) {
  const double pmax = *std::max_element(p.begin(), p.end());
  const double threshold = options.relative_threshold * pmax;
  std::vector<std::uint8_t> mask(p.size(), 0);
  masked = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!(p[i] >= threshold) || p[i] == 0.0) {
      mask[i] = 1;
      ++masked;
    }
  }
  if (static_cast<double>(masked) > options.max_masked_fraction * static_cast<double>(grid.size())) {
    throw Error(ErrorKind::AllNodes, std::to_string(masked) + " of " +
                                         std::to_string(grid.size()) +
                                         " grid points lie on nodes");
  }
  return mask;
}

/// For every masked point, the flat index of the nearest unmasked point in
/// lattice (periodic, axis-neighbour) distance. Breadth-first in a fixed
/// neighbour order, so the assignment is deterministic.
std::vector<std::size_t> nearest_unmasked(const SpatialGrid& grid,
                                          std::span<const std::uint8_t> mask) {
  const std::size_t n = grid.size();
  constexpr std::size_t kUnset = static_cast<std::size_t>(-1);
  std::vector<std::size_t> source(n, kUnset);
  std::deque<std::size_t> queue;
  for (std::size_t i = 0; i < n; ++i) {
    if (!mask[i]) {
      source[i] = i;
      queue.push_back(i);
    }
  }
  while (!queue.empty()) {
    const std::size_t i = queue.front();
    queue.pop_front();
    const auto ij = grid.unravel(i);
    for (std::size_t a = 0; a < grid.dims(); ++a) {
      const std::size_t np = grid.points(a);
      for (const std::size_t j : {(ij[a] + np - 1) % np, (ij[a] + 1) % np}) {
        auto nb = ij;
        nb[a] = j;
        const std::size_t k = grid.index(nb);
        if (source[k] == kUnset) {
          source[k] = source[i];
          queue.push_back(k);
        }
      }
    }
  }
  return source;
}

void fill_masked(std::vector<double>& field, std::span<const std::uint8_t> mask,
                 std::span<const std::size_t> source) {
  for (std::size_t i = 0; i < field.size(); ++i) {
    if (mask[i]) field[i] = field[source[i]];
  }
}

struct Derived {
  std::vector<double> p;
  std::vector<std::vector<double>> v;
  std::vector<double> q;
  std::vector<std::uint8_t> mask;
  std::size_t masked = 0;
};

Derived derive(const WaveFunction& psi, const MassVector& masses, const NodeOptions& options,
               bool want_q, SpectralOps* ops_in = nullptr) {
  const SpatialGrid& grid = psi.grid();
  require_masses_match(grid, masses);
  const std::size_t n = grid.size();
  const double hbar = psi.hbar();

  Derived d;
  d.p = density(psi);
  d.mask = node_mask(grid, d.p, options, d.masked);

  std::optional<SpectralOps> own;
  SpectralOps* ops = ops_in;
  if (!ops) ops = &own.emplace(grid);

  std::vector<std::vector<Complex>> grad;
  std::vector<Complex> lap;
  std::vector<double> weight(grid.dims());
  for (std::size_t a = 0; a < grid.dims(); ++a) weight[a] = hbar * hbar / (2.0 * masses[a]);
  if (want_q) {
    ops->gradient_and_laplacian(psi.amplitudes(), weight, grad, lap);
  } else {
    grad = ops->gradient(psi.amplitudes());
  }

  d.v.assign(grid.dims(), std::vector<double>(n, 0.0));
  for (std::size_t a = 0; a < grid.dims(); ++a) {
    const double c = hbar / masses[a];
    for (std::size_t i = 0; i < n; ++i) {
      if (d.mask[i]) continue;
      d.v[a][i] = c * (std::conj(psi[i]) * grad[a][i]).imag() / d.p[i];
    }
  }
  if (want_q) {
    d.q.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      if (d.mask[i]) continue;
      double kin = 0.0;
      for (std::size_t a = 0; a < grid.dims(); ++a) kin += 0.5 * masses[a] * d.v[a][i] * d.v[a][i];
      d.q[i] = -(std::conj(psi[i]) * lap[i]).real() / d.p[i] - kin;
    }
  }
  if (d.masked > 0) {
    const auto source = nearest_unmasked(grid, d.mask);
    for (auto& comp : d.v) fill_masked(comp, d.mask, source);
    if (want_q) fill_masked(d.q, d.mask, source);
  }
  return d;
}

}  // namespace

std::vector<double> density(const WaveFunction& psi) {
  std::vector<double> p(psi.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::norm(psi[i]);
  return p;
}

VelocityField velocity_field(const WaveFunction& psi, const MassVector& masses,
                             const NodeOptions& options) {
  auto d = derive(psi, masses, options, false);
  return VelocityField{std::move(d.v), std::move(d.mask), d.masked, psi.time()};
}

VelocityField velocity_field(const WaveFunction& psi, const MassVector& masses,
                             const NodeOptions& options, SpectralOps& ops) {
  auto d = derive(psi, masses, options, false, &ops);
  return VelocityField{std::move(d.v), std::move(d.mask), d.masked, psi.time()};
}

QuantumPotentialField quantum_potential(const WaveFunction& psi, const MassVector& masses,
                                        const NodeOptions& options) {
  auto d = derive(psi, masses, options, true);
  QuantumPotentialField out;
  out.values = std::move(d.q);
  out.node_mask = std::move(d.mask);
  out.spike_mask.assign(out.values.size(), 0);

  std::vector<double> mags;
  mags.reserve(out.values.size());
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    if (!out.node_mask[i]) mags.push_back(std::abs(out.values[i]));
  }
  if (!mags.empty()) {
    auto mid = mags.begin() + static_cast<std::ptrdiff_t>(mags.size() / 2);
    std::nth_element(mags.begin(), mid, mags.end());
    out.median_abs = *mid;
    for (std::size_t i = 0; i < out.values.size(); ++i) {
      if (!out.node_mask[i] && std::abs(out.values[i]) > 10.0 * out.median_abs) {
        out.spike_mask[i] = 1;
      }
    }
  }
  return out;
}

PolarFields polar_fields(const WaveFunction& psi, const MassVector& masses,
                         const NodeOptions& options) {
  auto d = derive(psi, masses, options, true);
  PolarFields f{std::move(d.p), std::move(d.v), std::move(d.q), std::move(d.mask), std::nullopt};
  if (psi.grid().dims() == 1) f.action_1d = unwrapped_action_1d(psi);
  return f;
}

std::vector<double> unwrapped_action_1d(const WaveFunction& psi) {
  if (psi.grid().dims() != 1) {
    throw Error(ErrorKind::InvalidArgument, "phase unwrapping is only defined on 1D grids");
  }
  const std::size_t n = psi.size();
  std::vector<double> s(n);
  double phase = std::arg(psi[0]);
  s[0] = psi.hbar() * phase;
  for (std::size_t j = 1; j < n; ++j) {
    // arg(b * conj(a)) lies in (-pi, pi].
    phase += std::arg(psi[j] * std::conj(psi[j - 1]));
    s[j] = psi.hbar() * phase;
  }
  return s;
}

double continuity_residual(const SnapshotTimeline& timeline, const MassVector& masses) {
  if (timeline.size() < 3) {
    throw Error(ErrorKind::InvalidArgument, "continuity residual needs at least 3 snapshots");
  }
  const SpatialGrid& grid = timeline.grid();
  require_masses_match(grid, masses);
  SpectralOps ops(grid);
  const std::size_t n = grid.size();
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t j = 1; j + 1 < timeline.size(); ++j) {
    const WaveFunction& prev = timeline.snapshot(j - 1);
    const WaveFunction& cur = timeline.snapshot(j);
    const WaveFunction& next = timeline.snapshot(j + 1);
    const double dt2 = next.time() - prev.time();
    const auto grad = ops.gradient(cur.amplitudes());
    std::vector<double> div(n, 0.0);
    for (std::size_t a = 0; a < grid.dims(); ++a) {
      std::vector<double> current(n);
      const double c = cur.hbar() / masses[a];
      for (std::size_t i = 0; i < n; ++i) current[i] = c * (std::conj(cur[i]) * grad[a][i]).imag();
      const auto dj = ops.derivative(std::span<const double>(current), a);
      for (std::size_t i = 0; i < n; ++i) div[i] += dj[i];
    }
    for (std::size_t i = 0; i < n; ++i) {
      const double dpdt = (std::norm(next[i]) - std::norm(prev[i])) / dt2;
      const double r = dpdt + div[i];
      sum += r * r;
    }
    count += n;
  }
  return std::sqrt(sum / static_cast<double>(count));
}

namespace {

/// Fourth-order central difference of a periodic grid field along one axis.
std::vector<double> central_difference(const SpatialGrid& grid, std::span<const double> f,
                                       std::size_t axis) {
  const std::size_t n = grid.size();
  const std::size_t np = grid.points(axis);
  const std::size_t stride = grid.stride(axis);
  const double h = grid.spacing(axis);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = (i / stride) % np;
    const std::size_t base = i - j * stride;
    auto at = [&](long long off) {
      long long k = (static_cast<long long>(j) + off) % static_cast<long long>(np);
      if (k < 0) k += static_cast<long long>(np);
      return f[base + static_cast<std::size_t>(k) * stride];
    };
    out[i] = (at(-2) - 8.0 * at(-1) + 8.0 * at(1) - at(2)) / (12.0 * h);
  }
  return out;
}

}  // namespace

double quantum_newton_residual(const TrajectoryEnsemble& ensemble,
                               const SnapshotTimeline& timeline, const PotentialSpec& potential,
                               const MassVector& masses, const NodeOptions& options) {
  const SpatialGrid& grid = timeline.grid();
  require_masses_match(grid, masses);
  const std::size_t steps = ensemble.times().size();
  if (steps != timeline.size()) {
    throw Error(ErrorKind::InvalidArgument, "trajectory times do not match the timeline");
  }
  if (steps < 3) throw Error(ErrorKind::InvalidArgument, "need at least 3 record times");
  for (const auto& traj : ensemble.trajectories()) {
    if (traj.any_flag(step_flags::kNodeProximity)) {
      throw Error(ErrorKind::NodeProximity, "trajectory passed through masked cells");
    }
  }
  const auto v_real = potential.sample_real(grid, masses);
  const std::size_t dims = grid.dims();
  const std::size_t count = ensemble.size();

  // momentum[j][traj] and force[j][traj] per axis
  std::vector<std::vector<Point>> momentum(steps, std::vector<Point>(count));
  std::vector<std::vector<Point>> force(steps, std::vector<Point>(count));
  SpectralOps ops(grid);
  for (std::size_t j = 0; j < steps; ++j) {
    const WaveFunction& psi = timeline.snapshot(j);
    auto d = derive(psi, masses, options, true, &ops);
    std::vector<double> u(grid.size());
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = v_real[i] + d.q[i];
    std::vector<std::vector<double>> grad_u;
    for (std::size_t a = 0; a < dims; ++a) grad_u.push_back(central_difference(grid, u, a));
    for (std::size_t t = 0; t < count; ++t) {
      const Point& q = ensemble[t].position(j);
      if (d.mask[grid.nearest_index(q)]) {
        throw Error(ErrorKind::NodeProximity, "trajectory entered a masked cell");
      }
      const CubicStencil st(grid, q);
      for (std::size_t a = 0; a < dims; ++a) {
        momentum[j][t][a] = masses[a] * st.apply(d.v[a]);
        force[j][t][a] = -st.apply(grad_u[a]);
      }
    }
  }

  double num = 0.0;
  double den = 0.0;
  std::size_t samples = 0;
  for (std::size_t j = 1; j + 1 < steps; ++j) {
    const double dt2 = ensemble.times()[j + 1] - ensemble.times()[j - 1];
    for (std::size_t t = 0; t < count; ++t) {
      for (std::size_t a = 0; a < dims; ++a) {
        const double lhs = (momentum[j + 1][t][a] - momentum[j - 1][t][a]) / dt2;
        const double rhs = force[j][t][a];
        num += (lhs - rhs) * (lhs - rhs);
        den += rhs * rhs;
      }
      ++samples;
    }
  }
  const double rms_err = std::sqrt(num / static_cast<double>(samples));
  const double rms_force = std::sqrt(den / static_cast<double>(samples));
  // Force-free motion: report the absolute residual.
  if (rms_force < 1e-10) return rms_err;
  return rms_err / rms_force;
}

double quantum_newton_residual(const Trajectory& trajectory, const SnapshotTimeline& timeline,
                               const PotentialSpec& potential, const MassVector& masses,
                               const NodeOptions& options) {
  auto times = std::make_shared<const std::vector<double>>(trajectory.times().begin(),
                                                           trajectory.times().end());
  TrajectoryEnsemble single({trajectory}, times, 0, SamplingMode::ExplicitList);
  return quantum_newton_residual(single, timeline, potential, masses, options);
}

}  // namespace bohm
