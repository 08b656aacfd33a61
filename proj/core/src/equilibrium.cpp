#include "bohm/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>

#include "bohm/error.hpp"
#include "bohm/parallel.hpp"
#include "bohm/pilot_wave.hpp"
#include "bohm/rng.hpp"

namespace bohm {

void CoarseGraining::validate(const SpatialGrid& grid) const {
  if (cell_points < 2) {
    throw Error(ErrorKind::InvalidArgument, "coarse cells need at least 2 grid points per axis");
  }
  for (std::size_t a = 0; a < grid.dims(); ++a) {
    if (grid.points(a) % cell_points != 0) {
      throw Error(ErrorKind::InvalidArgument, "coarse cell size " + std::to_string(cell_points) +
                                                  " does not divide axis " + std::to_string(a));
    }
  }
}

std::size_t CoarseGraining::cell_count(const SpatialGrid& grid) const {
  std::size_t c = 1;
  for (std::size_t a = 0; a < grid.dims(); ++a) c *= grid.points(a) / cell_points;
  return c;
}

double CoarseGraining::cell_volume(const SpatialGrid& grid) const {
  return grid.cell_volume() * std::pow(static_cast<double>(cell_points), static_cast<double>(grid.dims()));
}

std::size_t CoarseGraining::cell_of(const SpatialGrid& grid, std::size_t flat) const {
  const auto ij = grid.unravel(flat);
  std::size_t cell = 0;
  for (std::size_t a = 0; a < grid.dims(); ++a) {
    cell = cell * (grid.points(a) / cell_points) + ij[a] / cell_points;
  }
  return cell;
}

std::vector<Point> sample_density(const SpatialGrid& grid, std::span<const double> p,
                                  std::size_t n, std::uint64_t seed, std::size_t threads) {
  if (p.size() != grid.size()) throw Error(ErrorKind::GridMismatch, "density size mismatch");
  if (n == 0) throw Error(ErrorKind::InvalidArgument, "sample count must be positive");
  double pmax = 0.0;
  for (double v : p) {
    if (!std::isfinite(v) || v < 0.0) {
      throw Error(ErrorKind::DegenerateDensity, "density must be finite and non-negative");
    }
    pmax = std::max(pmax, v);
  }
  if (!(pmax > 0.0)) throw Error(ErrorKind::DegenerateDensity, "density is identically zero");

  std::vector<Point> out(n);
  const std::size_t size = grid.size();
  parallel_for(n, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      CounterRng rng(seed, i);
      std::size_t cell = 0;
      for (;;) {
        cell = std::min(size - 1, static_cast<std::size_t>(rng.uniform() * static_cast<double>(size)));
        if (rng.uniform() * pmax < p[cell]) break;
      }
      const Point centre = grid.point(cell);
      Point q{};
      for (std::size_t a = 0; a < grid.dims(); ++a) {
        q[a] = grid.wrap(a, centre[a] + (rng.uniform() - 0.5) * grid.spacing(a));
      }
      out[i] = q;
    }
  });
  return out;
}

double ks_critical_value_99(std::size_t n) { return 1.63 / std::sqrt(static_cast<double>(n)); }

double ks_distance_axis(std::span<const Point> samples, const SpatialGrid& grid,
                        std::span<const double> p, std::size_t axis) {
  if (p.size() != grid.size()) throw Error(ErrorKind::GridMismatch, "density size mismatch");
  if (axis >= grid.dims()) throw Error(ErrorKind::InvalidArgument, "axis out of range");
  if (samples.empty()) throw Error(ErrorKind::InvalidArgument, "no samples");
  const std::size_t np = grid.points(axis);
  std::vector<double> mass(np, 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) mass[(i / grid.stride(axis)) % np] += p[i];
  double total = 0.0;
  for (double m : mass) total += m;
  if (!(total > 0.0)) throw Error(ErrorKind::DegenerateDensity, "density is identically zero");
  std::vector<double> cumulative(np + 1, 0.0);
  for (std::size_t j = 0; j < np; ++j) cumulative[j + 1] = cumulative[j] + mass[j] / total;

  // Cells are centred on grid points; the CDF starts at min - spacing/2.
  const double h = grid.spacing(axis);
  const double origin = grid.axis(axis).min - 0.5 * h;
  const double len = grid.length(axis);
  std::vector<double> f(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    double u = std::fmod(samples[i][axis] - origin, len);
    if (u < 0.0) u += len;
    u /= h;
    auto c = static_cast<std::size_t>(u);
    if (c >= np) c = np - 1;
    const double frac = std::clamp(u - static_cast<double>(c), 0.0, 1.0);
    f[i] = cumulative[c] + frac * (cumulative[c + 1] - cumulative[c]);
  }
  std::sort(f.begin(), f.end());
  const auto n = static_cast<double>(f.size());
  double d = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double above = static_cast<double>(i + 1) / n - f[i];
    const double below = f[i] - static_cast<double>(i) / n;
    d = std::max({d, above, below});
  }
  return d;
}

double ks_distance(std::span<const Point> samples, const SpatialGrid& grid,
                   std::span<const double> p) {
  double d = 0.0;
  for (std::size_t a = 0; a < grid.dims(); ++a) d = std::max(d, ks_distance_axis(samples, grid, p, a));
  return d;
}

std::vector<EquivarianceCheck> equivariance_report(const TrajectoryEnsemble& ensemble,
                                                   const SnapshotTimeline& timeline,
                                                   std::span<const double> check_times) {
  std::vector<EquivarianceCheck> out;
  const double critical = ks_critical_value_99(ensemble.size());
  for (double t : check_times) {
    const std::size_t j = ensemble.index_of_time(t);
    std::size_t s = 0;
    for (std::size_t k = 1; k < timeline.size(); ++k) {
      if (std::abs(timeline.time(k) - t) < std::abs(timeline.time(s) - t)) s = k;
    }
    const auto positions = ensemble.positions_at(j);
    const auto p = density(timeline.snapshot(s));
    const double d = ks_distance(positions, timeline.grid(), p);
    out.push_back({ensemble.times()[j], d, critical, d > critical});
  }
  return out;
}

namespace {

std::vector<double> cell_masses(const SpatialGrid& grid, std::span<const double> field,
                                const CoarseGraining& graining) {
  std::vector<double> m(graining.cell_count(grid), 0.0);
  for (std::size_t i = 0; i < field.size(); ++i) m[graining.cell_of(grid, i)] += field[i];
  double total = 0.0;
  for (double v : m) total += v;
  if (!(total > 0.0)) throw Error(ErrorKind::DegenerateDensity, "density is identically zero");
  for (double& v : m) v /= total;
  return m;
}

double relative_entropy(std::span<const double> rho, std::span<const double> p) {
  double h = 0.0;
  for (std::size_t c = 0; c < rho.size(); ++c) {
    if (rho[c] <= 0.0) continue;
    if (p[c] <= 0.0) {
      throw Error(ErrorKind::EmptyPCell,
                  "coarse cell " + std::to_string(c) + " has rho > 0 but P = 0");
    }
    h += rho[c] * std::log(rho[c] / p[c]);
  }
  return h;
}

}  // namespace

double h_function(std::span<const Point> samples, const SpatialGrid& grid,
                  std::span<const double> p, const CoarseGraining& graining) {
  graining.validate(grid);
  if (p.size() != grid.size()) throw Error(ErrorKind::GridMismatch, "density size mismatch");
  if (samples.empty()) throw Error(ErrorKind::InvalidArgument, "no samples");
  std::vector<double> rho(graining.cell_count(grid), 0.0);
  for (const auto& q : samples) rho[graining.cell_of(grid, grid.nearest_index(q))] += 1.0;
  for (double& v : rho) v /= static_cast<double>(samples.size());
  return relative_entropy(rho, cell_masses(grid, p, graining));
}

double h_function(const SpatialGrid& grid, std::span<const double> rho,
                  std::span<const double> p, const CoarseGraining& graining) {
  graining.validate(grid);
  if (p.size() != grid.size() || rho.size() != grid.size()) {
    throw Error(ErrorKind::GridMismatch, "density size mismatch");
  }
  return relative_entropy(cell_masses(grid, rho, graining), cell_masses(grid, p, graining));
}

double h_statistical_floor(std::size_t cells, std::size_t samples) {
  const double dof = static_cast<double>(cells) - 1.0;
  return (dof + 4.0 * std::sqrt(2.0 * dof)) / (2.0 * static_cast<double>(samples));
}

WaveFunction make_mode_superposition(const SpatialGrid& grid, const ModeSuperposition& modes,
                                     double hbar) {
  if (modes.empty()) throw Error(ErrorKind::InvalidArgument, "mode list is empty");
  std::vector<double> dk(grid.dims());
  for (std::size_t a = 0; a < grid.dims(); ++a) dk[a] = 2.0 * std::numbers::pi / grid.length(a);
  return make_wavefunction(
      grid,
      [&](const Point& q) {
        Complex s{};
        for (const auto& m : modes) {
          double phase = 0.0;
          for (std::size_t a = 0; a < grid.dims(); ++a) {
            phase += dk[a] * m.index[a] * (q[a] - grid.axis(a).min);
          }
          s += m.amplitude * std::polar(1.0, phase);
        }
        return s;
      },
      0.0, hbar);
}

RelaxationOutcome relaxation_run(const RelaxationSpec& spec) {
  spec.graining.validate(spec.grid);
  const WaveFunction psi0 = make_mode_superposition(spec.grid, spec.state, spec.hbar);

  std::vector<double> rho0;
  SamplingMode mode = SamplingMode::CustomDensity;
  std::visit(
      [&](const auto& r) {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, initial_density::Equilibrium>) {
          rho0 = density(psi0);
          mode = SamplingMode::QuantumEquilibrium;
        } else if constexpr (std::is_same_v<T, initial_density::Uniform>) {
          rho0.assign(spec.grid.size(), 1.0);
        } else {
          rho0 = density(make_mode_superposition(spec.grid, r.modes, spec.hbar));
        }
      },
      spec.rho0);

  auto initial = sample_density(spec.grid, rho0, spec.ensemble_size, spec.seed,
                                spec.integrator.threads);

  EvolutionPlan plan;
  plan.dt = spec.dt;
  plan.steps = spec.steps;
  plan.snapshot_stride = spec.snapshot_stride;
  plan.masses = spec.masses;
  plan.half_step_snapshots = true;

  StreamingIntegrator integrator(spec.grid, spec.masses, std::move(initial), spec.integrator);
  HSeries series;
  std::optional<WaveFunction> last;
  evolve(psi0, plan, [&](const WaveFunction& psi, SnapshotKind kind, std::size_t index) {
    integrator.observe(psi, kind, index);
    if (kind != SnapshotKind::Main) return;
    series.times.push_back(psi.time());
    series.values.push_back(
        h_function(integrator.current_positions(), spec.grid, density(psi), spec.graining));
    last = psi;
  });
  return RelaxationOutcome{std::move(series), integrator.finish(spec.seed, mode), psi0, *last};
}

}  // namespace bohm
