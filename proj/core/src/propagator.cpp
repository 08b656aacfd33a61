#include "bohm/propagator.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <string>

#include "bohm/error.hpp"

namespace bohm {

double max_kinetic_phase(const SpatialGrid& grid, const MassVector& masses, double hbar,
                         double dt) {
  double rate = 0.0;
  for (std::size_t a = 0; a < grid.dims(); ++a) {
    const double k_nyq = std::numbers::pi / grid.spacing(a);
    rate += hbar * k_nyq * k_nyq / (2.0 * masses[a]);
  }
  return std::abs(dt) * rate;
}

void validate_plan(const EvolutionPlan& plan, const SpatialGrid& grid, double hbar) {
  require_masses_match(grid, plan.masses);
  if (!(plan.dt > 0.0) || !std::isfinite(plan.dt)) {
    throw Error(ErrorKind::InvalidArgument, "dt must be positive");
  }
  if (plan.snapshot_stride == 0) {
    throw Error(ErrorKind::InvalidArgument, "snapshot_stride must be positive");
  }
  if (plan.steps % plan.snapshot_stride != 0) {
    throw Error(ErrorKind::InvalidArgument,
                "snapshot_stride " + std::to_string(plan.snapshot_stride) +
                    " does not divide steps " + std::to_string(plan.steps));
  }
  const double phase = max_kinetic_phase(grid, plan.masses, hbar, plan.dt);
  if (!(phase < std::numbers::pi)) {
    throw Error(ErrorKind::NyquistViolation,
                "dt * max kinetic phase rate = " + std::to_string(phase) + " >= pi");
  }
}

SnapshotTimeline::SnapshotTimeline(std::vector<WaveFunction> snapshots,
                                   std::vector<WaveFunction> midpoints, double interval)
    : snapshots_(std::move(snapshots)), midpoints_(std::move(midpoints)), interval_(interval) {
  if (snapshots_.empty()) throw Error(ErrorKind::InvalidArgument, "timeline is empty");
  if (!midpoints_.empty() && midpoints_.size() + 1 != snapshots_.size()) {
    throw Error(ErrorKind::InvalidArgument, "midpoint count must be snapshot count - 1");
  }
  for (std::size_t j = 1; j < snapshots_.size(); ++j) {
    require_same_grid(snapshots_[0].grid(), snapshots_[j].grid());
    if (!(snapshots_[j].time() > snapshots_[j - 1].time())) {
      throw Error(ErrorKind::InvalidArgument, "snapshot times must increase");
    }
  }
}

struct SplitStepPropagator::Impl {
  struct Factors {
    std::vector<Complex> half_kick;
    std::vector<Complex> kinetic;
  };

  SpatialGrid grid;
  EvolutionPlan plan;
  double hbar;
  Fft fft;
  std::vector<Complex> potential;
  std::vector<double> kinetic_energy;  // T(k) per spectral index
  std::map<double, Factors> factors;
  std::vector<Complex> spectrum;

  Impl(const SpatialGrid& g, const EvolutionPlan& p, double h)
      : grid(g), plan(p), hbar(h), fft(g), spectrum(g.size()) {
    potential = plan.potential.sample(grid, plan.masses);
    std::vector<std::vector<double>> k;
    for (std::size_t a = 0; a < grid.dims(); ++a) k.push_back(wavenumbers(grid, a));
    kinetic_energy.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const auto ij = grid.unravel(i);
      double t = 0.0;
      for (std::size_t a = 0; a < grid.dims(); ++a) {
        const double ka = k[a][ij[a]];
        t += hbar * hbar * ka * ka / (2.0 * plan.masses[a]);
      }
      kinetic_energy[i] = t;
    }
  }

  const Factors& factors_for(double fraction) {
    auto it = factors.find(fraction);
    if (it != factors.end()) return it->second;
    const double dt = plan.dt * fraction;
    Factors f;
    f.half_kick.resize(grid.size());
    f.kinetic.resize(grid.size());
    const Complex minus_i{0.0, -1.0};
    for (std::size_t i = 0; i < grid.size(); ++i) {
      f.half_kick[i] = std::exp(minus_i * potential[i] * (0.5 * dt / hbar));
      f.kinetic[i] = std::polar(1.0, -kinetic_energy[i] * dt / hbar);
    }
    return factors.emplace(fraction, std::move(f)).first->second;
  }
};

SplitStepPropagator::SplitStepPropagator(const SpatialGrid& grid, const EvolutionPlan& plan,
                                         double hbar) {
  validate_plan(plan, grid, hbar);
  impl_ = std::make_unique<Impl>(grid, plan, hbar);
}

SplitStepPropagator::~SplitStepPropagator() = default;
SplitStepPropagator::SplitStepPropagator(SplitStepPropagator&&) noexcept = default;
SplitStepPropagator& SplitStepPropagator::operator=(SplitStepPropagator&&) noexcept = default;

double SplitStepPropagator::dt() const noexcept { return impl_->plan.dt; }

void SplitStepPropagator::advance(std::vector<Complex>& amplitudes, std::size_t count,
                                  double fraction) {
  if (amplitudes.size() != impl_->grid.size()) {
    throw Error(ErrorKind::GridMismatch, "amplitude count does not match propagator grid");
  }
  const auto& f = impl_->factors_for(fraction);
  auto& spec = impl_->spectrum;
  const std::size_t n = amplitudes.size();
  for (std::size_t s = 0; s < count; ++s) {
    for (std::size_t i = 0; i < n; ++i) amplitudes[i] *= f.half_kick[i];
    impl_->fft.forward(amplitudes, spec);
    for (std::size_t i = 0; i < n; ++i) spec[i] *= f.kinetic[i];
    impl_->fft.inverse(spec, amplitudes);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      amplitudes[i] *= f.half_kick[i];
      sum += std::norm(amplitudes[i]);
    }
    if (!std::isfinite(sum)) {
      throw Error(ErrorKind::NonFiniteAmplitude, "propagation produced non-finite amplitudes");
    }
  }
}

namespace {

Normalization output_normalization(const EvolutionPlan& plan) {
  return plan.potential.has_absorber() ? Normalization::Unnormalized : Normalization::Normalized;
}

void require_input_state(const WaveFunction& psi, const EvolutionPlan& plan) {
  if (!plan.potential.has_absorber() && psi.normalization() != Normalization::Normalized) {
    throw Error(ErrorKind::NonNormalized,
                "unitary evolution requires a normalized state (no absorbing mask active)");
  }
}

}  // namespace

WaveFunction SplitStepPropagator::step(const WaveFunction& psi) {
  require_same_grid(psi.grid(), impl_->grid);
  std::vector<Complex> amps(psi.amplitudes().begin(), psi.amplitudes().end());
  advance(amps, 1, 1.0);
  return WaveFunction(psi.grid(), std::move(amps), psi.time() + impl_->plan.dt, psi.hbar(),
                      output_normalization(impl_->plan));
}

WaveFunction SplitStepPropagator::step_back(const WaveFunction& psi) {
  require_same_grid(psi.grid(), impl_->grid);
  std::vector<Complex> amps(psi.amplitudes().begin(), psi.amplitudes().end());
  advance(amps, 1, -1.0);
  return WaveFunction(psi.grid(), std::move(amps), psi.time() - impl_->plan.dt, psi.hbar(),
                      output_normalization(impl_->plan));
}

WaveFunction step(const WaveFunction& psi, const EvolutionPlan& plan) {
  require_input_state(psi, plan);
  SplitStepPropagator prop(psi.grid(), plan, psi.hbar());
  return prop.step(psi);
}

void evolve(const WaveFunction& psi, const EvolutionPlan& plan, const SnapshotObserver& observer) {
  require_input_state(psi, plan);
  SplitStepPropagator prop(psi.grid(), plan, psi.hbar());
  const Normalization norm_flag = output_normalization(plan);
  const std::size_t stride = plan.snapshot_stride;
  const std::size_t intervals = plan.steps / stride;
  const double t0 = psi.time();
  const bool even_stride = stride % 2 == 0;

  std::vector<Complex> amps(psi.amplitudes().begin(), psi.amplitudes().end());
  observer(psi, SnapshotKind::Main, 0);
  for (std::size_t j = 0; j < intervals; ++j) {
    const double t_start = t0 + static_cast<double>(j * stride) * plan.dt;
    const double t_mid = t_start + 0.5 * static_cast<double>(stride) * plan.dt;
    if (plan.half_step_snapshots) {
      if (even_stride) {
        prop.advance(amps, stride / 2);
        observer(WaveFunction(psi.grid(), amps, t_mid, psi.hbar(), norm_flag),
                 SnapshotKind::Midpoint, j);
        prop.advance(amps, stride / 2);
      } else {
        std::vector<Complex> mid = amps;
        prop.advance(mid, stride, 0.5);
        observer(WaveFunction(psi.grid(), std::move(mid), t_mid, psi.hbar(), norm_flag),
                 SnapshotKind::Midpoint, j);
        prop.advance(amps, stride);
      }
    } else {
      prop.advance(amps, stride);
    }
    const double t_end = t0 + static_cast<double>((j + 1) * stride) * plan.dt;
    observer(WaveFunction(psi.grid(), amps, t_end, psi.hbar(), norm_flag), SnapshotKind::Main,
             j + 1);
  }
}

SnapshotTimeline evolve(const WaveFunction& psi, const EvolutionPlan& plan) {
  std::vector<WaveFunction> main;
  std::vector<WaveFunction> mid;
  evolve(psi, plan, [&](const WaveFunction& s, SnapshotKind kind, std::size_t) {
    (kind == SnapshotKind::Main ? main : mid).push_back(s);
  });
  return SnapshotTimeline(std::move(main), std::move(mid),
                          static_cast<double>(plan.snapshot_stride) * plan.dt);
}

double energy(const WaveFunction& psi, const PotentialSpec& potential, const MassVector& masses) {
  const SpatialGrid& grid = psi.grid();
  require_masses_match(grid, masses);
  Fft fft(grid);
  std::vector<Complex> spec(grid.size());
  fft.forward(psi.amplitudes(), spec);
  std::vector<std::vector<double>> k;
  for (std::size_t a = 0; a < grid.dims(); ++a) k.push_back(wavenumbers(grid, a));
  const double hbar = psi.hbar();
  double kinetic = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto ij = grid.unravel(i);
    double t = 0.0;
    for (std::size_t a = 0; a < grid.dims(); ++a) {
      t += hbar * hbar * k[a][ij[a]] * k[a][ij[a]] / (2.0 * masses[a]);
    }
    kinetic += std::norm(spec[i]) * t;
  }
  // Parseval: sum |psi_x|^2 = (1/N) sum |psi_k|^2.
  kinetic *= grid.cell_volume() / static_cast<double>(grid.size());

  const auto v = potential.sample_real(grid, masses);
  double pot = 0.0;
  double n2 = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double p = std::norm(psi[i]);
    pot += v[i] * p;
    n2 += p;
  }
  pot *= grid.cell_volume();
  n2 *= grid.cell_volume();
  return (kinetic + pot) / n2;
}

}  // namespace bohm
