#include "bohm/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iterator>
#include <numbers>
#include <string>

#include "bohm/error.hpp"
#include "bohm/rng.hpp"

namespace bohm {

namespace {

constexpr double kWhichWayMaxOverlap = 1e-8;

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct PresetName {
  Preset preset;
  std::string_view name;
};

constexpr PresetName kPresetNames[] = {
    {Preset::DoubleSlit, "double_slit"},
    {Preset::PointerMeasurement, "pointer_measurement"},
    {Preset::BarrierDwell, "barrier_dwell"},
    {Preset::Stationary, "stationary"},
    {Preset::Relaxation, "relaxation"},
};

using Clock = std::chrono::steady_clock;

SpatialGrid grid_of(const ExperimentConfig& c) {
  return SpatialGrid(c.grid.empty() ? default_grid(c) : c.grid);
}

void require_dims(const SpatialGrid& g, std::size_t dims, Preset p) {
  if (g.dims() != dims) {
    throw Error(ErrorKind::InvalidArgument, std::string(to_string(p)) + " needs a " +
                                                std::to_string(dims) + "D grid");
  }
}

EvolutionPlan plan_of(const ExperimentConfig& c, const MassVector& masses, PotentialSpec potential) {
  EvolutionPlan plan;
  plan.dt = c.dt;
  plan.steps = c.steps;
  plan.snapshot_stride = c.snapshot_stride;
  plan.potential = std::move(potential);
  plan.masses = masses;
  plan.half_step_snapshots = true;
  return plan;
}

std::vector<double> resolved_check_times(const ExperimentConfig& c) {
  if (!c.check_times.empty()) return c.check_times;
  return {0.0, 0.5 * c.horizon(), c.horizon()};
}

std::vector<double> resolved_field_times(const ExperimentConfig& c) {
  if (!c.field_times.empty()) return c.field_times;
  return {c.horizon()};
}

/// Main snapshot index nearest to t.
std::size_t main_index(const EvolutionPlan& plan, double t) {
  const double interval = plan.dt * static_cast<double>(plan.snapshot_stride);
  const double j = std::round(t / interval);
  const auto last = static_cast<double>(plan.steps / plan.snapshot_stride);
  return static_cast<std::size_t>(std::clamp(j, 0.0, last));
}

struct SimulationSetup {
  const WaveFunction& psi0;
  const EvolutionPlan& plan;
  std::vector<Point> initial;
  std::uint64_t seed = 0;
  SamplingMode mode = SamplingMode::QuantumEquilibrium;
  std::vector<double> check_times;
  std::vector<double> field_times;
  IntegratorOptions integrator;
};

struct SimulationOutput {
  TrajectoryEnsemble ensemble;
  std::vector<EquivarianceCheck> equivariance;
  std::vector<WaveFunction> fields;
  WaveFunction final;
};

using MainHook = std::function<void(const WaveFunction&, const std::vector<Point>&)>;

/// Streams the evolution into the integrator; equivariance and field snapshots
/// are taken on the fly so the timeline is never stored.
SimulationOutput simulate(SimulationSetup setup, const MainHook& hook = {}) {
  const auto& grid = setup.psi0.grid();
  const auto n = setup.initial.size();
  StreamingIntegrator integrator(grid, setup.plan.masses, std::move(setup.initial), setup.integrator);
  std::vector<EquivarianceCheck> checks(setup.check_times.size());
  std::vector<std::optional<WaveFunction>> fields(setup.field_times.size());
  std::vector<std::size_t> check_index, field_index;
  for (double t : setup.check_times) check_index.push_back(main_index(setup.plan, t));
  for (double t : setup.field_times) field_index.push_back(main_index(setup.plan, t));
  const double critical = ks_critical_value_99(n);
  std::optional<WaveFunction> last;

  evolve(setup.psi0, setup.plan, [&](const WaveFunction& psi, SnapshotKind kind, std::size_t index) {
    integrator.observe(psi, kind, index);
    if (kind != SnapshotKind::Main) return;
    const auto& q = integrator.current_positions();
    std::optional<std::vector<double>> p;
    for (std::size_t k = 0; k < checks.size(); ++k) {
      if (check_index[k] != index) continue;
      if (!p) p = density(psi);
      const double d = ks_distance(q, grid, *p);
      checks[k] = {psi.time(), d, critical, d > critical};
    }
    for (std::size_t k = 0; k < fields.size(); ++k) {
      if (field_index[k] == index) fields[k] = psi;
    }
    if (hook) hook(psi, q);
    last = psi;
  });

  SimulationOutput out{integrator.finish(setup.seed, setup.mode), std::move(checks), {}, *last};
  for (auto& f : fields) out.fields.push_back(std::move(*f));
  return out;
}

Check equivariance_check(const std::vector<EquivarianceCheck>& checks) {
  double worst = 0.0, critical = 0.0;
  for (const auto& c : checks) {
    worst = std::max(worst, c.distance);
    critical = c.critical;
  }
  return make_check("equivariance", worst, "<", critical);
}

/// Fraction of one grid cell (centred on x_i) overlapping [lo, hi] along an axis.
double cell_overlap(double x, double h, double lo, double hi) {
  return std::max(0.0, std::min(x + 0.5 * h, hi) - std::max(x - 0.5 * h, lo)) / h;
}

/// Probability inside [lo, hi] along axis 0 of a 1D density, cells treated as constant.
double probability_between(const SpatialGrid& g, std::span<const double> p, double lo, double hi) {
  const double h = g.spacing(0);
  double s = 0.0;
  for (std::size_t i = 0; i < g.points(0); ++i) s += p[i] * cell_overlap(g.coordinate(0, i), h, lo, hi);
  return s * h;
}

/// Bins of about 128 per axis built from whole grid cells.
Histogram histogram_along(std::string name, const SpatialGrid& g, std::span<const Point> q,
                          std::span<const double> p, std::size_t axis) {
  const std::size_t np = g.points(axis);
  std::size_t group = 1;
  while (np / group > 128) group *= 2;
  const std::size_t bins = np / group;
  const double h = g.spacing(axis);
  const double width = h * static_cast<double>(group);
  const double origin = g.axis(axis).min - 0.5 * h;

  Histogram out;
  out.name = std::move(name);
  out.axis = axis;
  for (std::size_t b = 0; b <= bins; ++b) out.edges.push_back(origin + width * static_cast<double>(b));
  out.density.assign(bins, 0.0);
  for (const auto& x : q) {
    double u = std::fmod(x[axis] - origin, g.length(axis));
    if (u < 0.0) u += g.length(axis);
    const auto b = std::min(bins - 1, static_cast<std::size_t>(u / width));
    out.density[b] += 1.0;
  }
  for (double& d : out.density) d /= static_cast<double>(q.size()) * width;
  const auto m = marginal(g, p, axis);
  double total = 0.0;
  for (double v : m) total += v;
  out.reference.assign(bins, 0.0);
  for (std::size_t j = 0; j < np; ++j) out.reference[j / group] += m[j] / (total * width);
  return out;
}

std::vector<double> final_coordinates(const TrajectoryEnsemble& e, std::size_t axis) {
  std::vector<double> out;
  out.reserve(e.size());
  for (const auto& t : e.trajectories()) out.push_back(t.back()[axis]);
  return out;
}

double pointer_overlap(const Axis& axis, double width, double shift, double hbar) {
  const SpatialGrid g({axis});
  const double s[] = {width}, k[] = {0.0}, up[] = {shift}, down[] = {-shift};
  return std::abs(inner_product(make_gaussian(g, up, s, k, hbar), make_gaussian(g, down, s, k, hbar)));
}

std::vector<Point> initial_sample(const WaveFunction& psi, const ExperimentConfig& c) {
  return sample_density(psi.grid(), density(psi), c.ensemble_size, c.seed, c.threads);
}

IntegratorOptions integrator_of(const ExperimentConfig& c) {
  IntegratorOptions o;
  o.threads = c.threads;
  return o;
}

void validate_common(const ExperimentConfig& c) {
  if (c.ensemble_size < 1) throw Error(ErrorKind::InvalidArgument, "ensemble_size must be >= 1");
  if (!(c.hbar > 0.0) || !(c.mass > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "hbar and mass must be positive");
  }
}

}  // namespace

std::string_view to_string(Preset preset) noexcept {
  for (const auto& p : kPresetNames) {
    if (p.preset == preset) return p.name;
  }
  return "unknown";
}

std::optional<Preset> preset_from_string(std::string_view name) noexcept {
  for (const auto& p : kPresetNames) {
    if (p.name == name) return p.preset;
  }
  return std::nullopt;
}

std::vector<Axis> default_grid(const ExperimentConfig& c) {
  switch (c.preset) {
    case Preset::DoubleSlit:
      if (c.double_slit.which_way) return {Axis{-32.0, 32.0, 512}, Axis{-20.0, 20.0, 128}};
      return {Axis{-16.0, 16.0, 128}, Axis{-32.0, 32.0, 512}};
    case Preset::PointerMeasurement:
      return {Axis{-16.0, 16.0, 128}, Axis{-20.0, 20.0, 128}};
    case Preset::BarrierDwell:
      return {Axis{-80.0, 80.0, 2048}};
    case Preset::Stationary:
      return {Axis{-16.0, 16.0, 512}};
    case Preset::Relaxation:
      return {Axis{0.0, kTwoPi, 64}, Axis{0.0, kTwoPi, 64}};
  }
  return {};
}

ExperimentConfig default_config(Preset preset) {
  ExperimentConfig c;
  c.preset = preset;
  switch (preset) {
    case Preset::DoubleSlit:
      c.dt = 5e-3;
      c.steps = 800;
      c.snapshot_stride = 8;
      break;
    case Preset::PointerMeasurement:
      c.dt = 1e-2;
      c.steps = 100;
      c.snapshot_stride = 2;
      break;
    case Preset::BarrierDwell:
      c.dt = 2e-3;
      c.steps = 15000;
      c.snapshot_stride = 50;
      break;
    case Preset::Stationary:
      c.dt = 1e-3;
      c.steps = 10000;
      c.snapshot_stride = 10;
      c.ensemble_size = 1000;
      break;
    case Preset::Relaxation:
      c.dt = 2e-3;
      c.steps = 5000;
      c.snapshot_stride = 10;
      break;
  }
  c.grid = default_grid(c);
  return c;
}

std::vector<std::string> available_checks(const ExperimentConfig& c) {
  switch (c.preset) {
    case Preset::DoubleSlit:
      if (c.double_slit.which_way) return {"equivariance", "arrival_ks", "visibility"};
      return {"equivariance", "arrival_ks", "sign_preservation", "visibility"};
    case Preset::PointerMeasurement:
      if (c.pointer.empty_wave_check) return {"equivariance", "born_rule", "empty_wave"};
      return {"equivariance", "born_rule"};
    case Preset::BarrierDwell:
      return {"equivariance", "dwell_oracle", "transmission"};
    case Preset::Stationary:
      if (c.stationary.levels.size() == 1) return {"equivariance", "at_rest", "node_crossings"};
      return {"equivariance", "motion"};
    case Preset::Relaxation:
      if (c.relaxation.start == RelaxationStart::Equilibrium) {
        return {"h_nonnegative", "h_floor", "equivariance"};
      }
      return {"h_nonnegative", "h_relaxation"};
  }
  return {};
}

Check make_check(std::string name, double measured, std::string relation, double threshold) {
  Check c{std::move(name), measured, threshold, std::move(relation), false};
  c.passed = c.relation == "<" ? measured < threshold : measured > threshold;
  return c;
}

const Check* ExperimentReport::find_check(std::string_view name) const noexcept {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

std::optional<double> ExperimentReport::scalar(std::string_view name) const noexcept {
  for (const auto& s : scalars) {
    if (s.name == name) return s.value;
  }
  return std::nullopt;
}

bool ExperimentReport::all_passed() const noexcept {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

std::vector<double> marginal(const SpatialGrid& grid, std::span<const double> p, std::size_t axis) {
  if (p.size() != grid.size()) throw Error(ErrorKind::GridMismatch, "density size mismatch");
  const std::size_t np = grid.points(axis);
  std::vector<double> m(np, 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) m[(i / grid.stride(axis)) % np] += p[i];
  const double w = grid.cell_volume() / grid.spacing(axis);
  for (double& v : m) v *= w;
  return m;
}

Visibility fringe_visibility(std::span<const double> profile) {
  if (profile.size() < 3) return {};
  const double peak = *std::max_element(profile.begin(), profile.end());
  if (!(peak > 0.0)) return {};
  // Envelope span: first to last point above 10% of the peak.
  const double floor = 0.1 * peak;
  std::size_t lo = 0, hi = profile.size() - 1;
  while (profile[lo] < floor) ++lo;
  while (profile[hi] < floor) --hi;
  std::vector<std::size_t> maxima, minima;
  for (std::size_t i = std::max<std::size_t>(lo, 1); i <= hi && i + 1 < profile.size(); ++i) {
    const double l = profile[i - 1], c = profile[i], r = profile[i + 1];
    if (c > l && c >= r) maxima.push_back(i);
    if (c < l && c <= r) minima.push_back(i);
  }
  Visibility out;
  out.fringes = maxima.size();
  // Central fringe: the peak against the deeper of its two neighbouring minima,
  // each of which must sit between two maxima.
  const auto peak_at = static_cast<std::size_t>(
      std::max_element(profile.begin(), profile.end()) - profile.begin());
  double deepest = peak;
  bool found = false;
  auto consider = [&](std::size_t m) {
    const bool left = std::any_of(maxima.begin(), maxima.end(), [&](std::size_t x) { return x < m; });
    const bool right = std::any_of(maxima.begin(), maxima.end(), [&](std::size_t x) { return x > m; });
    if (left && right && profile[m] < deepest) {
      deepest = profile[m];
      found = true;
    }
  };
  const auto right = std::upper_bound(minima.begin(), minima.end(), peak_at);
  if (right != minima.end()) consider(*right);
  if (right != minima.begin()) consider(*std::prev(right));
  if (found) out.visibility = (peak - deepest) / (peak + deepest);
  return out;
}

ModeSuperposition box_modes(std::size_t count, std::uint64_t phase_seed) {
  const auto side = static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(count))));
  if (count == 0 || side * side != count) {
    throw Error(ErrorKind::InvalidArgument, "mode_count must be a positive perfect square");
  }
  const int half = static_cast<int>(side / 2);
  ModeSuperposition modes;
  const double amp = 1.0 / std::sqrt(static_cast<double>(count));
  std::uint64_t k = 0;
  for (std::size_t i = 0; i < side; ++i) {
    for (std::size_t j = 0; j < side; ++j) {
      CounterRng rng(phase_seed, k++);
      modes.push_back({{static_cast<int>(i) - half, static_cast<int>(j) - half},
                       std::polar(amp, kTwoPi * rng.uniform())});
    }
  }
  return modes;
}

ExperimentReport run_double_slit(const ExperimentConfig& c) {
  const auto start = Clock::now();
  validate_common(c);
  const auto& d = c.double_slit;
  const SpatialGrid g = grid_of(c);
  require_dims(g, 2, c.preset);
  if (!(d.separation > 0.0) || !(d.slit_width > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "slit separation and width must be positive");
  }

  ExperimentReport report;
  report.preset = Preset::DoubleSlit;
  report.masses = MassVector::uniform(2, c.mass);
  std::size_t transverse = 1;
  std::optional<WaveFunction> psi0;
  if (!d.which_way) {
    const double s[] = {d.longitudinal_width, d.slit_width}, k[] = {d.boost, 0.0};
    const double up[] = {d.longitudinal_start, 0.5 * d.separation};
    const double down[] = {d.longitudinal_start, -0.5 * d.separation};
    psi0 = superpose(make_gaussian(g, up, s, k, c.hbar), make_gaussian(g, down, s, k, c.hbar), 1.0, 1.0);
  } else {
    transverse = 0;
    const double a = d.pointer_shift > 0.0 ? d.pointer_shift : 7.0 * d.pointer_width;
    const double overlap = pointer_overlap(g.axis(1), d.pointer_width, a, c.hbar);
    report.scalars.push_back({"pointer_overlap", overlap});
    if (overlap > kWhichWayMaxOverlap) {
      throw Error(ErrorKind::OverlapTooLarge,
                  "pointer states overlap by " + std::to_string(overlap) + "; increase the shift");
    }
    const double s[] = {d.slit_width, d.pointer_width}, k[] = {0.0, 0.0};
    const double up[] = {0.5 * d.separation, a}, down[] = {-0.5 * d.separation, -a};
    psi0 = superpose(make_gaussian(g, up, s, k, c.hbar), make_gaussian(g, down, s, k, c.hbar), 1.0, 1.0);
  }

  const auto plan = plan_of(c, report.masses, {});
  auto sim = simulate({*psi0, plan, initial_sample(*psi0, c), c.seed, SamplingMode::QuantumEquilibrium,
                       resolved_check_times(c), resolved_field_times(c), integrator_of(c)});
  const auto p = density(sim.final);
  const auto profile = marginal(g, p, transverse);
  const auto vis = fringe_visibility(profile);
  std::vector<Point> arrivals;
  for (const auto& t : sim.ensemble.trajectories()) arrivals.push_back(t.back());
  const double arrival_ks = ks_distance_axis(arrivals, g, p, transverse);

  report.histograms.push_back(histogram_along("transverse_arrival", g, arrivals, p, transverse));
  report.scalars.push_back({"visibility", vis.visibility});
  report.scalars.push_back({"fringes", static_cast<double>(vis.fringes)});
  report.scalars.push_back({"arrival_ks", arrival_ks});
  report.checks.push_back(equivariance_check(sim.equivariance));
  report.checks.push_back(make_check("arrival_ks", arrival_ks, "<", ks_critical_value_99(arrivals.size())));
  if (!d.which_way) {
    std::size_t violations = 0;
    for (const auto& t : sim.ensemble.trajectories()) {
      const bool above = t.front()[transverse] > 0.0;
      for (const auto& q : t.positions()) {
        if ((q[transverse] > 0.0) != above) {
          ++violations;
          break;
        }
      }
    }
    report.scalars.push_back({"sign_violations", static_cast<double>(violations)});
    report.checks.push_back(make_check("sign_preservation", static_cast<double>(violations), "<", 0.5));
    report.checks.push_back(make_check("visibility", vis.visibility, ">", 0.5));
  } else {
    report.checks.push_back(make_check("visibility", vis.visibility, "<", 0.05));
  }
  report.equivariance = std::move(sim.equivariance);
  report.fields = std::move(sim.fields);
  report.ensemble = std::move(sim.ensemble);
  report.runtime_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return report;
}

ExperimentReport run_pointer_measurement(const ExperimentConfig& c) {
  const auto start = Clock::now();
  validate_common(c);
  const auto& m = c.pointer;
  const SpatialGrid g = grid_of(c);
  require_dims(g, 2, c.preset);
  const double w1 = std::norm(m.c1), w2 = std::norm(m.c2);
  if (!(w1 + w2 > 0.0)) throw Error(ErrorKind::InvalidArgument, "channel amplitudes are both zero");

  ExperimentReport report;
  report.preset = Preset::PointerMeasurement;
  report.masses = MassVector::uniform(2, c.mass);
  const double a = m.pointer_shift > 0.0 ? m.pointer_shift : 7.0 * m.pointer_width;
  const double overlap = pointer_overlap(g.axis(1), m.pointer_width, a, c.hbar);
  report.scalars.push_back({"pointer_shift", a});
  report.scalars.push_back({"pointer_overlap", overlap});
  if (overlap > m.max_overlap) {
    throw Error(ErrorKind::OverlapTooLarge,
                "pointer supports overlap by " + std::to_string(overlap) + " > " +
                    std::to_string(m.max_overlap));
  }

  // Impulsive von Neumann map: channel I drags the pointer by +-a.
  const double s[] = {m.system_width, m.pointer_width}, k[] = {0.0, 0.0};
  const double at1[] = {-0.5 * m.system_separation, a}, at2[] = {0.5 * m.system_separation, -a};
  const auto branch1 = make_gaussian(g, at1, s, k, c.hbar);
  const auto branch2 = make_gaussian(g, at2, s, k, c.hbar);
  const auto psi0 = superpose(branch1, branch2, m.c1, m.c2);

  const auto plan = plan_of(c, report.masses, {});
  auto sim = simulate({psi0, plan, initial_sample(psi0, c), c.seed, SamplingMode::QuantumEquilibrium,
                       resolved_check_times(c), resolved_field_times(c), integrator_of(c)});

  // Channel I is the pointer half-space y > 0 (I = 1) or y < 0 (I = 2).
  const auto& ax = g.axis(0);
  const auto& ay = g.axis(1);
  const double lo_x = ax.min - g.length(0), hi_x = ax.max + g.length(0);
  const std::vector<Region> supports{{{lo_x, 0.0}, {hi_x, ay.max + g.length(1)}},
                                     {{lo_x, ay.min - g.length(1)}, {hi_x, 0.0}}};
  std::vector<double> counts(2, 0.0);
  double unclassified = 0.0;
  for (const auto& t : sim.ensemble.trajectories()) {
    if (const auto ch = classify_channel(t, supports)) {
      counts[*ch] += 1.0;
    } else {
      unclassified += 1.0;
    }
  }
  const auto n = static_cast<double>(sim.ensemble.size());
  ChannelFractions fr;
  fr.fractions = {counts[0] / n, counts[1] / n};
  fr.expected = {w1 / (w1 + w2), w2 / (w1 + w2)};
  fr.unclassified = unclassified / n;
  const double p1 = fr.expected[0];
  const double sigma = std::sqrt(std::max(p1 * (1.0 - p1), 1e-300) / n);
  const double born_sigmas = std::abs(fr.fractions[0] - p1) / sigma;
  report.scalars.push_back({"fraction_1", fr.fractions[0]});
  report.scalars.push_back({"fraction_2", fr.fractions[1]});
  report.scalars.push_back({"expected_1", p1});
  report.scalars.push_back({"born_deviation_sigmas", born_sigmas});
  report.checks.push_back(equivariance_check(sim.equivariance));
  report.checks.push_back(make_check("born_rule", born_sigmas, "<", 3.0));
  report.channels = fr;

  if (m.empty_wave_check) {
    // Re-integrate each channel's particles against that channel alone.
    double worst = 0.0;
    const WaveFunction* branches[] = {&branch1, &branch2};
    for (std::size_t ch = 0; ch < 2; ++ch) {
      std::vector<std::size_t> members;
      std::vector<Point> starts;
      for (std::size_t i = 0; i < sim.ensemble.size(); ++i) {
        const bool upper = sim.ensemble[i].front()[1] > 0.0;
        if (upper == (ch == 0)) {
          members.push_back(i);
          starts.push_back(sim.ensemble[i].front());
        }
      }
      if (members.empty()) continue;
      StreamingIntegrator collapsed(g, report.masses, std::move(starts), integrator_of(c));
      evolve(*branches[ch], plan, collapsed.observer());
      const auto alone = collapsed.finish();
      for (std::size_t r = 0; r < members.size(); ++r) {
        const auto& full = sim.ensemble[members[r]];
        for (std::size_t j = 0; j < full.size(); ++j) {
          for (std::size_t axis = 0; axis < 2; ++axis) {
            worst = std::max(worst, std::abs(full.position(j)[axis] - alone[r].position(j)[axis]));
          }
        }
      }
    }
    report.scalars.push_back({"empty_wave_max_deviation", worst});
    report.checks.push_back(make_check("empty_wave", worst, "<", 1e-4));
  }

  std::vector<Point> finals;
  for (const auto& t : sim.ensemble.trajectories()) finals.push_back(t.back());
  report.histograms.push_back(histogram_along("pointer_arrival", g, finals, density(sim.final), 1));
  report.equivariance = std::move(sim.equivariance);
  report.fields = std::move(sim.fields);
  report.ensemble = std::move(sim.ensemble);
  report.runtime_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return report;
}

ExperimentReport run_barrier_dwell(const ExperimentConfig& c) {
  const auto start = Clock::now();
  validate_common(c);
  const auto& b = c.barrier;
  const SpatialGrid g = grid_of(c);
  require_dims(g, 1, c.preset);
  if (!(b.a < b.b)) throw Error(ErrorKind::InvalidArgument, "barrier needs a < b");

  ExperimentReport report;
  report.preset = Preset::BarrierDwell;
  report.masses = MassVector::uniform(1, c.mass);
  report.potential.add(potentials::Barrier{b.v0, b.a, b.b, 0});
  if (b.absorber_width > 0.0) {
    report.potential.add(potentials::AbsorbingMask{b.absorber_width, b.absorber_strength});
  }
  const double cc[] = {b.start}, ss[] = {b.width}, kk[] = {b.boost};
  const auto psi0 = make_gaussian(g, cc, ss, kk, c.hbar);
  const auto plan = plan_of(c, report.masses, report.potential);

  std::vector<double> inside;
  auto sim = simulate({psi0, plan, initial_sample(psi0, c), c.seed, SamplingMode::QuantumEquilibrium,
                       resolved_check_times(c), resolved_field_times(c), integrator_of(c)},
                      [&](const WaveFunction& psi, const std::vector<Point>&) {
                        inside.push_back(probability_between(g, density(psi), b.a, b.b));
                      });

  DwellStats dw;
  const auto times = sim.ensemble.times();
  for (std::size_t j = 0; j + 1 < times.size(); ++j) {
    dw.oracle += 0.5 * (times[j + 1] - times[j]) * (inside[j] + inside[j + 1]);
  }
  const Region barrier{{b.a, 0.0}, {b.b, 0.0}};
  double sum = 0.0;
  for (const auto& t : sim.ensemble.trajectories()) {
    dw.per_trajectory.push_back(dwell_time(t, barrier));
    sum += dw.per_trajectory.back();
  }
  const auto n = static_cast<double>(dw.per_trajectory.size());
  dw.mean = sum / n;
  double var = 0.0;
  for (double x : dw.per_trajectory) var += (x - dw.mean) * (x - dw.mean);
  dw.stddev = n > 1 ? std::sqrt(var / (n - 1.0)) : 0.0;

  const auto p_final = density(sim.final);
  const auto xs = final_coordinates(sim.ensemble, 0);
  const double transmitted = static_cast<double>(
      std::count_if(xs.begin(), xs.end(), [&](double x) { return x > b.b; }));
  dw.transmission = transmitted / n;
  const double h = g.spacing(0);
  dw.transmission_oracle = probability_between(g, p_final, b.b, g.axis(0).max + h);
  const double t_sigma = std::sqrt(std::max(dw.transmission_oracle * (1.0 - dw.transmission_oracle), 1e-300) / n);
  const double dwell_error = dw.oracle > 0.0 ? std::abs(dw.mean - dw.oracle) / dw.oracle : std::abs(dw.mean);

  report.scalars.push_back({"dwell_mean", dw.mean});
  report.scalars.push_back({"dwell_stddev", dw.stddev});
  report.scalars.push_back({"dwell_oracle", dw.oracle});
  report.scalars.push_back({"dwell_relative_error", dwell_error});
  report.scalars.push_back({"transmission", dw.transmission});
  report.scalars.push_back({"transmission_oracle", dw.transmission_oracle});
  report.checks.push_back(equivariance_check(sim.equivariance));
  report.checks.push_back(make_check("dwell_oracle", dwell_error, "<", 0.02));
  report.checks.push_back(make_check(
      "transmission", std::abs(dw.transmission - dw.transmission_oracle) / t_sigma, "<", 3.0));

  Histogram hist;
  hist.name = "dwell_time";
  const double top = std::max(1e-12, *std::max_element(dw.per_trajectory.begin(), dw.per_trajectory.end()));
  const std::size_t bins = 64;
  for (std::size_t k = 0; k <= bins; ++k) hist.edges.push_back(top * static_cast<double>(k) / bins);
  hist.density.assign(bins, 0.0);
  for (double x : dw.per_trajectory) {
    hist.density[std::min(bins - 1, static_cast<std::size_t>(x / top * bins))] += 1.0 / (n * top / bins);
  }
  report.histograms.push_back(std::move(hist));
  std::vector<Point> finals;
  for (const auto& t : sim.ensemble.trajectories()) finals.push_back(t.back());
  report.histograms.push_back(histogram_along("final_position", g, finals, p_final, 0));

  report.dwell = std::move(dw);
  report.equivariance = std::move(sim.equivariance);
  report.fields = std::move(sim.fields);
  report.ensemble = std::move(sim.ensemble);
  report.runtime_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return report;
}

ExperimentReport run_stationary(const ExperimentConfig& c) {
  const auto start = Clock::now();
  validate_common(c);
  const auto& st = c.stationary;
  const SpatialGrid g = grid_of(c);
  require_dims(g, 1, c.preset);
  if (st.levels.empty() || st.levels.size() != st.amplitudes.size()) {
    throw Error(ErrorKind::InvalidArgument, "stationary levels and amplitudes must match and be non-empty");
  }

  ExperimentReport report;
  report.preset = Preset::Stationary;
  report.masses = MassVector::uniform(1, c.mass);
  report.potential.add(potentials::Harmonic{{st.omega}, {}});
  auto state = [&](double x) {
    Complex s{};
    for (std::size_t k = 0; k < st.levels.size(); ++k) {
      s += st.amplitudes[k] * harmonic_eigenfunction(st.levels[k], x, st.omega, c.mass, c.hbar);
    }
    return s;
  };
  const auto psi0 = make_wavefunction(g, [&](const Point& q) { return state(q[0]); }, 0.0, c.hbar);
  const auto plan = plan_of(c, report.masses, report.potential);
  auto sim = simulate({psi0, plan, initial_sample(psi0, c), c.seed, SamplingMode::QuantumEquilibrium,
                       resolved_check_times(c), resolved_field_times(c), integrator_of(c)});

  double displacement = 0.0;
  std::size_t crossings = 0;
  for (const auto& t : sim.ensemble.trajectories()) {
    const double q0 = t.front()[0];
    const bool sign0 = state(q0).real() > 0.0;
    bool crossed = false;
    for (const auto& q : t.positions()) {
      displacement = std::max(displacement, std::abs(q[0] - q0));
      if ((state(q[0]).real() > 0.0) != sign0) crossed = true;
    }
    if (crossed) ++crossings;
  }
  report.scalars.push_back({"max_displacement", displacement});
  report.checks.push_back(equivariance_check(sim.equivariance));
  if (st.levels.size() == 1) {
    // A single real eigenstate: particles sit still and never meet a node.
    report.scalars.push_back({"node_crossings", static_cast<double>(crossings)});
    report.checks.push_back(make_check("at_rest", displacement, "<", 1e-6));
    report.checks.push_back(make_check("node_crossings", static_cast<double>(crossings), "<", 0.5));
  } else {
    report.checks.push_back(make_check("motion", displacement, ">", 0.1));
  }
  std::vector<Point> finals;
  for (const auto& t : sim.ensemble.trajectories()) finals.push_back(t.back());
  report.histograms.push_back(histogram_along("final_position", g, finals, density(sim.final), 0));
  report.equivariance = std::move(sim.equivariance);
  report.fields = std::move(sim.fields);
  report.ensemble = std::move(sim.ensemble);
  report.runtime_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return report;
}

ExperimentReport run_relaxation(const ExperimentConfig& c) {
  const auto start = Clock::now();
  validate_common(c);
  const auto& r = c.relaxation;
  RelaxationSpec spec;
  spec.grid = SpatialGrid(c.grid.empty() ? default_grid(c) : c.grid);
  require_dims(spec.grid, 2, c.preset);
  spec.masses = MassVector::uniform(2, c.mass);
  spec.hbar = c.hbar;
  spec.state = box_modes(r.mode_count, r.phase_seed);
  if (r.start == RelaxationStart::Equilibrium) {
    spec.rho0 = initial_density::Equilibrium{};
  } else {
    spec.rho0 = initial_density::Uniform{};
  }
  spec.graining = CoarseGraining{r.cell_points};
  spec.dt = c.dt;
  spec.steps = c.steps;
  spec.snapshot_stride = c.snapshot_stride;
  spec.ensemble_size = c.ensemble_size;
  spec.seed = c.seed;
  spec.integrator = integrator_of(c);
  auto out = relaxation_run(spec);

  ExperimentReport report;
  report.preset = Preset::Relaxation;
  report.masses = spec.masses;
  const auto& h = out.h.values;
  const double lowest = *std::min_element(h.begin(), h.end());
  const double highest = *std::max_element(h.begin(), h.end());
  const double floor = h_statistical_floor(spec.graining.cell_count(spec.grid), spec.ensemble_size);
  const double ratio = h.front() > 0.0 ? h.back() / h.front() : 0.0;
  report.scalars.push_back({"h_initial", h.front()});
  report.scalars.push_back({"h_final", h.back()});
  report.scalars.push_back({"h_ratio", ratio});
  report.scalars.push_back({"h_floor", floor});
  report.checks.push_back(make_check("h_nonnegative", lowest, ">", -1e-10));
  const auto finals = out.ensemble.positions_at(out.ensemble.times().size() - 1);
  const double ks_final = ks_distance(finals, spec.grid, density(out.final));
  report.scalars.push_back({"ks_final", ks_final});
  if (r.start == RelaxationStart::Equilibrium) {
    report.checks.push_back(make_check("h_floor", highest, "<", floor));
    report.checks.push_back(make_check("equivariance", ks_final, "<", ks_critical_value_99(finals.size())));
  } else {
    report.checks.push_back(make_check("h_relaxation", ratio, "<", 0.5));
  }
  report.histograms.push_back(histogram_along("final_x", spec.grid, finals, density(out.final), 0));
  report.h = std::move(out.h);
  report.fields.push_back(std::move(out.final));
  report.ensemble = std::move(out.ensemble);
  report.runtime_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return report;
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  switch (config.preset) {
    case Preset::DoubleSlit:
      return run_double_slit(config);
    case Preset::PointerMeasurement:
      return run_pointer_measurement(config);
    case Preset::BarrierDwell:
      return run_barrier_dwell(config);
    case Preset::Stationary:
      return run_stationary(config);
    case Preset::Relaxation:
      return run_relaxation(config);
  }
  throw Error(ErrorKind::InvalidArgument, "unknown preset");
}

}  // namespace bohm
