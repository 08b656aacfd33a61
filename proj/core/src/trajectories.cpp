#include "bohm/trajectories.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "bohm/error.hpp"
#include "bohm/interpolation.hpp"
#include "bohm/parallel.hpp"

namespace bohm {

Trajectory::Trajectory(std::shared_ptr<const std::vector<double>> times, std::size_t dims)
    : times_(std::move(times)), dims_(dims) {}

bool Trajectory::any_flag(std::uint8_t mask) const noexcept {
  return std::any_of(flags_.begin(), flags_.end(), [&](std::uint8_t f) { return (f & mask) != 0; });
}

void Trajectory::append(const Point& q, std::uint8_t flags) {
  positions_.push_back(q);
  flags_.push_back(flags);
}

void Trajectory::reserve(std::size_t n) {
  positions_.reserve(n);
  flags_.reserve(n);
}

TrajectoryEnsemble::TrajectoryEnsemble(std::vector<Trajectory> trajectories,
                                       std::shared_ptr<const std::vector<double>> times,
                                       std::uint64_t seed, SamplingMode mode)
    : trajectories_(std::move(trajectories)), times_(std::move(times)), seed_(seed), mode_(mode) {
  if (trajectories_.empty()) throw Error(ErrorKind::InvalidArgument, "ensemble is empty");
  for (const auto& t : trajectories_) {
    if (t.size() != times_->size()) {
      throw Error(ErrorKind::InvalidArgument, "trajectory length does not match ensemble times");
    }
  }
}

std::vector<Point> TrajectoryEnsemble::positions_at(std::size_t j) const {
  std::vector<Point> out;
  out.reserve(trajectories_.size());
  for (const auto& t : trajectories_) out.push_back(t.position(j));
  return out;
}

std::size_t TrajectoryEnsemble::index_of_time(double t) const {
  const auto& ts = *times_;
  std::size_t best = 0;
  for (std::size_t j = 1; j < ts.size(); ++j) {
    if (std::abs(ts[j] - t) < std::abs(ts[best] - t)) best = j;
  }
  return best;
}

namespace {

struct FieldRef {
  const VelocityField* field;
  double time;
};

}  // namespace

struct StreamingIntegrator::Impl {
  SpatialGrid grid;
  MassVector masses;
  IntegratorOptions options;
  SpectralOps ops;
  std::vector<Point> current;
  std::vector<Trajectory> trajectories;
  std::shared_ptr<std::vector<double>> times = std::make_shared<std::vector<double>>();

  std::optional<VelocityField> prev;
  std::optional<VelocityField> mid;
  double prev_time = 0.0;
  std::size_t next_main = 0;

  Impl(const SpatialGrid& g, MassVector m, std::vector<Point> initial, IntegratorOptions o)
      : grid(g), masses(std::move(m)), options(o), ops(g), current(std::move(initial)) {
    require_masses_match(grid, masses);
    if (current.empty()) throw Error(ErrorKind::InvalidArgument, "no initial positions");
    for (const auto& q : current) {
      if (!grid.contains(q)) {
        throw Error(ErrorKind::InvalidArgument, "initial position lies outside the grid");
      }
    }
    trajectories.reserve(current.size());
    for (std::size_t i = 0; i < current.size(); ++i) trajectories.emplace_back(times, grid.dims());
  }

  void velocity(const VelocityField& f, const Point& q, Point& v, bool& on_node) const {
    if (f.node_mask[grid.nearest_index(q)]) on_node = true;
    const CubicStencil st(grid, q);
    for (std::size_t a = 0; a < grid.dims(); ++a) v[a] = st.apply(f.components[a]);
  }

  /// Field whose time is nearest to t among the three of this interval.
  static const VelocityField& nearest(const std::array<FieldRef, 3>& fields, double t) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < 3; ++k) {
      if (std::abs(fields[k].time - t) < std::abs(fields[best].time - t)) best = k;
    }
    return *fields[best].field;
  }

  Point rk4(const Point& q, double s, double h, const std::array<FieldRef, 3>& fields,
            bool& on_node) const {
    const std::size_t dims = grid.dims();
    Point k1{}, k2{}, k3{}, k4{}, y{};
    velocity(nearest(fields, s), q, k1, on_node);
    for (std::size_t a = 0; a < dims; ++a) y[a] = q[a] + 0.5 * h * k1[a];
    velocity(nearest(fields, s + 0.5 * h), y, k2, on_node);
    for (std::size_t a = 0; a < dims; ++a) y[a] = q[a] + 0.5 * h * k2[a];
    velocity(nearest(fields, s + 0.5 * h), y, k3, on_node);
    for (std::size_t a = 0; a < dims; ++a) y[a] = q[a] + h * k3[a];
    velocity(nearest(fields, s + h), y, k4, on_node);
    Point out = q;
    for (std::size_t a = 0; a < dims; ++a) {
      out[a] = q[a] + h / 6.0 * (k1[a] + 2.0 * k2[a] + 2.0 * k3[a] + k4[a]);
    }
    return out;
  }

  std::uint8_t advance_one(Point& q, double t0, double interval,
                           const std::array<FieldRef, 3>& fields) const {
    std::uint8_t flags = 0;
    double remaining = interval;
    double s = t0;
    double h = interval;
    int level = 0;
    while (remaining > 1e-12 * interval) {
      h = std::min(h, remaining);
      bool on_node = false;
      Point next = rk4(q, s, h, fields, on_node);
      if (on_node && level < options.max_node_retries) {
        h *= 0.5;
        ++level;
        continue;
      }
      if (on_node) flags |= step_flags::kNodeProximity;
      q = next;
      s += h;
      remaining -= h;
    }
    for (std::size_t a = 0; a < grid.dims(); ++a) {
      if (!std::isfinite(q[a])) {
        throw Error(ErrorKind::NonFinitePosition, "trajectory position became non-finite");
      }
      const double w = grid.wrap(a, q[a]);
      if (w != q[a]) {
        flags |= step_flags::kBoundaryWrap;
        q[a] = w;
      }
    }
    return flags;
  }

  void observe(const WaveFunction& psi, SnapshotKind kind, std::size_t index) {
    require_same_grid(psi.grid(), grid);
    if (kind == SnapshotKind::Midpoint) {
      if (!prev || index + 1 != next_main) {
        throw Error(ErrorKind::StageTimeUnavailable, "midpoint snapshot arrived out of order");
      }
      mid = velocity_field(psi, masses, options.nodes, ops);
      return;
    }
    if (index != next_main) {
      throw Error(ErrorKind::StageTimeUnavailable, "main snapshot arrived out of order");
    }
    auto field = velocity_field(psi, masses, options.nodes, ops);
    if (!prev) {
      for (std::size_t i = 0; i < current.size(); ++i) trajectories[i].append(current[i], 0);
      times->push_back(psi.time());
    } else {
      if (!mid) {
        throw Error(ErrorKind::StageTimeUnavailable,
                    "RK4 mid-stage time has no snapshot; record half-step snapshots");
      }
      const double t0 = prev_time;
      const double interval = psi.time() - t0;
      const std::array<FieldRef, 3> fields{FieldRef{&*prev, t0},
                                           FieldRef{&*mid, t0 + 0.5 * interval},
                                           FieldRef{&field, psi.time()}};
      std::vector<std::uint8_t> flags(current.size(), 0);
      parallel_for(current.size(), options.threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
          flags[i] = advance_one(current[i], t0, interval, fields);
        }
      });
      for (std::size_t i = 0; i < current.size(); ++i) trajectories[i].append(current[i], flags[i]);
      times->push_back(psi.time());
    }
    prev = std::move(field);
    mid.reset();
    prev_time = psi.time();
    ++next_main;
  }
};

StreamingIntegrator::StreamingIntegrator(const SpatialGrid& grid, MassVector masses,
                                         std::vector<Point> initial, IntegratorOptions options)
    : impl_(std::make_unique<Impl>(grid, std::move(masses), std::move(initial), options)) {}

StreamingIntegrator::~StreamingIntegrator() = default;
StreamingIntegrator::StreamingIntegrator(StreamingIntegrator&&) noexcept = default;
StreamingIntegrator& StreamingIntegrator::operator=(StreamingIntegrator&&) noexcept = default;

void StreamingIntegrator::observe(const WaveFunction& psi, SnapshotKind kind, std::size_t index) {
  impl_->observe(psi, kind, index);
}

SnapshotObserver StreamingIntegrator::observer() {
  return [impl = impl_.get()](const WaveFunction& psi, SnapshotKind kind, std::size_t index) {
    impl->observe(psi, kind, index);
  };
}

const std::vector<Point>& StreamingIntegrator::current_positions() const noexcept {
  return impl_->current;
}

TrajectoryEnsemble StreamingIntegrator::finish(std::uint64_t seed, SamplingMode mode) {
  if (impl_->times->empty()) {
    throw Error(ErrorKind::InvalidArgument, "no snapshots were observed");
  }
  std::shared_ptr<const std::vector<double>> times = impl_->times;
  return TrajectoryEnsemble(std::move(impl_->trajectories), times, seed, mode);
}

TrajectoryEnsemble integrate(const SnapshotTimeline& timeline,
                             std::span<const Point> initial_positions, const MassVector& masses,
                             std::size_t substeps_per_snapshot,
                             const IntegratorOptions& options) {
  if (substeps_per_snapshot != 1 || (timeline.size() > 1 && !timeline.has_midpoints())) {
    throw Error(ErrorKind::StageTimeUnavailable,
                "RK4 stage times must coincide with snapshots: record half-step snapshots and "
                "use one substep per snapshot interval");
  }
  StreamingIntegrator integrator(timeline.grid(), masses,
                                 std::vector<Point>(initial_positions.begin(),
                                                    initial_positions.end()),
                                 options);
  integrator.observe(timeline.snapshot(0), SnapshotKind::Main, 0);
  for (std::size_t j = 0; j + 1 < timeline.size(); ++j) {
    integrator.observe(timeline.midpoint(j), SnapshotKind::Midpoint, j);
    integrator.observe(timeline.snapshot(j + 1), SnapshotKind::Main, j + 1);
  }
  return integrator.finish(0, SamplingMode::ExplicitList);
}

std::optional<std::size_t> classify_channel(const Trajectory& trajectory,
                                            std::span<const Region> supports) {
  const std::size_t dims = trajectory.dims();
  for (std::size_t i = 0; i < supports.size(); ++i) {
    for (std::size_t j = i + 1; j < supports.size(); ++j) {
      bool overlap = true;
      for (std::size_t a = 0; a < dims; ++a) {
        if (!(supports[i].lo[a] < supports[j].hi[a] && supports[j].lo[a] < supports[i].hi[a])) {
          overlap = false;
        }
      }
      if (overlap) {
        throw Error(ErrorKind::OverlappingSupports,
                    "channel supports " + std::to_string(i) + " and " + std::to_string(j) +
                        " overlap");
      }
    }
  }
  const Point& q = trajectory.back();
  for (std::size_t i = 0; i < supports.size(); ++i) {
    bool inside = true;
    for (std::size_t a = 0; a < dims; ++a) {
      if (!(q[a] >= supports[i].lo[a] && q[a] < supports[i].hi[a])) inside = false;
    }
    if (inside) return i;
  }
  return std::nullopt;
}

double dwell_time(const Trajectory& trajectory, const Region& region) {
  const auto times = trajectory.times();
  auto inside = [&](std::size_t j) {
    const Point& q = trajectory.position(j);
    for (std::size_t a = 0; a < trajectory.dims(); ++a) {
      if (!(q[a] >= region.lo[a] && q[a] <= region.hi[a])) return 0.0;
    }
    return 1.0;
  };
  double total = 0.0;
  for (std::size_t j = 0; j + 1 < trajectory.size(); ++j) {
    total += 0.5 * (times[j + 1] - times[j]) * (inside(j) + inside(j + 1));
  }
  return total;
}

}  // namespace bohm
