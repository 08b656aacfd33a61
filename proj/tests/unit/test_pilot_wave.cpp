#include <algorithm>
#include <cmath>
#include <numbers>

#include "bohm/pilot_wave.hpp"
#include "bohm/propagator.hpp"
#include "bohm/trajectories.hpp"
#include "doctest.h"
#include "unit/helpers.hpp"

using namespace bohm;
using testing::error_kind_of;
using testing::line;
using testing::plane;

namespace {

EvolutionPlan plan_for(double dt, std::size_t steps, std::size_t stride, std::size_t dims = 1) {
  EvolutionPlan p;
  p.dt = dt;
  p.steps = steps;
  p.snapshot_stride = stride;
  p.masses = MassVector::uniform(dims, 1.0);
  return p;
}

WaveFunction gaussian_1d(const SpatialGrid& g, double c, double s, double k) {
  const double cc[] = {c}, ss[] = {s}, kk[] = {k};
  return make_gaussian(g, cc, ss, kk);
}

}  // namespace

TEST_CASE("guidance velocity") {
  const auto g = line(-20.0, 20.0, 512);

  SUBCASE("vanishes for real wavefunctions") {
    for (const auto& psi : {gaussian_1d(g, 1.0, 1.2, 0.0), make_harmonic_eigenstate(g, 2, 1.0, 1.0)}) {
      const auto v = velocity_field(psi, MassVector::uniform(1, 1.0));
      for (std::size_t i = 0; i < psi.size(); ++i) {
        // Roundoff is amplified by 1/|psi| in the far tails.
        if (std::abs(g.coordinate(0, i)) < 5.0) CHECK(std::abs(v.components[0][i]) < 1e-10);
      }
    }
  }
  SUBCASE("plane wave moves at hbar k / m") {
    const auto ring = line(0.0, 2.0 * std::numbers::pi, 64);
    const double k[] = {3.0};
    const auto v = velocity_field(make_plane_wave(ring, k), MassVector::uniform(1, 2.0));
    CHECK(v.masked_count == 0);
    for (double x : v.components[0]) CHECK(x == doctest::Approx(1.5).epsilon(1e-12));
  }
  SUBCASE("boosted Gaussian carries its boost everywhere it has support") {
    const auto psi = gaussian_1d(g, 0.0, 1.0, 2.0);
    const auto v = velocity_field(psi, MassVector::uniform(1, 1.0));
    CHECK(v.components[0][g.nearest_index(Point{0.0, 0.0})] == doctest::Approx(2.0).epsilon(1e-10));
    for (std::size_t i = 0; i < psi.size(); ++i) {
      if (std::abs(g.coordinate(0, i)) < 5.0) CHECK(std::abs(v.components[0][i] - 2.0) < 1e-8);
    }
    CHECK(v.masked_count > 0);
  }
  SUBCASE("invariant under a global phase") {
    const auto psi = gaussian_1d(g, -1.0, 1.3, 0.7);
    std::vector<Complex> rotated(psi.amplitudes().begin(), psi.amplitudes().end());
    for (auto& a : rotated) a *= std::polar(1.0, 1.234);
    const WaveFunction phi(g, rotated);
    const MassVector m = MassVector::uniform(1, 1.0);
    const auto a = polar_fields(psi, m);
    const auto b = polar_fields(phi, m);
    for (std::size_t i = 0; i < psi.size(); ++i) {
      if (std::abs(g.coordinate(0, i) + 1.0) > 5.0) continue;
      CHECK(std::abs(a.velocity[0][i] - b.velocity[0][i]) < 1e-12);
      CHECK(std::abs(a.quantum_potential[i] - b.quantum_potential[i]) <
            1e-9 * std::max(1.0, std::abs(a.quantum_potential[i])));
    }
  }
  SUBCASE("zero wavefunction is all nodes") {
    std::vector<Complex> zeros(g.size());
    const WaveFunction psi(g, zeros, 0.0, 1.0, Normalization::Unnormalized);
    CHECK(error_kind_of([&] { (void)velocity_field(psi, MassVector::uniform(1, 1.0)); }) ==
          ErrorKind::AllNodes);
  }
}

TEST_CASE("transverse velocity vanishes on a mirror plane") {
  const auto g = plane(-8.0, 8.0, 64, -8.0, 8.0, 64);
  const double s[] = {0.8, 0.8}, k[] = {1.0, 0.0};
  const double up[] = {0.0, 2.0}, down[] = {0.0, -2.0};
  const auto psi = superpose(make_gaussian(g, up, s, k), make_gaussian(g, down, s, k), 1.0, 1.0);
  auto plan = plan_for(5e-3, 200, 200, 2);
  const auto later = evolve(psi, plan).back();
  const std::size_t mid = 32;
  REQUIRE(g.coordinate(1, mid) == doctest::Approx(0.0));
  for (const auto* state : {&psi, &later}) {
    const auto v = velocity_field(*state, plan.masses);
    for (std::size_t i = 0; i < g.points(0); ++i) {
      const std::size_t idx = g.index(std::array<std::size_t, 2>{i, mid});
      if (!v.node_mask[idx]) CHECK(std::abs(v.components[1][idx]) < 1e-9);
    }
  }
}

TEST_CASE("quantum potential") {
  SUBCASE("Gaussian matches the closed form") {
    const auto g = line(-16.0, 16.0, 512);
    const double sigma = 1.0;
    const auto q = quantum_potential(gaussian_1d(g, 0.0, sigma, 0.0), MassVector::uniform(1, 1.0));
    auto oracle = [&](double x) {
      return 0.5 * (1.0 / (2.0 * sigma * sigma) - x * x / (4.0 * std::pow(sigma, 4)));
    };
    CHECK(q.values[g.nearest_index(Point{0.0, 0.0})] == doctest::Approx(0.25).epsilon(1e-4));
    CHECK(std::abs(q.values[g.nearest_index(Point{2.0, 0.0})] + 0.25) < 1e-4);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double x = g.coordinate(0, i);
      if (std::abs(x) < 6.0) CHECK(std::abs(q.values[i] - oracle(x)) < 1e-6);
    }
  }
  SUBCASE("first excited oscillator state: smooth away from its node") {
    const auto g = line(-16.0, 16.0, 512);
    const auto q = quantum_potential(make_harmonic_eigenstate(g, 1, 1.0, 1.0), MassVector::uniform(1, 1.0));
    const std::size_t zero = g.nearest_index(Point{0.0, 0.0});
    REQUIRE(g.coordinate(0, zero) == doctest::Approx(0.0));
    CHECK(q.node_mask[zero] == 1);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double x = g.coordinate(0, i);
      if (!q.node_mask[i] && std::abs(x) < 5.0) CHECK(std::abs(q.values[i] - (1.5 - 0.5 * x * x)) < 1e-6);
    }
  }
  SUBCASE("near-nodes produce flagged spikes") {
    const auto g = line(0.0, 2.0 * std::numbers::pi, 256);
    const double k = 4.0;
    const auto psi = make_wavefunction(g, [&](const Point& p) {
      return std::polar(1.0, k * p[0]) + 0.999 * std::polar(1.0, -k * p[0]);
    });
    const auto q = quantum_potential(psi, MassVector::uniform(1, 1.0));
    std::size_t spikes = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (!q.spike_mask[i]) continue;
      ++spikes;
      // Every spike sits next to a zero of cos(k x).
      CHECK(std::abs(std::cos(k * g.coordinate(0, i))) < 0.1);
    }
    CHECK(spikes > 0);
    const auto peak = *std::max_element(q.values.begin(), q.values.end(),
                                        [](double a, double b) { return std::abs(a) < std::abs(b); });
    CHECK(std::abs(peak) > 100.0 * q.median_abs);
  }
}

TEST_CASE("action gradient reproduces the momentum field") {
  const auto g = line(-20.0, 20.0, 512);
  auto plan = plan_for(1e-3, 1000, 1000);
  const auto psi = evolve(gaussian_1d(g, -2.0, 1.0, 1.5), plan).back();
  const auto fields = polar_fields(psi, plan.masses);
  REQUIRE(fields.action_1d.has_value());
  const auto& s = *fields.action_1d;
  const double h = g.spacing(0);
  const double peak = *std::max_element(fields.density.begin(), fields.density.end());
  std::size_t checked = 0;
  for (std::size_t i = 1; i + 1 < g.size(); ++i) {
    if (fields.density[i] < 1e-4 * peak) continue;
    const double grad = (s[i + 1] - s[i - 1]) / (2.0 * h);
    CHECK(std::abs(grad - fields.velocity[0][i]) < 1e-3 * std::max(1.0, std::abs(grad)));
    ++checked;
  }
  CHECK(checked > 50);
  const auto g2 = plane(-8.0, 8.0, 64, -8.0, 8.0, 64);
  const double c2[] = {0.0, 0.0}, s2[] = {1.0, 1.0}, k2[] = {0.0, 0.0};
  CHECK(!polar_fields(make_gaussian(g2, c2, s2, k2), MassVector::uniform(2, 1.0)).action_1d);
}

TEST_CASE("continuity equation") {
  const auto g = line(-20.0, 20.0, 512);
  const auto psi = gaussian_1d(g, -3.0, 1.0, 1.0);
  const MassVector m = MassVector::uniform(1, 1.0);

  const double coarse = continuity_residual(evolve(psi, plan_for(1e-3, 2000, 20)), m);
  const double fine = continuity_residual(evolve(psi, plan_for(1e-3, 2000, 10)), m);
  MESSAGE("continuity residual " << coarse << " -> " << fine);
  CHECK(fine < 1e-3);
  CHECK(coarse / fine == doctest::Approx(4.0).epsilon(0.1));

  SUBCASE("stationary standing wave") {
    const auto ring = line(0.0, 2.0 * std::numbers::pi, 128);
    const auto standing = make_wavefunction(ring, [](const Point& p) { return Complex{std::cos(3.0 * p[0])}; });
    const double r = continuity_residual(evolve(standing, plan_for(1e-3, 1000, 10)), m);
    MESSAGE("stationary residual " << r);
    CHECK(r < 1e-8);
  }
  SUBCASE("needs three snapshots") {
    CHECK(error_kind_of([&] { (void)continuity_residual(evolve(psi, plan_for(1e-3, 1, 1)), m); }) ==
          ErrorKind::InvalidArgument);
  }
}

TEST_CASE("quantum Newton law along trajectories") {
  SUBCASE("plane wave: no force, constant momentum") {
    const auto ring = line(0.0, 2.0 * std::numbers::pi, 64);
    const double k[] = {2.0};
    auto plan = plan_for(1e-3, 200, 2);
    plan.half_step_snapshots = true;
    const auto tl = evolve(make_plane_wave(ring, k), plan);
    const std::vector<Point> starts{{1.0, 0.0}, {2.5, 0.0}};
    const auto ens = integrate(tl, starts, plan.masses);
    const double r = quantum_newton_residual(ens, tl, plan.potential, plan.masses);
    MESSAGE("plane-wave residual " << r);
    CHECK(r < 1e-8);
  }
  SUBCASE("oscillator coherent state") {
    const auto g = line(-12.8, 12.8, 128);
    const double x0 = 2.0;
    const auto psi = make_wavefunction(g, [&](const Point& p) {
      return Complex{std::exp(-0.5 * (p[0] - x0) * (p[0] - x0)) / std::pow(std::numbers::pi, 0.25)};
    });
    auto plan = plan_for(5e-3, 400, 2);
    plan.half_step_snapshots = true;
    plan.potential.add(potentials::Harmonic{{1.0}, {}});
    const auto tl = evolve(psi, plan);
    const std::vector<Point> starts{{1.0, 0.0}, {2.0, 0.0}, {3.2, 0.0}};
    const auto ens = integrate(tl, starts, plan.masses);
    // Uniform velocity field: every trajectory is a rigid shift of x0 cos t
    // (up to the O(dt^2) splitting error of the wave itself).
    for (std::size_t i = 0; i < ens.size(); ++i) {
      const auto& tr = ens[i];
      for (std::size_t j = 0; j < tr.size(); ++j) {
        const double t = tr.times()[j];
        CHECK(std::abs(tr.position(j)[0] - (starts[i][0] - x0 + x0 * std::cos(t))) < 1e-4);
      }
    }
    const double r = quantum_newton_residual(ens, tl, plan.potential, plan.masses);
    MESSAGE("coherent-state residual " << r);
    CHECK(r < 0.05);
  }
}
