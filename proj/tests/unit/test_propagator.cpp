#include <cmath>
#include <numbers>

#include "bohm/pilot_wave.hpp"
#include "bohm/propagator.hpp"
#include "doctest.h"
#include "unit/helpers.hpp"

using namespace bohm;
using testing::error_kind_of;
using testing::line;

namespace {

EvolutionPlan free_plan(double dt, std::size_t steps, std::size_t stride = 1) {
  EvolutionPlan p;
  p.dt = dt;
  p.steps = steps;
  p.snapshot_stride = stride;
  p.masses = MassVector::uniform(1, 1.0);
  return p;
}

double density_width(const WaveFunction& psi) {
  const auto& g = psi.grid();
  double m0 = 0.0, m1 = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const double x = g.coordinate(0, i);
    const double p = std::norm(psi[i]);
    m0 += p;
    m1 += p * x;
    m2 += p * x * x;
  }
  const double mean = m1 / m0;
  return std::sqrt(m2 / m0 - mean * mean);
}

/// Oscillator coherent state (hbar = m = omega = 1) released from x0 at rest.
Complex coherent_state(double x, double t, double x0) {
  const double q = x0 * std::cos(t);
  const double p = -x0 * std::sin(t);
  const double amp = std::exp(-0.5 * (x - q) * (x - q)) / std::pow(std::numbers::pi, 0.25);
  return std::polar(amp, p * x - 0.5 * p * q - 0.5 * t);
}

}  // namespace

TEST_CASE("free plane wave picks up the analytic dispersion phase") {
  const auto g = line(0.0, 2.0 * std::numbers::pi, 128);
  const double k[] = {5.0};
  const auto psi = make_plane_wave(g, k);
  const double dt = 1e-3;
  const auto out = step(psi, free_plan(dt, 1));
  const Complex factor = std::polar(1.0, -k[0] * k[0] * dt / 2.0);
  for (std::size_t i = 0; i < psi.size(); ++i) {
    CHECK(std::abs(out[i] - factor * psi[i]) < 1e-12);
    CHECK(std::abs(std::norm(out[i]) - std::norm(psi[i])) < 1e-12);
  }
  CHECK(out.time() == doctest::Approx(dt));
}

TEST_CASE("constant potential only applies a global phase") {
  const auto g = line(-20.0, 20.0, 512);
  const double c[] = {0.0}, s[] = {1.0}, k[] = {1.0};
  const auto psi = make_gaussian(g, c, s, k);
  auto plan = free_plan(1e-3, 1);
  plan.potential.add(potentials::Tabulated{std::vector<double>(g.size(), 3.0)});
  const auto out = step(psi, plan);
  const auto free = step(psi, free_plan(1e-3, 1));
  const Complex phase = std::polar(1.0, -3.0 * 1e-3);
  for (std::size_t i = 0; i < psi.size(); ++i) {
    CHECK(std::abs(std::norm(out[i]) - std::norm(free[i])) < 1e-12);
    CHECK(std::abs(out[i] - phase * free[i]) < 1e-12);
  }
}

TEST_CASE("harmonic ground state is stationary") {
  const auto g = line(-20.0, 20.0, 512);
  const auto psi = make_harmonic_eigenstate(g, 0, 1.0, 1.0);
  auto plan = free_plan(1e-3, 1000, 1000);
  plan.potential.add(potentials::Harmonic{{1.0}, {}});
  const auto timeline = evolve(psi, plan);
  const auto& last = timeline.back();
  double worst = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    worst = std::max(worst, std::abs(std::norm(last[i]) - std::norm(psi[i])));
  }
  MESSAGE("max density change over 1000 steps: " << worst);
  CHECK(worst < 1e-6);
}

TEST_CASE("evolve") {
  const auto g = line(-20.0, 20.0, 512);
  const double c[] = {0.0}, s[] = {1.0}, k0[] = {0.0};
  const auto psi = make_gaussian(g, c, s, k0);

  SUBCASE("zero steps keeps only the initial snapshot") {
    const auto tl = evolve(psi, free_plan(1e-3, 0));
    CHECK(tl.size() == 1);
    CHECK(!tl.has_midpoints());
  }
  SUBCASE("free Gaussian spreads analytically") {
    const auto tl = evolve(psi, free_plan(1e-3, 2000, 500));
    CHECK(tl.size() == 5);
    CHECK(tl.time(4) == doctest::Approx(2.0));
    CHECK(density_width(tl.back()) == doctest::Approx(std::sqrt(2.0)).epsilon(0.01));
    for (std::size_t j = 0; j < tl.size(); ++j) {
      CHECK(density_width(tl.snapshot(j)) ==
            doctest::Approx(testing::free_gaussian_sigma(1.0, tl.time(j))).epsilon(1e-6));
    }
  }
  SUBCASE("counter-propagating packets conserve norm through the crossing") {
    const double cl[] = {-6.0}, cr[] = {6.0}, kl[] = {3.0}, kr[] = {-3.0};
    const auto a = make_gaussian(g, cl, s, kl);
    const auto b = make_gaussian(g, cr, s, kr);
    const auto both = superpose(a, b, 1.0, 1.0);
    const auto tl = evolve(both, free_plan(1e-3, 4000, 100));
    for (std::size_t j = 0; j < tl.size(); ++j) {
      CHECK(std::abs(norm(tl.snapshot(j)) - 1.0) < 1e-9);
    }
  }
  SUBCASE("midpoints from even and odd strides agree") {
    auto even = free_plan(1e-3, 40, 4);
    even.half_step_snapshots = true;
    even.potential.add(potentials::Harmonic{{1.0}, {}});
    auto odd = even;
    odd.dt = 2e-3;
    odd.snapshot_stride = 1;
    odd.steps = 20;
    const auto a = evolve(psi, even);
    const auto b = evolve(psi, odd);
    REQUIRE(a.has_midpoints());
    REQUIRE(b.has_midpoints());
    CHECK(a.size() == 11);
    CHECK(b.size() == 21);
    // Midpoint 0 of `a` (t = 0.002) coincides with main snapshot 1 of `b`.
    CHECK(a.midpoint(0).time() == doctest::Approx(b.time(1)));
    for (std::size_t i = 0; i < psi.size(); ++i) {
      CHECK(std::abs(a.midpoint(0)[i] - b.snapshot(1)[i]) < 1e-7);
    }
    CHECK(b.midpoint(0).time() == doctest::Approx(1e-3));
    for (std::size_t i = 0; i < psi.size(); ++i) {
      CHECK(std::abs(b.midpoint(0)[i] - a.midpoint(0)[i]) < 1e-3);
    }
  }
}

TEST_CASE("plan validation") {
  const auto g = line(-20.0, 20.0, 512);
  const double c[] = {0.0}, s[] = {1.0}, k0[] = {0.0};
  const auto psi = make_gaussian(g, c, s, k0);
  CHECK(error_kind_of([&] { (void)step(psi, free_plan(0.01, 1)); }) ==
        ErrorKind::NyquistViolation);
  CHECK(error_kind_of([&] { (void)evolve(psi, free_plan(1e-3, 10, 3)); }) ==
        ErrorKind::InvalidArgument);
  auto bad_mass = free_plan(1e-3, 1);
  bad_mass.masses = MassVector::uniform(2, 1.0);
  CHECK(error_kind_of([&] { (void)step(psi, bad_mass); }) == ErrorKind::InvalidArgument);
  CHECK(max_kinetic_phase(g, MassVector::uniform(1, 1.0), 1.0, 1e-3) ==
        doctest::Approx(1e-3 * std::pow(std::numbers::pi / g.spacing(0), 2) / 2.0));
}

TEST_CASE("unitarity and time reversal") {
  const auto g = line(-20.0, 20.0, 512);
  const double c[] = {-3.0}, s[] = {1.0}, k[] = {2.0};
  const auto psi = make_gaussian(g, c, s, k);
  auto plan = free_plan(1e-3, 1);
  plan.potential.add(potentials::Harmonic{{0.5}, {}});
  plan.potential.add(potentials::Barrier{0.7, 1.0, 2.0, 0});
  SplitStepPropagator prop(g, plan, 1.0);

  auto cur = psi;
  for (int i = 0; i < 50; ++i) {
    const auto next = prop.step(cur);
    CHECK(std::abs(norm(next) - norm(cur)) < 1e-12);
    cur = next;
  }
  const auto there = prop.step(psi);
  const auto back = prop.step_back(there);
  for (std::size_t i = 0; i < psi.size(); ++i) CHECK(std::abs(back[i] - psi[i]) < 1e-10);
  CHECK(back.time() == doctest::Approx(0.0));
}

TEST_CASE("absorbing mask never increases the norm") {
  const auto g = line(-20.0, 20.0, 512);
  const double c[] = {5.0}, s[] = {1.0}, k[] = {4.0};
  const auto psi = make_gaussian(g, c, s, k);
  auto plan = free_plan(1e-3, 4000, 100);
  plan.potential.add(potentials::AbsorbingMask{5.0, 2.0});
  const auto tl = evolve(psi, plan);
  for (std::size_t j = 1; j < tl.size(); ++j) {
    CHECK(norm(tl.snapshot(j)) <= norm(tl.snapshot(j - 1)) + 1e-13);
    CHECK(tl.snapshot(j).normalization() == Normalization::Unnormalized);
  }
  CHECK(norm(tl.back()) < 0.5);
}

TEST_CASE("energy") {
  SUBCASE("plane wave") {
    const auto g = line(0.0, 2.0 * std::numbers::pi, 128);
    const double k[] = {7.0};
    const auto psi = make_plane_wave(g, k);
    const PotentialSpec none;
    CHECK(std::abs(energy(psi, none, MassVector::uniform(1, 2.0)) - 49.0 / 4.0) < 1e-10);
  }
  SUBCASE("oscillator ground state") {
    const auto g = line(-20.0, 20.0, 512);
    const auto psi = make_harmonic_eigenstate(g, 0, 1.5, 1.0);
    const PotentialSpec v{potentials::Harmonic{{1.5}, {}}};
    CHECK(std::abs(energy(psi, v, MassVector::uniform(1, 1.0)) - 0.75) < 1e-6);
  }
  SUBCASE("drift over 1e4 steps") {
    const auto g = line(-20.0, 20.0, 512);
    const double c[] = {-2.0}, s[] = {0.8}, k[] = {1.0};
    const auto psi = make_gaussian(g, c, s, k);
    auto plan = free_plan(1e-3, 10000, 1000);
    plan.potential.add(potentials::Harmonic{{1.0}, {}});
    const auto tl = evolve(psi, plan);
    const double e0 = energy(psi, plan.potential, plan.masses);
    double worst = 0.0;
    for (std::size_t j = 0; j < tl.size(); ++j) {
      worst = std::max(worst, std::abs(energy(tl.snapshot(j), plan.potential, plan.masses) - e0) / e0);
    }
    MESSAGE("relative energy drift: " << worst);
    CHECK(worst < 1e-5);
  }
}

TEST_CASE("Strang splitting converges at second order") {
  const auto g = line(-12.8, 12.8, 64);
  const double x0 = 2.0;
  const double horizon = 2.0;

  // The analytic oracle itself must match a very fine run.
  auto make0 = [&] {
    return make_wavefunction(g, [&](const Point& q) { return coherent_state(q[0], 0.0, x0); });
  };
  std::vector<double> errors;
  for (double dt : {0.1, 0.05, 0.025, 0.0125}) {
    auto plan = free_plan(dt, static_cast<std::size_t>(std::lround(horizon / dt)));
    plan.snapshot_stride = plan.steps;
    plan.potential.add(potentials::Harmonic{{1.0}, {}});
    const auto tl = evolve(make0(), plan);
    const auto& psi = tl.back();
    double err = 0.0;
    for (std::size_t i = 0; i < psi.size(); ++i) {
      err += std::norm(psi[i] - coherent_state(g.coordinate(0, i), horizon, x0));
    }
    errors.push_back(std::sqrt(err * g.cell_volume()));
  }
  for (std::size_t i = 0; i + 1 < errors.size(); ++i) {
    const double order = std::log2(errors[i] / errors[i + 1]);
    MESSAGE("dt halving " << i << ": error " << errors[i] << " -> " << errors[i + 1]
                          << ", order " << order);
    CHECK(order == doctest::Approx(2.0).epsilon(0.1));
  }
}
