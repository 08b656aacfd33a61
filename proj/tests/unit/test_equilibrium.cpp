#include <algorithm>
#include <cmath>
#include <numbers>

#include "bohm/equilibrium.hpp"
#include "bohm/pilot_wave.hpp"
#include "doctest.h"
#include "unit/helpers.hpp"

using namespace bohm;
using testing::error_kind_of;
using testing::line;
using testing::plane;

namespace {

/// Textbook one-sample KS statistic against a continuous CDF, used as an
/// independent oracle for the library's grid-based version.
template <class Cdf>
double ks_oracle(const std::vector<double>& xs, Cdf cdf) {
  std::vector<double> fs;
  for (double x : xs) fs.push_back(cdf(x));
  std::sort(fs.begin(), fs.end());
  const auto n = static_cast<double>(fs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < fs.size(); ++i) {
    const double f = fs[i];
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

std::vector<double> axis0(const std::vector<Point>& pts) {
  std::vector<double> out;
  for (const auto& p : pts) out.push_back(p[0]);
  return out;
}

}  // namespace

TEST_CASE("sampling") {
  SUBCASE("uniform density passes KS against the uniform CDF") {
    const auto g = line(0.0, 1.0, 64);
    const std::vector<double> p(g.size(), 1.0);
    const std::size_t n = 100000;
    const auto xs = sample_density(g, p, n, 42);
    // Cells are centred on grid points, so the support is shifted by half a cell.
    const double h = g.spacing(0);
    const double d = ks_oracle(axis0(xs), [&](double x) {
      double u = x + 0.5 * h;
      if (u >= 1.0) u -= 1.0;
      return u;
    });
    CHECK(d < 1.63 / std::sqrt(static_cast<double>(n)));
    CHECK(ks_distance(xs, g, p) == doctest::Approx(d).epsilon(1e-9));
  }
  SUBCASE("a single occupied cell confines every sample") {
    const auto g = line(0.0, 1.0, 64);
    std::vector<double> p(g.size(), 0.0);
    p[17] = 64.0;
    const double centre = g.coordinate(0, 17), h = g.spacing(0);
    for (const auto& q : sample_density(g, p, 2000, 3)) {
      CHECK(q[0] >= centre - 0.5 * h);
      CHECK(q[0] < centre + 0.5 * h);
    }
  }
  SUBCASE("Gaussian mean within the CLT bound") {
    const auto g = line(-16.0, 16.0, 512);
    const double c[] = {1.3}, s[] = {1.5}, k[] = {0.0};
    const auto p = density(make_gaussian(g, c, s, k));
    const std::size_t n = 100000;
    const auto xs = axis0(sample_density(g, p, n, 9));
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(n);
    CHECK(std::abs(mean - 1.3) < 4.0 * 1.5 / std::sqrt(static_cast<double>(n)));
  }
  SUBCASE("2D marginals") {
    const auto g = plane(-12.0, 12.0, 64, -12.0, 12.0, 64);
    const double c[] = {0.5, 0.0}, s[] = {1.2, 1.5}, k[] = {0.0, 0.0};
    const auto p = density(make_gaussian(g, c, s, k));
    const auto pts = sample_density(g, p, 10000, 5);
    CHECK(ks_distance(pts, g, p) < 0.0163);
  }
  SUBCASE("determinism and thread independence") {
    const auto g = line(-16.0, 16.0, 512);
    const double c[] = {0.0}, s[] = {2.0}, k[] = {0.0};
    const auto p = density(make_gaussian(g, c, s, k));
    const auto a = sample_density(g, p, 5000, 11, 1);
    CHECK(a == sample_density(g, p, 5000, 11, 4));
    CHECK(a != sample_density(g, p, 5000, 12, 1));
  }
  SUBCASE("zero density is degenerate") {
    const auto g = line(0.0, 1.0, 16);
    const std::vector<double> p(g.size(), 0.0);
    CHECK(error_kind_of([&] { (void)sample_density(g, p, 10, 1); }) == ErrorKind::DegenerateDensity);
  }
}

TEST_CASE("KS distance bounds") {
  const auto g = line(0.0, 1.0, 256);
  const std::vector<double> p(g.size(), 1.0);
  SUBCASE("all samples at one point") {
    const std::vector<Point> pts(500, Point{0.5, 0.0});
    CHECK(ks_distance(pts, g, p) >= 0.5);
  }
  SUBCASE("samples at grid points stay within one cell mass") {
    std::vector<Point> pts;
    for (std::size_t i = 0; i < g.size(); ++i) pts.push_back({g.coordinate(0, i), 0.0});
    CHECK(ks_distance(pts, g, p) <= 1.0 / 256.0 + 1e-12);
  }
  CHECK(ks_critical_value_99(10000) == doctest::Approx(0.0163));
}

TEST_CASE("equivariance") {
  const auto g = line(-20.0, 20.0, 512);
  const double c[] = {0.0}, s[] = {1.0}, k[] = {0.5};
  const auto psi = make_gaussian(g, c, s, k);
  EvolutionPlan plan;
  plan.dt = 2e-3;
  plan.steps = 1000;
  plan.snapshot_stride = 10;
  plan.half_step_snapshots = true;
  plan.masses = MassVector::uniform(1, 1.0);
  const auto tl = evolve(psi, plan);
  const double checks[] = {0.0, 1.0, 2.0};

  SUBCASE("equilibrium ensemble stays in equilibrium") {
    const auto ens = integrate(tl, sample_density(g, density(psi), 10000, 21), plan.masses);
    for (const auto& r : equivariance_report(ens, tl, checks)) {
      MESSAGE("t=" << r.time << " D=" << r.distance);
      CHECK(r.distance < 0.0255);
      CHECK(!r.exceeds);
    }
  }
  SUBCASE("displaced ensemble is detected") {
    const double c2[] = {1.0};
    const auto wrong = density(make_gaussian(g, c2, s, k));
    const auto ens = integrate(tl, sample_density(g, wrong, 10000, 21), plan.masses);
    const auto report = equivariance_report(ens, tl, checks);
    // Shift by 1 sigma: KS gap 2 Phi(1/2) - 1 = 0.383.
    CHECK(report[0].distance > 0.35);
    for (const auto& r : report) CHECK(r.exceeds);
  }
  SUBCASE("stationary state freezes the statistic") {
    auto ho = plan;
    ho.potential.add(potentials::Harmonic{{1.0}, {}});
    const auto eig = make_harmonic_eigenstate(g, 2, 1.0, 1.0);
    const auto tl2 = evolve(eig, ho);
    const auto ens = integrate(tl2, sample_density(g, density(eig), 2000, 4), ho.masses);
    const auto r = equivariance_report(ens, tl2, checks);
    CHECK(std::abs(r[2].distance - r[0].distance) < 1e-4);
  }
}

TEST_CASE("coarse-grained H") {
  SUBCASE("two-cell hand value") {
    const auto g = line(0.0, 1.0, 16);
    std::vector<double> rho(16), p(16, 1.0);
    for (std::size_t i = 0; i < 16; ++i) rho[i] = i < 8 ? 1.6 : 0.4;
    const double expected = 0.8 * std::log(1.6) + 0.2 * std::log(0.4);
    CHECK(expected == doctest::Approx(0.1927).epsilon(1e-3));
    CHECK(std::abs(h_function(g, rho, p, CoarseGraining{8}) - expected) < 1e-12);
  }
  SUBCASE("zero at equality and non-negative otherwise") {
    const auto g = plane(0.0, 1.0, 32, 0.0, 1.0, 32);
    std::vector<double> p(g.size()), rho(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      const auto q = g.point(i);
      p[i] = 1.0 + 0.5 * std::sin(6.0 * q[0]) * std::cos(4.0 * q[1]);
      rho[i] = 1.0 + 0.9 * std::cos(3.0 * q[0] + q[1]);
    }
    CHECK(std::abs(h_function(g, p, p, CoarseGraining{4})) < 1e-10);
    CHECK(h_function(g, rho, p, CoarseGraining{4}) > 0.0);
    CHECK(h_function(g, p, rho, CoarseGraining{8}) >= -1e-10);
  }
  SUBCASE("empty P cell under occupied rho") {
    const auto g = line(0.0, 1.0, 16);
    std::vector<double> rho(16, 1.0), p(16, 0.0);
    for (std::size_t i = 0; i < 8; ++i) p[i] = 1.0;
    CHECK(error_kind_of([&] { (void)h_function(g, rho, p, CoarseGraining{8}); }) == ErrorKind::EmptyPCell);
    CHECK(h_function(g, p, rho, CoarseGraining{8}) == doctest::Approx(std::log(2.0)));
  }
  SUBCASE("graining must divide the grid") {
    const auto g = line(0.0, 1.0, 16);
    const std::vector<double> p(16, 1.0);
    CHECK(error_kind_of([&] { (void)h_function(g, p, p, CoarseGraining{3}); }) == ErrorKind::InvalidArgument);
    CHECK(error_kind_of([&] { (void)h_function(g, p, p, CoarseGraining{1}); }) == ErrorKind::InvalidArgument);
  }
  SUBCASE("sampled equilibrium sits below the floor, and the floor halves with n") {
    const auto g = plane(0.0, 1.0, 64, 0.0, 1.0, 64);
    std::vector<double> p(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      const auto q = g.point(i);
      p[i] = 1.0 + 0.7 * std::sin(2.0 * std::numbers::pi * q[0]);
    }
    const CoarseGraining cg{8};
    for (std::size_t n : {10000U, 20000U}) {
      const double h = h_function(sample_density(g, p, n, 77), g, p, cg);
      CHECK(h >= 0.0);
      CHECK(h < h_statistical_floor(cg.cell_count(g), n));
    }
    CHECK(h_statistical_floor(64, 20000) == doctest::Approx(0.5 * h_statistical_floor(64, 10000)));
  }
}

TEST_CASE("relaxation runs") {
  RelaxationSpec spec;
  spec.grid = plane(0.0, 2.0 * std::numbers::pi, 32, 0.0, 2.0 * std::numbers::pi, 32);
  spec.dt = 5e-3;
  spec.steps = 400;
  spec.snapshot_stride = 40;
  spec.ensemble_size = 4000;

  SUBCASE("equilibrium start stays below the floor") {
    spec.state = {{{1, 0}, {1.0, 0.0}}, {{0, 1}, {0.0, 1.0}}, {{-1, 1}, {0.7, 0.2}},
                  {{2, -1}, {0.5, -0.4}}};
    spec.rho0 = initial_density::Equilibrium{};
    const auto out = relaxation_run(spec);
    const double floor = h_statistical_floor(spec.graining.cell_count(spec.grid), spec.ensemble_size);
    REQUIRE(out.h.values.size() == 11);
    for (double h : out.h.values) {
      CHECK(h >= -1e-10);
      CHECK(h < floor);
    }
    CHECK(out.ensemble.sampling_mode() == SamplingMode::QuantumEquilibrium);
  }
  SUBCASE("a real standing wave freezes H") {
    spec.state = {{{2, 1}, {0.5, 0.0}}, {{-2, -1}, {0.5, 0.0}}};
    spec.rho0 = initial_density::Uniform{};
    spec.graining = CoarseGraining{4};
    const auto out = relaxation_run(spec);
    for (double h : out.h.values) CHECK(h == doctest::Approx(out.h.values.front()).epsilon(1e-9));
    CHECK(out.h.values.front() > 0.1);
  }
}
