#include <cmath>
#include <numbers>

#include "bohm/experiments.hpp"
#include "doctest.h"
#include "unit/helpers.hpp"

using namespace bohm;
using testing::error_kind_of;

namespace {

/// Freely evolved Gaussian amplitude (density std sigma0 at t = 0), hbar = m = 1.
Complex free_gaussian(double y, double c, double sigma0, double t) {
  const Complex spread{1.0, t / (2.0 * sigma0 * sigma0)};
  return std::exp(-(y - c) * (y - c) / (4.0 * sigma0 * sigma0 * spread)) / std::sqrt(spread);
}

double check_value(const ExperimentReport& r, const char* name) {
  const auto* c = r.find_check(name);
  REQUIRE(c != nullptr);
  return c->measured;
}

bool check_passed(const ExperimentReport& r, const char* name) {
  const auto* c = r.find_check(name);
  REQUIRE(c != nullptr);
  return c->passed;
}

}  // namespace

TEST_CASE("preset names round-trip") {
  for (auto p : {Preset::DoubleSlit, Preset::PointerMeasurement, Preset::BarrierDwell,
                 Preset::Stationary, Preset::Relaxation}) {
    CHECK(preset_from_string(to_string(p)) == p);
    const auto c = default_config(p);
    CHECK(c.steps % c.snapshot_stride == 0);
    CHECK(!c.grid.empty());
  }
  CHECK(!preset_from_string("triple_slit"));
}

TEST_CASE("fringe visibility") {
  std::vector<double> flat, fringes, plain;
  for (int i = 0; i < 400; ++i) {
    const double y = -10.0 + 0.05 * i;
    const double env = std::exp(-y * y / 18.0);
    flat.push_back(1.0 + 0.6 * std::cos(2.0 * y));
    fringes.push_back(env * (1.0 + 0.6 * std::cos(2.0 * y)));
    plain.push_back(env);
  }
  // Flat envelope: (1.6 - 0.4) / (1.6 + 0.4), up to grid sampling of the extremes.
  CHECK(fringe_visibility(flat).visibility == doctest::Approx(0.6).epsilon(2e-3));
  // First minima sit near y = +-pi/2 where the envelope has dropped to exp(-pi^2/72).
  const double i_min = 0.4 * std::exp(-std::numbers::pi * std::numbers::pi / 72.0);
  const auto v = fringe_visibility(fringes);
  CHECK(v.visibility == doctest::Approx((1.6 - i_min) / (1.6 + i_min)).epsilon(1e-2));
  CHECK(v.fringes >= 3);
  CHECK(fringe_visibility(plain).visibility == 0.0);
  CHECK(fringe_visibility(plain).fringes == 1);
}

TEST_CASE("mode superposition for relaxation") {
  const auto modes = box_modes(16, 7);
  CHECK(modes.size() == 16);
  double weight = 0.0;
  for (const auto& m : modes) {
    weight += std::norm(m.amplitude);
    CHECK(m.index[0] >= -2);
    CHECK(m.index[0] <= 1);
  }
  CHECK(weight == doctest::Approx(1.0));
  CHECK(box_modes(16, 7)[3].amplitude == modes[3].amplitude);
  CHECK(box_modes(16, 8)[3].amplitude != modes[3].amplitude);
  CHECK(error_kind_of([] { (void)box_modes(12, 1); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("double slit") {
  auto c = default_config(Preset::DoubleSlit);
  c.ensemble_size = 2000;
  const auto r = run_double_slit(c);
  CHECK(r.all_passed());
  CHECK(check_value(r, "sign_preservation") == 0.0);

  // Analytic marginal of the two freely spreading slit packets.
  const SpatialGrid g(c.grid);
  const double t = c.horizon();
  std::vector<double> oracle;
  for (std::size_t j = 0; j < g.points(1); ++j) {
    const double y = g.coordinate(1, j);
    const auto a = free_gaussian(y, 2.0, 0.5, t) + free_gaussian(y, -2.0, 0.5, t);
    oracle.push_back(std::norm(a));
  }
  const double expected = fringe_visibility(oracle).visibility;
  CHECK(expected > 0.5);
  CHECK(*r.scalar("visibility") == doctest::Approx(expected).epsilon(1e-4));
  REQUIRE(r.histograms.size() == 1);
  double mass = 0.0;
  const auto& h = r.histograms[0];
  for (std::size_t b = 0; b < h.density.size(); ++b) mass += h.density[b] * (h.edges[b + 1] - h.edges[b]);
  CHECK(mass == doctest::Approx(1.0));

  SUBCASE("which-way pointer erases the fringes") {
    c.double_slit.which_way = true;
    c.grid = default_grid(c);
    const auto w = run_double_slit(c);
    CHECK(*w.scalar("visibility") < 0.05);
    CHECK(w.all_passed());
  }
}

TEST_CASE("pointer measurement") {
  auto c = default_config(Preset::PointerMeasurement);
  SUBCASE("Born rule and empty waves") {
    c.pointer.c1 = 0.6;
    c.pointer.c2 = 0.8;
    const auto r = run_pointer_measurement(c);
    REQUIRE(r.channels);
    const double n = static_cast<double>(c.ensemble_size);
    CHECK(std::abs(r.channels->fractions[0] - 0.36) < 3.0 * std::sqrt(0.36 * 0.64 / n));
    CHECK(r.channels->fractions[0] + r.channels->fractions[1] + r.channels->unclassified ==
          doctest::Approx(1.0));
    CHECK(check_value(r, "empty_wave") < 1e-4);
    CHECK(r.all_passed());
  }
  SUBCASE("overlapping pointer states are rejected") {
    c.pointer.pointer_shift = 2.0;
    CHECK(error_kind_of([&] { (void)run_pointer_measurement(c); }) == ErrorKind::OverlapTooLarge);
  }
  SUBCASE("thread count does not change trajectories") {
    c.ensemble_size = 500;
    c.pointer.empty_wave_check = false;
    const auto one = run_pointer_measurement(c);
    c.threads = 3;
    const auto three = run_pointer_measurement(c);
    for (std::size_t i = 0; i < one.ensemble->size(); ++i) {
      CHECK((*one.ensemble)[i].positions() == (*three.ensemble)[i].positions());
    }
  }
  SUBCASE("wrong dimensionality") {
    c.grid = {Axis{-16.0, 16.0, 128}};
    CHECK(error_kind_of([&] { (void)run_pointer_measurement(c); }) == ErrorKind::InvalidArgument);
  }
}

TEST_CASE("barrier dwell") {
  auto c = default_config(Preset::BarrierDwell);
  c.ensemble_size = 3000;
  SUBCASE("free passage matches the density integral") {
    c.barrier.v0 = 0.0;
    const auto r = run_barrier_dwell(c);
    REQUIRE(r.dwell);
    CHECK(std::abs(r.dwell->mean - r.dwell->oracle) < 0.02 * r.dwell->oracle);
    // A packet at speed 1.5 crosses a unit interval in about 2/3.
    CHECK(r.dwell->oracle == doctest::Approx(1.0 / 1.5).epsilon(0.05));
    CHECK(r.dwell->transmission > 0.99);
  }
  SUBCASE("tunnelling") {
    const auto r = run_barrier_dwell(c);
    CHECK(r.dwell->transmission > 0.2);
    CHECK(r.dwell->transmission < 0.9);
    CHECK(check_passed(r, "transmission"));
    CHECK(check_passed(r, "equivariance"));
  }
}

TEST_CASE("stationary states") {
  auto c = default_config(Preset::Stationary);
  c.ensemble_size = 200;
  for (unsigned level : {0U, 1U, 2U}) {
    c.stationary.levels = {level};
    const auto r = run_stationary(c);
    CHECK(check_value(r, "at_rest") < 1e-6);
    CHECK(check_value(r, "node_crossings") == 0.0);
  }
  c.stationary.levels = {0, 1};
  c.stationary.amplitudes = {Complex{1.0}, Complex{1.0}};
  const auto moving = run_stationary(c);
  CHECK(check_value(moving, "motion") > 0.1);
}

TEST_CASE("relaxation preset") {
  auto c = default_config(Preset::Relaxation);
  c.grid = {Axis{0.0, 2.0 * std::numbers::pi, 32}, Axis{0.0, 2.0 * std::numbers::pi, 32}};
  c.relaxation.cell_points = 4;
  c.steps = 500;
  c.snapshot_stride = 50;
  c.dt = 4e-3;
  c.ensemble_size = 2000;
  const auto r = run_relaxation(c);
  REQUIRE(r.h);
  CHECK(r.h->values.size() == 11);
  CHECK(check_passed(r, "h_nonnegative"));
  CHECK(r.h->values.back() < r.h->values.front());
}
