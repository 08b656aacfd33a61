#include "bohm/potential.hpp"

#include <cmath>

#include "bohm/error.hpp"

namespace bohm {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void add_term(const PotentialTerm& term, const SpatialGrid& grid, const MassVector& masses,
              std::vector<Complex>& out) {
  const std::size_t n = grid.size();
  std::visit(
      Overloaded{
          [](const potentials::Free&) {},
          [&](const potentials::Harmonic& h) {
            if (h.omega.size() != grid.dims() ||
                (!h.center.empty() && h.center.size() != grid.dims())) {
              throw Error(ErrorKind::InvalidArgument,
                          "harmonic potential needs one omega (and center) per axis");
            }
            for (std::size_t i = 0; i < n; ++i) {
              const Point q = grid.point(i);
              double v = 0.0;
              for (std::size_t a = 0; a < grid.dims(); ++a) {
                const double x = q[a] - (h.center.empty() ? 0.0 : h.center[a]);
                v += 0.5 * masses[a] * h.omega[a] * h.omega[a] * x * x;
              }
              out[i] += v;
            }
          },
          [&](const potentials::Barrier& b) {
            if (b.axis >= grid.dims() || !(b.b >= b.a) || !std::isfinite(b.v0)) {
              throw Error(ErrorKind::InvalidArgument, "barrier needs a <= b on an existing axis");
            }
            for (std::size_t i = 0; i < n; ++i) {
              const double x = grid.point(i)[b.axis];
              if (x >= b.a && x <= b.b) out[i] += b.v0;
            }
          },
          [&](const potentials::Tabulated& t) {
            if (t.values.size() != n) {
              throw Error(ErrorKind::GridMismatch, "tabulated potential size mismatch");
            }
            for (std::size_t i = 0; i < n; ++i) {
              if (!std::isfinite(t.values[i])) {
                throw Error(ErrorKind::InvalidArgument, "tabulated potential is not finite");
              }
              out[i] += t.values[i];
            }
          },
          [&](const potentials::AbsorbingMask& m) {
            if (!(m.width > 0.0) || !(m.strength >= 0.0)) {
              throw Error(ErrorKind::InvalidArgument,
                          "absorbing mask needs positive width and non-negative strength");
            }
            for (std::size_t i = 0; i < n; ++i) {
              const Point q = grid.point(i);
              double damp = 0.0;
              for (std::size_t a = 0; a < grid.dims(); ++a) {
                const Axis& ax = grid.axis(a);
                const double d = std::min(q[a] - ax.min, ax.max - q[a]);
                if (d < m.width) {
                  const double s = (m.width - d) / m.width;
                  damp += m.strength * s * s;
                }
              }
              out[i] -= Complex{0.0, damp};
            }
          },
      },
      term);
}

}  // namespace

PotentialSpec::PotentialSpec(std::initializer_list<PotentialTerm> terms) : terms_(terms) {}

PotentialSpec::PotentialSpec(std::vector<PotentialTerm> terms) : terms_(std::move(terms)) {}

PotentialSpec& PotentialSpec::add(PotentialTerm term) {
  terms_.push_back(std::move(term));
  return *this;
}

bool PotentialSpec::has_absorber() const noexcept {
  for (const auto& t : terms_) {
    if (const auto* m = std::get_if<potentials::AbsorbingMask>(&t); m && m->strength > 0.0) {
      return true;
    }
  }
  return false;
}

std::vector<Complex> PotentialSpec::sample(const SpatialGrid& grid,
                                           const MassVector& masses) const {
  require_masses_match(grid, masses);
  std::vector<Complex> v(grid.size(), Complex{0.0, 0.0});
  for (const auto& t : terms_) add_term(t, grid, masses, v);
  return v;
}

std::vector<double> PotentialSpec::sample_real(const SpatialGrid& grid,
                                               const MassVector& masses) const {
  const auto v = sample(grid, masses);
  std::vector<double> re(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) re[i] = v[i].real();
  return re;
}

}  // namespace bohm
