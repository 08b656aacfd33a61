#pragma once

#include <variant>
#include <vector>

#include "bohm/grid.hpp"
#include "bohm/wavefunction.hpp"

namespace bohm {

namespace potentials {

struct Free {};

/// sum_a (1/2) m_a omega_a^2 (x_a - center_a)^2
struct Harmonic {
  std::vector<double> omega;
  std::vector<double> center;  // empty means origin
};

/// Rectangular barrier of height v0 on [a, b] along one axis.
struct Barrier {
  double v0 = 0.0;
  double a = 0.0;
  double b = 0.0;
  std::size_t axis = 0;
};

/// Real values sampled at every grid point (row-major).
struct Tabulated {
  std::vector<double> values;
};

/// Negative-imaginary sponge of the given width next to every domain edge,
/// rising quadratically to -i*strength at the edge.
struct AbsorbingMask {
  double width = 0.0;
  double strength = 0.0;
};

}  // namespace potentials

using PotentialTerm = std::variant<potentials::Free, potentials::Harmonic, potentials::Barrier,
                                   potentials::Tabulated, potentials::AbsorbingMask>;

/// Additive composition of potential terms.
class PotentialSpec {
 public:
  PotentialSpec() = default;
  PotentialSpec(std::initializer_list<PotentialTerm> terms);
  explicit PotentialSpec(std::vector<PotentialTerm> terms);

  PotentialSpec& add(PotentialTerm term);

  [[nodiscard]] const std::vector<PotentialTerm>& terms() const noexcept { return terms_; }
  [[nodiscard]] bool has_absorber() const noexcept;

  /// Complex potential at every grid point. Real part finite, imaginary part
  /// non-positive and confined to sponge zones.
  [[nodiscard]] std::vector<Complex> sample(const SpatialGrid& grid,
                                            const MassVector& masses) const;
  /// Real part only.
  [[nodiscard]] std::vector<double> sample_real(const SpatialGrid& grid,
                                                const MassVector& masses) const;

 private:
  std::vector<PotentialTerm> terms_;
};

}  // namespace bohm
