#ifndef ROTORPATH_ROTOR_MODEL_HPP
#define ROTORPATH_ROTOR_MODEL_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rotorpath/constants.hpp"
#include "rotorpath/error.hpp"
#include "rotorpath/matrix.hpp"
#include "rotorpath/quadrature.hpp"

namespace rotorpath {

/// Rigid diatomic rotor parameters.
struct MoleculeSpec {
  std::string name;
  double moment_of_inertia = 0.0;  // kg m^2
  double delta_alpha = 0.0;        // C m^2 / V
  std::optional<double> reduced_mass;  // kg
  std::optional<double> bond_length;   // m

  /// Builds a spec with I = mu R^2.
  static MoleculeSpec from_geometry(std::string name, double reduced_mass, double bond_length,
                                    double delta_alpha) {
    MoleculeSpec spec;
    spec.name = std::move(name);
    spec.reduced_mass = reduced_mass;
    spec.bond_length = bond_length;
    spec.moment_of_inertia = reduced_mass * bond_length * bond_length;
    spec.delta_alpha = delta_alpha;
    return spec;
  }

  void validate() const {
    if (!(moment_of_inertia > 0.0) || !std::isfinite(moment_of_inertia)) {
      throw ConfigError("moment_of_inertia", "must be positive and finite");
    }
    if (!(delta_alpha > 0.0) || !std::isfinite(delta_alpha)) {
      throw ConfigError("delta_alpha", "must be positive and finite");
    }
    if (reduced_mass.has_value() != bond_length.has_value()) {
      throw ConfigError("reduced_mass", "reduced_mass and bond_length must be given together");
    }
    if (reduced_mass) {
      const double derived = *reduced_mass * *bond_length * *bond_length;
      if (!(std::abs(moment_of_inertia - derived) / moment_of_inertia < 1e-12)) {
        throw ConfigError("moment_of_inertia", "inconsistent with reduced_mass * bond_length^2");
      }
    }
  }
};

/// Built-in isotope parameters. Both nitrogen isotopologues share the polarizability anisotropy.
namespace presets {
inline constexpr double kNitrogenDeltaAlpha = 1.97e-40;

inline MoleculeSpec nitrogen14() { return {"14N2", 1.4e-46, kNitrogenDeltaAlpha, {}, {}}; }
inline MoleculeSpec nitrogen15() { return {"15N2", 1.5e-46, kNitrogenDeltaAlpha, {}, {}}; }
}  // namespace presets

/// E_l = hbar^2 l (l + 1) / (2 I).
inline double rotor_energy(std::size_t l, const MoleculeSpec& spec) {
  const double ll = static_cast<double>(l);
  return PhysicalConstants::hbar * PhysicalConstants::hbar * ll * (ll + 1.0) /
         (2.0 * spec.moment_of_inertia);
}

inline std::vector<double> rotor_ladder(std::size_t n_levels, const MoleculeSpec& spec) {
  std::vector<double> energies(n_levels);
  for (std::size_t l = 0; l < n_levels; ++l) energies[l] = rotor_energy(l, spec);
  return energies;
}

/// sqrt(l + 1/2) P_l(x): orthonormal Legendre functions on [-1, 1].
inline double normalized_legendre(std::size_t l, double x) {
  double p0 = 1.0;
  if (l == 0) return std::sqrt(0.5);
  double p1 = x;
  for (std::size_t k = 2; k <= l; ++k) {
    const double kk = static_cast<double>(k);
    const double p2 = ((2.0 * kk - 1.0) * x * p1 - (kk - 1.0) * p0) / kk;
    p0 = p1;
    p1 = p2;
  }
  return std::sqrt(static_cast<double>(l) + 0.5) * p1;
}

namespace detail {

// 2 pi int Y_a Y_b cos^2 sin dtheta = int_{-1}^{1} Pbar_a Pbar_b x^2 dx with m = 0 harmonics.
inline double cos2_by_rule(std::size_t a, std::size_t b, const QuadratureRule& rule) {
  return rule.integrate([&](double x) {
    return normalized_legendre(a, x) * normalized_legendre(b, x) * x * x;
  });
}

}  // namespace detail

/// <l_to| cos^2 theta |l_from> between m = 0 spherical harmonics.
///
/// The integrand is a polynomial of degree l_to + l_from + 2 in cos(theta), so a
/// Gauss-Legendre rule of order 2 (max(l) + 2) is exact. A second rule two orders higher
/// guards against a bad rule; disagreement beyond 1e-13 is reported.
/// Pairs with |l_to - l_from| not in {0, 2} vanish by parity and angular momentum and are
/// returned as exact zeros.
inline double cos2_matrix_element(std::size_t l_to, std::size_t l_from) {
  const std::size_t diff = l_to > l_from ? l_to - l_from : l_from - l_to;
  if (diff != 0 && diff != 2) return 0.0;
  const std::size_t order = 2 * (std::max(l_to, l_from) + 2);
  const double value = detail::cos2_by_rule(l_to, l_from, gauss_legendre(order));
  const double check = detail::cos2_by_rule(l_to, l_from, gauss_legendre(order + 2));
  const double residual = std::abs(value - check);
  if (!(residual <= 1e-13)) {
    throw NumericalError("cos2_matrix_element(" + std::to_string(l_to) + ", " +
                         std::to_string(l_from) + ") quadrature did not converge, residual " +
                         std::to_string(residual));
  }
  return value;
}

/// Dimensionless <l'| cos^2 theta |l> over the truncated basis l = 0 .. N-1.
class GeometryMatrix {
 public:
  GeometryMatrix() = default;

  static GeometryMatrix compute(std::size_t n_levels) {
    GeometryMatrix g;
    g.elements_ = RealMatrix(n_levels);
    for (std::size_t i = 0; i < n_levels; ++i) {
      for (std::size_t j = i; j < n_levels; ++j) {
        const double v = cos2_matrix_element(i, j);
        g.elements_(i, j) = v;
        g.elements_(j, i) = v;
      }
    }
    return g;
  }

  std::size_t n_levels() const noexcept { return elements_.size(); }
  double operator()(std::size_t l_to, std::size_t l_from) const { return elements_(l_to, l_from); }
  const RealMatrix& elements() const noexcept { return elements_; }

 private:
  RealMatrix elements_;
};

/// How the diagonal <l|cos^2|l> is treated in the interaction. The path-integral slice
/// kernel assumes V_ll = 0; keeping it is available to the direct integrator for comparison.
enum class DiagonalPolicy { zero, keep };

/// V_{l'l} = -(1/4) delta_alpha E^2 <l'|cos^2|l>, in joules.
inline RealMatrix interaction_matrix(double field_squared, const MoleculeSpec& spec,
                                     const GeometryMatrix& geometry,
                                     DiagonalPolicy diagonal = DiagonalPolicy::zero) {
  if (!(field_squared >= 0.0)) throw ContractViolation("interaction_matrix: field_squared < 0");
  const std::size_t n = geometry.n_levels();
  RealMatrix v(n);
  const double scale = -0.25 * spec.delta_alpha * field_squared;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j && diagonal == DiagonalPolicy::zero) continue;
      v(i, j) = scale * geometry(i, j);
    }
  }
  return v;
}

/// Diagonal Boltzmann mixture over the truncated ladder.
struct ThermalState {
  double temperature = 0.0;          // K
  std::vector<double> populations;   // P_l, sums to 1
  double partition_value = 0.0;      // Z, relative to the ground-state energy
};

/// P_l = exp(-E_l / k_B T) / Z without a (2l + 1) degeneracy factor: only m = 0 states are
/// modelled. Exponents are taken relative to min(E) so Z stays finite at low T; with E_0 = 0
/// this is the textbook Z.
inline ThermalState boltzmann_populations(double temperature, std::span<const double> energies) {
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw ConfigError("temperature", "must be positive and finite");
  }
  if (energies.empty()) throw ConfigError("n_levels", "must be positive");
  const double e_min = *std::min_element(energies.begin(), energies.end());
  ThermalState state;
  state.temperature = temperature;
  state.populations.resize(energies.size());
  double z = 0.0;
  for (std::size_t l = 0; l < energies.size(); ++l) {
    state.populations[l] = std::exp(-(energies[l] - e_min) / (PhysicalConstants::k_B * temperature));
    z += state.populations[l];
  }
  for (double& p : state.populations) p /= z;
  state.partition_value = z;
  return state;
}

}  // namespace rotorpath

#endif
