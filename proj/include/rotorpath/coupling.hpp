#ifndef ROTORPATH_COUPLING_HPP
#define ROTORPATH_COUPLING_HPP

#include <algorithm>
#include <cmath>

#include "rotorpath/constants.hpp"
#include "rotorpath/field_model.hpp"
#include "rotorpath/matrix.hpp"
#include "rotorpath/quantum_core.hpp"
#include "rotorpath/rotor_model.hpp"

namespace rotorpath {

/// Polarizability coupling of a rigid rotor to the pulse train:
/// V(l', l; tau) / hbar = -(delta_alpha / 4 hbar) E^2(tau) <l'|cos^2|l>.
class LaserCoupling {
 public:
  LaserCoupling(const MoleculeSpec& molecule, const GeometryMatrix& geometry,
                const PulseTrain& train, double window_margin,
                DiagonalPolicy diagonal = DiagonalPolicy::zero)
      : field_(train), window_margin_(window_margin) {
    // E^2 = 1 gives the per-unit-intensity coupling in joules.
    pattern_ = interaction_matrix(1.0, molecule, geometry, diagonal);
    double largest = 0.0;
    for (std::size_t i = 0; i < pattern_.size(); ++i) {
      for (std::size_t j = 0; j < pattern_.size(); ++j) {
        pattern_(i, j) /= PhysicalConstants::hbar;
        largest = std::max(largest, std::abs(pattern_(i, j)));
      }
    }
    peak_rate_ = largest * field_.peak_squared(window_margin);
  }

  std::size_t n_levels() const noexcept { return pattern_.size(); }

  /// Coupling per unit E^2, rad/s per (V/m)^2.
  const RealMatrix& pattern() const noexcept { return pattern_; }
  double peak_rate() const noexcept { return peak_rate_; }

  void sample(double tau, RealMatrix& out) const {
    const double e2 = field_.squared(tau);
    if (!std::isfinite(e2)) throw NumericalError("LaserCoupling: non-finite field sample");
    if (out.size() != pattern_.size()) out = RealMatrix(pattern_.size());
    for (std::size_t i = 0; i < pattern_.size(); ++i) {
      for (std::size_t j = 0; j < pattern_.size(); ++j) out(i, j) = e2 * pattern_(i, j);
    }
  }

  const PulseTrainField& field() const noexcept { return field_; }

  TimeWindow window() const noexcept {
    return {field_.window_start(window_margin_), field_.window_end(window_margin_)};
  }

 private:
  PulseTrainField field_;
  double window_margin_;
  RealMatrix pattern_;
  double peak_rate_ = 0.0;
};

}  // namespace rotorpath

#endif
