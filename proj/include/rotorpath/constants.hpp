#ifndef ROTORPATH_CONSTANTS_HPP
#define ROTORPATH_CONSTANTS_HPP

#include <numbers>

namespace rotorpath {

// CODATA 2018 exact/recommended values, SI units.
struct PhysicalConstants {
  static constexpr double hbar = 1.054571817e-34;  // J s
  static constexpr double k_B = 1.380649e-23;      // J / K
};

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline constexpr double kPicosecond = 1e-12;
inline constexpr double kFemtosecond = 1e-15;

inline constexpr const char* kVersion = "rotorpath 0.1.0";

}  // namespace rotorpath

#endif
