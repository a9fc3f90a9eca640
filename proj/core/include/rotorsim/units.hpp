#pragma once

#include "rotorsim/constants.hpp"

// Unit conversions used at API boundaries.  Internally every energy is an
// angular frequency in rad/s and every time is in seconds.

namespace rotorsim::units {

inline constexpr double hz_to_rad(double f_hz) { return constants::two_pi * f_hz; }
inline constexpr double rad_to_hz(double w_rad) { return w_rad / constants::two_pi; }

// Laser intensity quoted in W/cm^2 -> W/m^2.
inline constexpr double w_cm2_to_w_m2(double i) { return i * 1.0e4; }

// Polarizability volume in Angstrom^3 (Gaussian convention) -> SI C m^2/V:
// alpha_SI = 4 pi eps0 * alpha_volume.
inline constexpr double polarizability_volume_a3_to_si(double a3) {
  return 4.0 * constants::pi * constants::epsilon0 * a3 * 1.0e-30;
}

}  // namespace rotorsim::units
