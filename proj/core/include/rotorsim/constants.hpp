#pragma once

// Physical constants, CODATA 2018.  SI units throughout.

namespace rotorsim::constants {

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;

inline constexpr double hbar = 1.054571817e-34;         // J s (exact, derived from h)
inline constexpr double speed_of_light = 299792458.0;   // m/s (exact)
inline constexpr double epsilon0 = 8.8541878128e-12;    // F/m
inline constexpr double nuclear_magneton = 5.0507837461e-27;  // J/T
inline constexpr double bohr_magneton = 9.2740100783e-24;     // J/T
inline constexpr double electron_g_factor = 2.00231930436;    // magnitude

}  // namespace rotorsim::constants
