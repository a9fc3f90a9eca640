#pragma once

#include <limits>
#include <vector>

#include "rotorsim/angular.hpp"

namespace rotorsim {

// Polarization arrangement of the two-color Raman pair.
//  LinearPair:   both beams linear along z -> couples through cos^2(theta),
//                dM = 0.
//  RotatingPair: counter-rotating circular polarizations in the x-y plane ->
//                couples through sin^2(theta) e^{+-2i phi}, dM = +-2.
enum class DriveKind { LinearPair, RotatingPair };

// Beam geometry only matters through the photon recoil: co-propagating beams
// exchange no net momentum (Lamb-Dicke factor 0), counter-propagating beams
// drive the motional sidebands.
enum class Geometry { CoPropagating, CounterPropagating };

// Rectangular envelope in global time.  Drives are phase-coherent across
// windows (the carrier phase is beat*t + 2*phase with t global).
struct PulseWindow {
  double start = 0.0;
  double duration = std::numeric_limits<double>::infinity();

  double end() const { return start + duration; }
  bool contains(double t) const { return t >= start && t < end(); }
};

struct SynthesizedDrive {
  DriveKind kind = DriveKind::LinearPair;
  double e0_sq = 0.0;     // E0^2, V^2/m^2
  double beat = 0.0;      // omega_1 - omega_2, rad/s (detuning already folded in)
  double phase = 0.0;     // optical phase phi; enters the coupling as 2*phi
  double detuning = 0.0;  // rad/s, offset from the addressed resonance (bookkeeping)
  Geometry geometry = Geometry::CoPropagating;
  PulseWindow window{};
  bool drop_static_term = false;  // RWA toggle: omit the static Stark part
};

// I = eps0 c E0^2 / 2 for the synthesized amplitude E0.  Input in W/cm^2.
double intensity_to_e0sq(double intensity_w_cm2);

// Carrier-averaged interaction produced by -1/2 dalpha (E.n)^2: a static
// Stark term plus a resonant term at the beat, both of amplitude
// dalpha E0^2 / 8 (in rad/s after dividing by hbar).  For the rotating pair
// the dM = +-2 resonant parts carry an extra factor 1/2 each.
struct EffectiveCoupling {
  DriveKind kind = DriveKind::LinearPair;
  double amplitude = 0.0;  // dalpha * E0^2 / (8 hbar), rad/s
  double beat = 0.0;
  double phase2 = 0.0;     // 2 * phi
  bool static_term = true;
};

EffectiveCoupling effective_coupling(const MoleculeParams& molecule, const SynthesizedDrive& drive);

SynthesizedDrive synthesize_linear_pair(double e0_sq, double beat, double phase, double detuning,
                                        Geometry geometry = Geometry::CoPropagating,
                                        PulseWindow window = {});
SynthesizedDrive synthesize_rotating_pair(double e0_sq, double beat, double phase, double detuning,
                                          Geometry geometry = Geometry::CoPropagating,
                                          PulseWindow window = {});

// Validation helpers for the carrier-averaging step (linear pair only):
// the exact squared field at optical resolution and the averaged envelope
// that the dynamics actually uses.
double linear_pair_e_sq_exact(const SynthesizedDrive& drive, double carrier, double t);
double linear_pair_e_sq_averaged(const SynthesizedDrive& drive, double t);

// First-order light shift of one rotor level from the drive's static Stark
// term, rad/s, while the drive is on.  The part proportional to the identity
// is excluded (it is a global phase), so shifts of different levels can be
// compared directly.  Zero when the drive drops its static term.
double static_stark_shift(const MoleculeParams& molecule, const SynthesizedDrive& drive,
                          RotState level);

// Level splitting E(to) - E(from) in rad/s including the static light shifts
// of every drive in `concurrent` that is on together with the transition.
double shifted_gap(const MoleculeParams& molecule, RotState from, RotState to,
                   const std::vector<SynthesizedDrive>& concurrent);

}  // namespace rotorsim
