#include "rotorsim/fields.hpp"

#include <cmath>

#include "rotorsim/constants.hpp"
#include "rotorsim/errors.hpp"
#include "rotorsim/units.hpp"

namespace rotorsim {

double intensity_to_e0sq(double intensity_w_cm2) {
  if (intensity_w_cm2 < 0.0) throw ConfigError("intensity_to_e0sq: negative intensity");
  const double i_si = units::w_cm2_to_w_m2(intensity_w_cm2);
  return 2.0 * i_si / (constants::epsilon0 * constants::speed_of_light);
}

namespace {

SynthesizedDrive make_drive(DriveKind kind, double e0_sq, double beat, double phase,
                            double detuning, Geometry geometry, PulseWindow window) {
  if (e0_sq < 0.0) throw ConfigError("synthesize drive: E0^2 must be non-negative");
  if (!(window.duration > 0.0)) throw ConfigError("synthesize drive: window duration must be positive");
  SynthesizedDrive d;
  d.kind = kind;
  d.e0_sq = e0_sq;
  d.beat = beat + detuning;
  d.phase = phase;
  d.detuning = detuning;
  d.geometry = geometry;
  d.window = window;
  return d;
}

}  // namespace

SynthesizedDrive synthesize_linear_pair(double e0_sq, double beat, double phase, double detuning,
                                        Geometry geometry, PulseWindow window) {
  return make_drive(DriveKind::LinearPair, e0_sq, beat, phase, detuning, geometry, window);
}

SynthesizedDrive synthesize_rotating_pair(double e0_sq, double beat, double phase, double detuning,
                                          Geometry geometry, PulseWindow window) {
  return make_drive(DriveKind::RotatingPair, e0_sq, beat, phase, detuning, geometry, window);
}

EffectiveCoupling effective_coupling(const MoleculeParams& molecule, const SynthesizedDrive& drive) {
  EffectiveCoupling c;
  c.kind = drive.kind;
  c.amplitude = molecule.delta_alpha * drive.e0_sq / (8.0 * constants::hbar);
  c.beat = drive.beat;
  c.phase2 = 2.0 * drive.phase;
  c.static_term = !drive.drop_static_term;
  return c;
}

double linear_pair_e_sq_exact(const SynthesizedDrive& drive, double carrier, double t) {
  if (!drive.window.contains(t)) return 0.0;
  const double env = std::cos(carrier * t);
  const double beatcos = std::cos(0.5 * drive.beat * t + drive.phase);
  return drive.e0_sq * env * env * beatcos * beatcos;
}

double linear_pair_e_sq_averaged(const SynthesizedDrive& drive, double t) {
  if (!drive.window.contains(t)) return 0.0;
  return 0.25 * drive.e0_sq * (1.0 + std::cos(drive.beat * t + 2.0 * drive.phase));
}

double static_stark_shift(const MoleculeParams& molecule, const SynthesizedDrive& drive,
                          RotState level) {
  if (drive.drop_static_term) return 0.0;
  const EffectiveCoupling c = effective_coupling(molecule, drive);
  const double p2 = cos2_matrix_element(level, level) - 1.0 / 3.0;
  // -A cos^2 for the linear pair, -A sin^2 = -A (1 - cos^2) for the rotating
  // pair; dropping identity parts leaves -+ A (cos^2 - 1/3).
  return drive.kind == DriveKind::LinearPair ? -c.amplitude * p2 : c.amplitude * p2;
}

double shifted_gap(const MoleculeParams& molecule, RotState from, RotState to,
                   const std::vector<SynthesizedDrive>& concurrent) {
  double gap = rot_energy(to.j, molecule.b0) - rot_energy(from.j, molecule.b0);
  for (const auto& d : concurrent) {
    gap += static_stark_shift(molecule, d, to) - static_stark_shift(molecule, d, from);
  }
  return gap;
}

}  // namespace rotorsim
