#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "rotorsim/basis.hpp"
#include "rotorsim/fields.hpp"
#include "rotorsim/hamiltonian.hpp"
#include "rotorsim/motion.hpp"
#include "rotorsim/propagator.hpp"

namespace rotorsim {

// Couples a drive's resonant term to a motional mode through the photon
// recoil, to first order in eta.
struct SidebandDressing {
  int phonon_factor = -1;
  double eta = 0.0;
};

struct DriveAssignment {
  SynthesizedDrive drive;
  int rotor_factor = 0;
  // Required for counter-propagating geometry, forbidden otherwise.
  std::optional<SidebandDressing> dressing;
};

struct BuildOptions {
  Frame frame = Frame::Interaction;
  // Matrix elements whose rotating-frame residual exceeds this are dropped.
  // Infinite keeps everything below the optical carrier (no approximation
  // beyond the carrier average).
  double rwa_cutoff = std::numeric_limits<double>::infinity();
};

// Expand carrier-averaged drives into product-operator terms: a windowed
// static Stark term plus a resonant term at the beat, the latter split into
// carrier / red / blue recoil branches when dressed by a motional mode.
Hamiltonian build_hamiltonian(BasisPtr basis, const MoleculeParams& molecule,
                              const std::vector<DriveAssignment>& drives,
                              const BuildOptions& options = {});

// On-resonance Rabi frequency of |from> -> |to> at synthesized amplitude
// E0^2: twice the coupling element of the resonant term.
double transition_rabi(const MoleculeParams& molecule, DriveKind kind, double e0_sq,
                       RotState from, RotState to);
// E0^2 that produces the requested Rabi frequency on |from> -> |to>.
double e0sq_for_rabi(const MoleculeParams& molecule, DriveKind kind, double rabi,
                     RotState from, RotState to);

// Second-order light shift of `level` from the drive's off-resonant beat-term
// couplings (both rotating directions), summed over rotor states up to j_max.
// `exclude` removes the resonantly driven pair for carrier pulses, where the
// co-rotating denominator vanishes; that pair is the rotation itself, not a
// shift.  rad/s.
double second_order_stark_shift(const MoleculeParams& molecule, const SynthesizedDrive& drive,
                                RotState level, int j_max,
                                std::optional<std::pair<RotState, RotState>> exclude = {});

// Total quasi-static shift of `level` while the drive is on: first-order
// (static Stark term) plus second-order (off-resonant couplings).
double total_level_shift(const MoleculeParams& molecule, const SynthesizedDrive& drive,
                         RotState level, int j_max,
                         std::optional<std::pair<RotState, RotState>> exclude = {});

// Beat frequency that hits |from> -> |to> exactly, including both light-shift
// orders; `sideband` raises (+1) or lowers (-1) the phonon number of a mode
// at nu, 0 for carrier pulses.  The shift is evaluated self-consistently
// (one fixed-point pass).
double corrected_beat(const MoleculeParams& molecule, DriveKind kind, double e0_sq,
                      RotState from, RotState to, int sideband, double nu, int j_max);

struct RabiScenario {
  MoleculeParams molecule = MoleculeParams::ns2_plus();
  DriveKind kind = DriveKind::LinearPair;
  RotState from{0, 0};
  RotState to{2, 0};
  double intensity_w_cm2 = 2.5e6;
  double detuning = 0.0;     // rad/s, offset added to the (corrected) resonance
  double phase = 0.0;        // optical phase phi
  bool stark_corrected = true;  // target the light-shifted gap, not the bare one
  bool drop_static_term = false;
  double duration = 0.0;     // seconds; <= 0 picks 3 Rabi periods
  int samples = 400;
  int j_max = 6;
  MRestriction restriction = MRestriction::All;
  Frame frame = Frame::Interaction;
  double rwa_cutoff = std::numeric_limits<double>::infinity();
  PropagationOptions propagation{.tolerance = 1e-6};
};

struct RabiResult {
  std::vector<double> times;
  std::vector<std::string> labels;  // rotor state labels, basis order
  Eigen::MatrixXd populations;      // samples x basis size
  double predicted_rabi = 0.0;      // from the closed-form matrix element
  double fitted_rabi = 0.0;         // from a sinusoid fit of the target population
  double fit_residual_rms = 0.0;
  double generalized_rabi = 0.0;    // sqrt(rabi^2 + detuning^2)
  double max_pair_leakage = 0.0;    // population outside {from, to}, max over time
  double max_symmetry_leakage = 0.0;  // population violating the M selection rule
  PropagationStats stats;
};

// Single-rotor Rabi flopping under one Raman pair, no motional mode.
RabiResult simulate_rabi_flopping(const RabiScenario& scenario = {});

}  // namespace rotorsim
