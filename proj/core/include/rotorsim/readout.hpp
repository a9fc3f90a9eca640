#pragma once

#include <cstdint>
#include <vector>

#include "rotorsim/angular.hpp"
#include "rotorsim/basis.hpp"
#include "rotorsim/rng.hpp"
#include "rotorsim/units.hpp"

// State-transfer readout of the rotor qubit through a co-trapped atomic ion.
// A round consists of five steps: (1) sympathetic cooling of the shared mode,
// (2) optical pumping of the atom to its lower qubit level, (3) a molecular
// sideband pi pulse that adds one phonon if and only if the qubit is "up",
// (4) a red-sideband pi pulse on the atom that converts the phonon into an
// atomic excitation, (5) state-dependent fluorescence detection of the atom.
// The molecule never returns to |2,0> between rounds; step (3) alternates
// between |2,0> -> |read> and |read> -> |2,0>, each direction depositing one
// phonon, so the rounds can repeat indefinitely and a majority vote over the
// per-round classifications suppresses single-round errors.
//
// Sideband pulses are applied as ideal unitaries with an injected miss
// probability per pulse; cooling and pumping are modeled as resets with
// optional failure probabilities.  All randomness is drawn from a counter
// based stream, so a seed fixes the full outcome sequence.

namespace rotorsim {

// Poisson photon statistics of the atomic fluorescence detection.  The lower
// qubit level scatters on the cycling transition (bright), the upper level is
// dark; a count at or above the threshold classifies the round as bright.
struct DetectionModel {
  double bright_mean = 20.0;
  double dark_mean = 0.5;
  int threshold = 5;
};

// Co-trapped atomic readout ion: detection statistics plus the sideband
// coupling used for the phonon -> atom transfer step.
struct AtomicIonModel {
  DetectionModel detection{};
  double eta = 0.08;
  double rabi = units::hz_to_rad(5.0e4);
};

struct ReadoutConfig {
  int repetitions = 9;
  // Probability that a sideband pi pulse (step 3 or 4) does nothing.
  double pulse_infidelity = 0.0;
  // Probability that step (1) leaves the measured Fock state uncooled.
  double cooling_error = 0.0;
  // Probability that step (2) leaves the atom in the upper level.
  double prep_error = 0.0;
  // Synthetic per-round flip of the classified outcome, applied after
  // detection.  Zero for physical runs; nonzero isolates the majority vote
  // so it can be checked against the closed-form binomial error.
  double classification_error = 0.0;
  RotState read_state{4, 0};
};

enum class ReadoutOutcome { Down, Up };

struct ReadoutRound {
  int photons = 0;
  bool bright = false;  // bright atom <=> no phonon was deposited <=> "down"
};

struct ReadoutResult {
  ReadoutOutcome outcome = ReadoutOutcome::Down;
  JointState state;  // post-measurement joint state, unit norm
  std::vector<ReadoutRound> rounds;
};

// Rotor (M = 0 ladder) x atom qubit x shared mode.  j_max must reach the
// read state; n_max = 2 is enough for the single-phonon protocol.
BasisPtr readout_basis(const MoleculeParams& molecule, int j_max = 4, int n_max = 2);

// One fluorescence window on a projected atom.  Permissive about degenerate
// thresholds: threshold <= 0 classifies every count as bright.
ReadoutRound detection_round(bool atom_in_lower, const DetectionModel& model,
                             RandomStream& stream);

// Runs the repetitive protocol on `state` (rotor x atom x phonon) and returns
// the majority-vote outcome ("up" on a strict majority of dark rounds), the
// collapsed post-measurement state, and the per-round photon record.
ReadoutResult readout_protocol(const JointState& state, const AtomicIonModel& atom,
                               const ReadoutConfig& config, RandomStream stream);
ReadoutResult readout_protocol(const JointState& state, const AtomicIonModel& atom,
                               const ReadoutConfig& config, std::uint64_t seed);

// Monte-Carlo assignment fidelity: `trials` runs from |0,0> and `trials` runs
// from |2,0>, trial t of input b drawing from root(seed).derive(2 t + b).
// fidelity = 1 - mean misassignment; the bounds are a 95% Wilson interval.
struct AssignmentEstimate {
  long long trials = 0;  // per input state
  long long errors_down = 0;
  long long errors_up = 0;
  double fidelity = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

AssignmentEstimate readout_assignment_fidelity(
    const AtomicIonModel& atom, const ReadoutConfig& config, long long trials,
    std::uint64_t seed, const MoleculeParams& molecule = MoleculeParams::ns2_plus(),
    unsigned threads = 0);

// Assignment fidelity over a grid of configurations (derived seeds are
// independent per configuration, so rows are comparable across grids).
struct ReadoutSweepRow {
  ReadoutConfig config;
  AssignmentEstimate estimate;
};

std::vector<ReadoutSweepRow> readout_fidelity_sweep(
    const AtomicIonModel& atom, const std::vector<ReadoutConfig>& grid,
    long long trials, std::uint64_t seed,
    const MoleculeParams& molecule = MoleculeParams::ns2_plus(),
    unsigned threads = 0);

}  // namespace rotorsim
