#include "rotorsim/readout.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "rotorsim/errors.hpp"
#include "rotorsim/parallel.hpp"

namespace rotorsim {

namespace {

constexpr RotState kDn{0, 0};
constexpr RotState kUp{2, 0};

// Factor layout of the joint space plus the rotor levels the protocol moves
// population between.
struct Layout {
  BasisPtr basis;
  int rotor = -1, atom = -1, phonon = -1;  // factor indices
  int dn = 0, up = 0, read = 0;            // rotor locals
  int n_levels = 0;

  int stride(int f) const { return basis->stride(f); }
};

Layout resolve_layout(const BasisPtr& basis, const RotState& read_state) {
  Layout lay;
  lay.basis = basis;
  for (int f = 0; f < basis->factor_count(); ++f) {
    const Factor& fac = basis->factor(f);
    if (std::holds_alternative<RotorFactor>(fac) && lay.rotor < 0) lay.rotor = f;
    if (std::holds_alternative<QubitFactor>(fac) && lay.atom < 0) lay.atom = f;
    if (std::holds_alternative<PhononFactor>(fac) && lay.phonon < 0) lay.phonon = f;
  }
  if (lay.rotor < 0 || lay.atom < 0 || lay.phonon < 0) {
    throw ConfigError("readout needs a rotor, an atom qubit and a phonon factor");
  }
  const RotorBasis& rb = basis->rotor(lay.rotor).basis;
  lay.dn = rb.require_index(kDn);
  lay.up = rb.require_index(kUp);
  lay.read = rb.require_index(read_state);
  lay.n_levels = basis->phonon(lay.phonon).n_max + 1;
  if (lay.n_levels < 2) throw ConfigError("readout needs at least Fock states 0 and 1");
  return lay;
}

// Marginal population of local level `l` of factor `f`.
double marginal(const Vector& amps, const Layout& lay, int f, int l) {
  double p = 0.0;
  for (int i = 0; i < amps.size(); ++i) {
    if (lay.basis->local_of(i, f) == l) p += std::norm(amps[i]);
  }
  return p;
}

// Projects factor `f` onto local level `l` and renormalizes.
void project(Vector& amps, const Layout& lay, int f, int l) {
  for (int i = 0; i < amps.size(); ++i) {
    if (lay.basis->local_of(i, f) != l) amps[i] = Complex{0.0, 0.0};
  }
  const double n = amps.norm();
  if (n <= 0.0) throw SimulationError("projection annihilated the state");
  amps /= n;
}

// Samples a projective measurement of factor `f` in its local basis.
int sample_level(Vector& amps, const Layout& lay, int f, RandomStream& stream) {
  const int dim_f = lay.basis->factor_dim(f);
  double u = stream.next_double();
  int picked = dim_f - 1;
  for (int l = 0; l < dim_f; ++l) {
    const double p = marginal(amps, lay, f, l);
    if (u < p) {
      picked = l;
      break;
    }
    u -= p;
  }
  project(amps, lay, f, picked);
  return picked;
}

// Relabels factor `f` from level `from` to level `to` (a reset after a
// projection; every populated index has factor level `from`).
void relabel(Vector& amps, const Layout& lay, int f, int from, int to) {
  if (from == to) return;
  const int shift = (to - from) * lay.stride(f);
  for (int i = 0; i < amps.size(); ++i) {
    if (lay.basis->local_of(i, f) == from && amps[i] != Complex{0.0, 0.0}) {
      amps[i + shift] = amps[i];
      amps[i] = Complex{0.0, 0.0};
    }
  }
}

// Ideal sideband pi pulse: -i swap on the pair (factor levels a0,b0) <->
// (a1,b1) of factors (fa, fb), identity elsewhere.  Used for the molecular
// transfer (rotor, phonon) and for the atomic mapping (atom, phonon).
void pi_pulse(Vector& amps, const Layout& lay, int fa, int a0, int a1, int fb,
              int b0, int b1) {
  const int d = (a1 - a0) * lay.stride(fa) + (b1 - b0) * lay.stride(fb);
  const Complex mi{0.0, -1.0};
  for (int i = 0; i < amps.size(); ++i) {
    if (lay.basis->local_of(i, fa) != a0 || lay.basis->local_of(i, fb) != b0) continue;
    const Complex lo = amps[i];
    const Complex hi = amps[i + d];
    amps[i] = mi * hi;
    amps[i + d] = mi * lo;
  }
}

void validate(const AtomicIonModel& atom, const ReadoutConfig& config) {
  const DetectionModel& det = atom.detection;
  if (!(det.bright_mean > det.dark_mean)) {
    throw ConfigError("detection needs bright mean > dark mean");
  }
  if (det.threshold <= det.dark_mean || det.threshold > det.bright_mean) {
    throw ConfigError("detection threshold must sit between the dark and bright means");
  }
  if (config.repetitions < 1) throw ConfigError("readout needs at least one round");
  for (double p : {config.pulse_infidelity, config.cooling_error, config.prep_error,
                   config.classification_error}) {
    if (p < 0.0 || p > 1.0) throw ConfigError("error probabilities must be in [0, 1]");
  }
}

AssignmentEstimate estimate_from_counts(long long trials, long long errors_down,
                                        long long errors_up) {
  AssignmentEstimate est;
  est.trials = trials;
  est.errors_down = errors_down;
  est.errors_up = errors_up;
  const double n = 2.0 * static_cast<double>(trials);
  const double p = static_cast<double>(errors_down + errors_up) / n;
  est.fidelity = 1.0 - p;
  const double z = 1.959963984540054;  // 95% two-sided
  const double z2 = z * z;
  const double center = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
  const double half =
      z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / (1.0 + z2 / n);
  est.ci_low = 1.0 - std::min(1.0, center + half);
  est.ci_high = 1.0 - std::max(0.0, center - half);
  return est;
}

}  // namespace

BasisPtr readout_basis(const MoleculeParams& molecule, int j_max, int n_max) {
  return ProductBasis::create(
      {RotorFactor{RotorBasis::even_states(j_max, MRestriction::ZeroM), molecule.b0, "mol"},
       QubitFactor{"atom", "dn", "up", 0.0},
       PhononFactor{"mode", n_max, 0.0}});
}

ReadoutRound detection_round(bool atom_in_lower, const DetectionModel& model,
                             RandomStream& stream) {
  ReadoutRound round;
  round.photons = stream.next_poisson(atom_in_lower ? model.bright_mean : model.dark_mean);
  round.bright = round.photons >= model.threshold;
  return round;
}

ReadoutResult readout_protocol(const JointState& state, const AtomicIonModel& atom,
                               const ReadoutConfig& config, RandomStream stream) {
  validate(atom, config);
  const Layout lay = resolve_layout(state.basis(), config.read_state);

  Vector amps = state.amplitudes();
  const double n0 = amps.norm();
  if (n0 <= 0.0) throw ConfigError("readout input state has zero norm");
  amps /= n0;

  ReadoutResult result{ReadoutOutcome::Down, JointState(state.basis()), {}};
  result.rounds.reserve(config.repetitions);
  int dark_rounds = 0;

  for (int round = 1; round <= config.repetitions; ++round) {
    // (1) Sympathetic cooling: the bath projects the mode, then (usually)
    // resets it to n = 0.
    const int n_found = sample_level(amps, lay, lay.phonon, stream);
    if (stream.next_double() >= config.cooling_error) {
      relabel(amps, lay, lay.phonon, n_found, 0);
    }

    // (2) Optical pumping of the atom to its lower level.
    const int atom_found = sample_level(amps, lay, lay.atom, stream);
    const int atom_prep = stream.next_double() < config.prep_error ? 1 : 0;
    relabel(amps, lay, lay.atom, atom_found, atom_prep);

    // (3) Molecular sideband transfer, direction alternating by round so the
    // qubit-up branch deposits one phonon every round.
    const int src = round % 2 == 1 ? lay.up : lay.read;
    const int dst = round % 2 == 1 ? lay.read : lay.up;
    if (stream.next_double() >= config.pulse_infidelity) {
      pi_pulse(amps, lay, lay.rotor, src, dst, lay.phonon, 0, 1);
    }

    // (4) Atomic red sideband: |atom dn, n=1> -> |atom up, n=0>.
    if (stream.next_double() >= config.pulse_infidelity) {
      pi_pulse(amps, lay, lay.atom, 0, 1, lay.phonon, 1, 0);
    }

    // (5) Fluorescence window: the scattered light projects the atom, the
    // count is classical noise on top of that outcome.
    const int atom_level = sample_level(amps, lay, lay.atom, stream);
    ReadoutRound rec = detection_round(atom_level == 0, atom.detection, stream);
    if (stream.next_double() < config.classification_error) rec.bright = !rec.bright;
    if (!rec.bright) ++dark_rounds;
    result.rounds.push_back(rec);
  }

  result.outcome = 2 * dark_rounds > config.repetitions ? ReadoutOutcome::Up
                                                        : ReadoutOutcome::Down;
  result.state = JointState(state.basis(), std::move(amps));
  return result;
}

ReadoutResult readout_protocol(const JointState& state, const AtomicIonModel& atom,
                               const ReadoutConfig& config, std::uint64_t seed) {
  return readout_protocol(state, atom, config, RandomStream::root(seed));
}

AssignmentEstimate readout_assignment_fidelity(const AtomicIonModel& atom,
                                               const ReadoutConfig& config,
                                               long long trials, std::uint64_t seed,
                                               const MoleculeParams& molecule,
                                               unsigned threads) {
  if (trials < 1) throw ConfigError("need at least one trial per input");
  validate(atom, config);
  const int j_max = std::max(4, std::max(config.read_state.j, 2));
  const BasisPtr basis = readout_basis(molecule, j_max);
  const Layout lay = resolve_layout(basis, config.read_state);

  const JointState inputs[2] = {
      JointState::basis_state(basis, {lay.dn, 0, 0}),
      JointState::basis_state(basis, {lay.up, 0, 0}),
  };

  const RandomStream root = RandomStream::root(seed);
  std::vector<unsigned char> wrong(static_cast<std::size_t>(2 * trials), 0);
  unsigned workers = threads > 0 ? threads : std::thread::hardware_concurrency();
  if (workers == 0) workers = 1;
  parallel_for(wrong.size(), workers, [&](std::size_t k) {
    const int input = static_cast<int>(k & 1);
    const ReadoutResult r =
        readout_protocol(inputs[input], atom, config, root.derive(k));
    const ReadoutOutcome expect = input == 0 ? ReadoutOutcome::Down : ReadoutOutcome::Up;
    wrong[k] = r.outcome != expect ? 1 : 0;
  });

  long long errors_down = 0, errors_up = 0;
  for (std::size_t k = 0; k < wrong.size(); ++k) {
    if (!wrong[k]) continue;
    ((k & 1) == 0 ? errors_down : errors_up) += 1;
  }
  return estimate_from_counts(trials, errors_down, errors_up);
}

std::vector<ReadoutSweepRow> readout_fidelity_sweep(const AtomicIonModel& atom,
                                                    const std::vector<ReadoutConfig>& grid,
                                                    long long trials, std::uint64_t seed,
                                                    const MoleculeParams& molecule,
                                                    unsigned threads) {
  std::vector<ReadoutSweepRow> rows;
  rows.reserve(grid.size());
  const RandomStream root = RandomStream::root(seed);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    ReadoutSweepRow row;
    row.config = grid[k];
    row.estimate = readout_assignment_fidelity(atom, grid[k], trials,
                                               root.derive(k).next_u64(), molecule,
                                               threads);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace rotorsim
