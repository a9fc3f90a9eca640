#include "rotorsim/gates.hpp"

#include <cmath>
#include <complex>
#include <thread>

#include "rotorsim/constants.hpp"
#include "rotorsim/errors.hpp"
#include "rotorsim/motion.hpp"
#include "rotorsim/parallel.hpp"
#include "rotorsim/propagator.hpp"

namespace rotorsim {

namespace {

constexpr RotState kDn{0, 0};
constexpr RotState kUp{2, 0};
constexpr RotState kAux{2, 2};

unsigned worker_count(unsigned requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

// Drive phase that puts the resonant coupling along equatorial axis chi,
// i.e. the pulse implements exp(-i theta/2 (cos chi sx + sin chi sy)).  The
// coupling element is -(Omega/2) sgn(el) e^{-2 i phi}, so chi = pi - 2 phi
// up to the element's sign.
double phase_for_axis(double chi, double element) {
  double phi = (constants::pi - chi) / 2.0;
  if (element < 0.0) phi += constants::pi / 2.0;
  return phi;
}

struct PulseSpec {
  int ion = 0;  // rotor factor: 0 control, 1 target
  DriveKind kind = DriveKind::LinearPair;
  RotState from = kDn;
  RotState to = kUp;
  int sideband = 0;    // -1 red sideband, 0 carrier
  double theta = 0.0;  // rotation angle of the addressed transition
  double chi = 0.0;    // equatorial axis, carrier pulses only
  const char* role = "";
};

struct BuiltPulse {
  DriveAssignment assignment;
  PulseReport report;
  // Light-shift angle (up minus dn of this ion) accumulated over the window;
  // the circuit decides how it enters the ledger.
  double dz = 0.0;
};

BuiltPulse make_pulse(const TwoIonParams& p, const PulseSpec& spec, double start,
                      int phonon_factor) {
  const double e0_sq = e0sq_for_rabi(p.molecule, spec.kind, p.rabi, spec.from, spec.to);
  const double beat = corrected_beat(p.molecule, spec.kind, e0_sq, spec.from, spec.to,
                                     spec.sideband, p.nu, p.j_max);
  const bool carrier = spec.sideband == 0;
  const double duration = carrier ? spec.theta / p.rabi : spec.theta / (p.eta * p.rabi);
  double phase = 0.0;
  if (carrier) {
    const double element = spec.kind == DriveKind::LinearPair
                               ? cos2_matrix_element(spec.to, spec.from)
                               : sin2_exp2iphi_matrix_element(spec.to, spec.from,
                                                              (spec.to.m - spec.from.m) / 2);
    phase = phase_for_axis(spec.chi, element);
  }

  const PulseWindow window{start, duration};
  SynthesizedDrive drive =
      spec.kind == DriveKind::LinearPair
          ? synthesize_linear_pair(e0_sq, beat, phase, 0.0,
                                   carrier ? Geometry::CoPropagating
                                           : Geometry::CounterPropagating,
                                   window)
          : synthesize_rotating_pair(e0_sq, beat, phase, 0.0,
                                     carrier ? Geometry::CoPropagating
                                             : Geometry::CounterPropagating,
                                     window);

  std::optional<std::pair<RotState, RotState>> exclude;
  if (carrier) exclude = std::make_pair(spec.from, spec.to);
  const double shift = total_level_shift(p.molecule, drive, kUp, p.j_max, exclude) -
                       total_level_shift(p.molecule, drive, kDn, p.j_max, exclude);

  BuiltPulse built;
  built.assignment.drive = drive;
  built.assignment.rotor_factor = spec.ion;
  if (!carrier) built.assignment.dressing = SidebandDressing{phonon_factor, p.eta};
  built.report = PulseReport{spec.role, start, duration, beat, phase, e0_sq};
  built.dz = shift * duration;
  return built;
}

BasisPtr two_ion_basis(const TwoIonParams& p) {
  return ProductBasis::create(
      {RotorFactor{RotorBasis::even_states(p.j_max, MRestriction::ZeroM), p.molecule.b0, "ctl"},
       RotorFactor{RotorBasis::even_states(p.j_max, MRestriction::EvenM), p.molecule.b0, "tgt"},
       PhononFactor{"mode", p.n_max, p.nu}});
}

struct LogicalMap {
  std::array<int, 4> joint{};  // joint index of |c t n=0>, logical order c*2+t
};

LogicalMap logical_map(const BasisPtr& basis) {
  const RotorBasis& ctl = basis->rotor(0).basis;
  const RotorBasis& tgt = basis->rotor(1).basis;
  const int c[2] = {ctl.require_index(kDn), ctl.require_index(kUp)};
  const int t[2] = {tgt.require_index(kDn), tgt.require_index(kUp)};
  LogicalMap map;
  for (int cb = 0; cb < 2; ++cb) {
    for (int tb = 0; tb < 2; ++tb) {
      map.joint[cb * 2 + tb] = basis->flatten({c[cb], t[tb], 0});
    }
  }
  return map;
}

struct CircuitRun {
  Eigen::Matrix4cd raw;
  std::array<double, 4> leakage{};
  Eigen::Vector4cd super_out;  // logical block for the superposition input
  double super_leakage = 0.0;
  long long total_steps = 0;
};

CircuitRun run_circuit(const TwoIonParams& p, const std::vector<BuiltPulse>& pulses,
                       double duration, bool with_superposition) {
  const BasisPtr basis = two_ion_basis(p);
  const LogicalMap map = logical_map(basis);

  std::vector<DriveAssignment> drives;
  drives.reserve(pulses.size());
  for (const auto& pulse : pulses) drives.push_back(pulse.assignment);
  const Hamiltonian h = build_hamiltonian(
      basis, p.molecule, drives, {Frame::Interaction, p.rwa_cutoff});

  const int n_inputs = with_superposition ? 5 : 4;
  std::vector<Vector> finals(n_inputs);
  std::vector<long long> steps(n_inputs, 0);
  parallel_for(n_inputs, worker_count(p.threads), [&](std::size_t i) {
    Vector amps = Vector::Zero(basis->dim());
    if (i < 4) {
      amps[map.joint[i]] = 1.0;
    } else {
      amps[map.joint[0]] = 1.0 / std::sqrt(2.0);  // (|dn> + |up>) x |dn>
      amps[map.joint[2]] = 1.0 / std::sqrt(2.0);
    }
    JointState state(basis, std::move(amps));
    const PropagationStats stats = propagate(state, h, 0.0, duration, p.propagation);
    finals[i] = state.amplitudes();
    steps[i] = stats.total_steps;
  });

  CircuitRun run;
  for (int i = 0; i < n_inputs; ++i) run.total_steps += steps[i];
  for (int j = 0; j < 4; ++j) {
    double kept = 0.0;
    for (int i = 0; i < 4; ++i) {
      run.raw(i, j) = finals[j][map.joint[i]];
      kept += std::norm(run.raw(i, j));
    }
    run.leakage[j] = 1.0 - kept;
  }
  if (with_superposition) {
    double kept = 0.0;
    for (int i = 0; i < 4; ++i) {
      run.super_out[i] = finals[4][map.joint[i]];
      kept += std::norm(run.super_out[i]);
    }
    run.super_leakage = 1.0 - kept;
  }
  return run;
}

Eigen::Matrix4cd apply_virtual_z(const Eigen::Matrix4cd& raw, const VirtualZ& ledger) {
  Eigen::Matrix4cd corrected;
  for (int i = 0; i < 4; ++i) {
    const int cb = i / 2, tb = i % 2;
    const Complex z = std::polar(1.0, ledger.control * cb + ledger.target * tb);
    corrected.row(i) = z * raw.row(i);
  }
  return corrected;
}

// P1 and P3: red-sideband pi on the control qubit transition.  P2: one
// red-sideband 2pi loop |dn, n=1> <-> |aux, n=0> on the target.
std::vector<PulseSpec> cz_specs() {
  return {
      {0, DriveKind::LinearPair, kDn, kUp, -1, constants::pi, 0.0, "ctl red pi"},
      {1, DriveKind::RotatingPair, kDn, kAux, -1, constants::two_pi, 0.0, "tgt aux red 2pi"},
      {0, DriveKind::LinearPair, kDn, kUp, -1, constants::pi, 0.0, "ctl red pi"},
  };
}

}  // namespace

CzGateResult simulate_cz(const TwoIonParams& p) {
  if (p.n_max < 2) throw ConfigError("conditional-phase gate needs n_max >= 2");
  std::vector<BuiltPulse> pulses;
  double t = 0.0;
  for (const PulseSpec& spec : cz_specs()) {
    pulses.push_back(make_pulse(p, spec, t, 2));
    t = pulses.back().report.start + pulses.back().report.duration;
  }

  CzGateResult result;
  result.duration = t;
  // Both sideband beats are locked to the light-shifted splittings, so while
  // the control excitation rides in the mode the logical frame keeps
  // advancing at the shift difference relative to the bare qubit.  The
  // control angle therefore integrates the shift rate over the whole
  // P1 -> P3 span, middle pulse included; the target's loop is
  // diagonal-preserving and counts for its own pulse only.
  result.ledger.control =
      (pulses[0].dz / pulses[0].report.duration) *
      (pulses[2].report.start + pulses[2].report.duration - pulses[0].report.start);
  result.ledger.target = pulses[1].dz;

  const CircuitRun run = run_circuit(p, pulses, result.duration, false);
  result.raw = run.raw;
  result.corrected = apply_virtual_z(run.raw, result.ledger);
  result.entangling_phase = std::arg(run.raw(0, 0) * run.raw(3, 3) /
                                     (run.raw(1, 1) * run.raw(2, 2)));
  result.worst_truth_fidelity = 1.0;
  for (int j = 0; j < 4; ++j) {
    result.truth_fidelity[j] = std::norm(result.corrected(j, j));
    result.worst_truth_fidelity = std::min(result.worst_truth_fidelity, result.truth_fidelity[j]);
    result.max_leakage = std::max(result.max_leakage, run.leakage[j]);
  }
  for (const auto& pulse : pulses) result.pulses.push_back(pulse.report);
  result.total_steps = run.total_steps;
  return result;
}

CnotGateResult simulate_cnot(const TwoIonParams& p) {
  if (p.n_max < 2) throw ConfigError("conditional-phase gate needs n_max >= 2");
  std::vector<BuiltPulse> pulses;
  double t = 0.0;
  auto append = [&](const PulseSpec& spec) {
    pulses.push_back(make_pulse(p, spec, t, 2));
    t = pulses.back().report.start + pulses.back().report.duration;
  };

  append({1, DriveKind::LinearPair, kDn, kUp, 0, constants::pi / 2.0,
          -constants::pi / 2.0, "tgt Ry(-pi/2)"});
  for (const PulseSpec& spec : cz_specs()) append(spec);
  // Closing pi/2 about +y, with the axis fed forward by the target's frame
  // angle across the conditional block: the aux loop leaves its light-shift
  // angle on the qubit, while the carrier reference (locked to the shifted
  // splitting) advances against the bare qubit between the two pi/2 pulses.
  const double carrier_rate = pulses[0].dz / pulses[0].report.duration;
  const double zt_mid = pulses[2].dz - carrier_rate * (t - pulses[0].report.duration);
  append({1, DriveKind::LinearPair, kDn, kUp, 0, constants::pi / 2.0,
          constants::pi / 2.0 - zt_mid, "tgt Ry(pi/2)"});

  CnotGateResult result;
  result.duration = t;
  result.ledger.control =
      (pulses[1].dz / pulses[1].report.duration) *
      (pulses[3].report.start + pulses[3].report.duration - pulses[1].report.start);
  result.ledger.target = pulses[0].dz + pulses[2].dz + pulses[4].dz;

  const CircuitRun run = run_circuit(p, pulses, result.duration, true);
  result.raw = run.raw;
  result.corrected = apply_virtual_z(run.raw, result.ledger);

  static constexpr int kPermutation[4] = {0, 1, 3, 2};
  result.worst_truth_fidelity = 1.0;
  for (int j = 0; j < 4; ++j) {
    result.truth_fidelity[j] = std::norm(result.corrected(kPermutation[j], j));
    result.worst_truth_fidelity = std::min(result.worst_truth_fidelity, result.truth_fidelity[j]);
    result.max_leakage = std::max(result.max_leakage, run.leakage[j]);
  }
  result.max_leakage = std::max(result.max_leakage, run.super_leakage);

  Eigen::Vector4cd super = run.super_out;
  for (int i = 0; i < 4; ++i) {
    const int cb = i / 2, tb = i % 2;
    super[i] *= std::polar(1.0, result.ledger.control * cb + result.ledger.target * tb);
  }
  result.bell_fidelity = std::norm((super[0] + super[3]) / std::sqrt(2.0));

  for (const auto& pulse : pulses) result.pulses.push_back(pulse.report);
  result.total_steps = run.total_steps;
  return result;
}

MsGateResult simulate_ms(const MsGateParams& p) {
  if (std::abs(2.0 * p.eta * p.rabi / p.delta - 1.0) > 1e-6) {
    throw ConfigError("loop closes as a maximally entangling gate only for eta * rabi = delta / 2");
  }
  if (p.delta <= 0.0 || p.nu <= p.delta) throw ConfigError("need 0 < delta < nu");

  const double duration = constants::two_pi / p.delta;
  const double e0_sq = e0sq_for_rabi(p.molecule, DriveKind::LinearPair, p.rabi, kDn, kUp);
  const double split = p.nu - p.delta;  // tone offset from the shifted carrier

  // Both tones shift the qubit gap; fix the point self-consistently before
  // placing the tones symmetrically around it.
  const double bare = p.molecule.qubit_gap();
  double gap = bare;
  double shift = 0.0;
  for (int pass = 0; pass < 2; ++pass) {
    shift = 0.0;
    for (const double sign : {-1.0, 1.0}) {
      const SynthesizedDrive tone = synthesize_linear_pair(e0_sq, gap + sign * split, 0.0, 0.0);
      shift += total_level_shift(p.molecule, tone, kUp, p.j_max) -
               total_level_shift(p.molecule, tone, kDn, p.j_max);
    }
    gap = bare + shift;
  }

  int n_start_max = 0;
  std::vector<double> weights{1.0};
  if (p.nbar > 0.0) {
    n_start_max = thermal_cutoff(p.nbar, p.thermal_tail);
    weights = thermal_weights(p.nbar, n_start_max);
  }
  const int n_max = n_start_max + p.n_headroom;

  const BasisPtr basis = ProductBasis::create(
      {RotorFactor{RotorBasis::even_states(p.j_max, MRestriction::ZeroM), p.molecule.b0, "ion1"},
       RotorFactor{RotorBasis::even_states(p.j_max, MRestriction::ZeroM), p.molecule.b0, "ion2"},
       PhononFactor{"mode", n_max, p.nu}});
  const int dn = basis->rotor(0).basis.require_index(kDn);
  const int up = basis->rotor(0).basis.require_index(kUp);

  std::vector<DriveAssignment> drives;
  for (int ion = 0; ion < 2; ++ion) {
    for (const double sign : {-1.0, 1.0}) {
      DriveAssignment a;
      a.drive = synthesize_linear_pair(e0_sq, gap + sign * split, 0.0, 0.0,
                                       Geometry::CounterPropagating, PulseWindow{0.0, duration});
      a.rotor_factor = ion;
      a.dressing = SidebandDressing{2, p.eta};
      drives.push_back(a);
    }
  }
  const Hamiltonian h = build_hamiltonian(
      basis, p.molecule, drives, {Frame::Interaction, p.rwa_cutoff});

  MsGateResult result;
  result.duration = duration;
  result.ledger_z = shift * duration;

  // Bell target with the per-ion frame angles folded into the |up up>
  // amplitude: Z(z)^x2 (|dn dn> - i |up up>)/sqrt(2).
  const int pair_dim = basis->factor_dim(0) * basis->factor_dim(1);
  Eigen::VectorXcd bell = Eigen::VectorXcd::Zero(pair_dim);
  bell[dn * basis->factor_dim(1) + dn] = 1.0 / std::sqrt(2.0);
  bell[up * basis->factor_dim(1) + up] =
      Complex{0.0, -1.0} * std::polar(1.0, -2.0 * result.ledger_z) / std::sqrt(2.0);

  result.runs.resize(weights.size());
  std::vector<long long> steps(weights.size(), 0);
  parallel_for(weights.size(), worker_count(p.threads), [&](std::size_t k) {
    JointState state = JointState::basis_state(basis, {dn, dn, static_cast<int>(k)});
    const PropagationStats stats = propagate(state, h, 0.0, duration, p.propagation);
    MsFockRun& run = result.runs[k];
    run.n = static_cast<int>(k);
    run.weight = weights[k];
    run.fidelity = reduced_fidelity(state, {0, 1}, bell);
    run.phonon_return = state.factor_population(2, static_cast<int>(k));
    steps[k] = stats.total_steps;
  });

  result.min_run_fidelity = 1.0;
  result.max_run_fidelity = 0.0;
  for (std::size_t k = 0; k < result.runs.size(); ++k) {
    result.total_steps += steps[k];
    result.thermal_fidelity += result.runs[k].weight * result.runs[k].fidelity;
    result.min_run_fidelity = std::min(result.min_run_fidelity, result.runs[k].fidelity);
    result.max_run_fidelity = std::max(result.max_run_fidelity, result.runs[k].fidelity);
  }
  return result;
}

}  // namespace rotorsim
