#include "rotorsim/dynamics.hpp"

#include <cmath>

#include "rotorsim/constants.hpp"
#include "rotorsim/errors.hpp"
#include "rotorsim/fitting.hpp"
#include "rotorsim/units.hpp"

namespace rotorsim {

namespace {

// Zero every element whose rotating-frame residual (bare energy difference
// plus any recoil shift, minus the drive tone) exceeds the cutoff.
Eigen::MatrixXcd filter_elements(const Eigen::MatrixXcd& op, const Eigen::VectorXd& energies,
                                 double extra_shift, double tone, double cutoff) {
  Eigen::MatrixXcd out = op;
  if (!std::isfinite(cutoff)) return out;
  for (int r = 0; r < out.rows(); ++r) {
    for (int c = 0; c < out.cols(); ++c) {
      if (out(r, c) == Complex{0.0, 0.0}) continue;
      const double residual = energies[r] - energies[c] + extra_shift - tone;
      if (std::abs(residual) > cutoff) out(r, c) = 0.0;
    }
  }
  return out;
}

void add_drive_terms(Hamiltonian& h, const MoleculeParams& molecule,
                     const DriveAssignment& assignment, const BuildOptions& options) {
  const BasisPtr& basis = h.basis();
  const auto& drive = assignment.drive;
  const RotorFactor& rf = basis->rotor(assignment.rotor_factor);
  if (std::abs(rf.b0 - molecule.b0) > 1e-6 * std::abs(molecule.b0)) {
    throw ConfigError("drive addresses a rotor factor with a different rotational constant");
  }
  if (drive.geometry == Geometry::CounterPropagating && !assignment.dressing) {
    throw ConfigError("counter-propagating drive needs a motional dressing");
  }
  if (drive.geometry == Geometry::CoPropagating && assignment.dressing) {
    throw ConfigError("co-propagating drive exchanges no recoil; drop the dressing");
  }
  if (assignment.dressing) {
    basis->phonon(assignment.dressing->phonon_factor);  // type check
    if (assignment.dressing->eta < 0.0) throw ConfigError("negative Lamb-Dicke parameter");
  }

  const EffectiveCoupling coupling = effective_coupling(molecule, drive);
  const RotorBasis& rb = rf.basis;
  const Eigen::VectorXd rot_e = factor_energies(basis->factor(assignment.rotor_factor));
  const Eigen::MatrixXcd cos2 = cos2_operator(rb).cast<Complex>();
  const int dim = rb.size();

  // Static Stark term (identity part dropped: global phase only).
  if (coupling.static_term) {
    const double sign = drive.kind == DriveKind::LinearPair ? -1.0 : 1.0;
    Eigen::MatrixXcd shifted = cos2 - Eigen::MatrixXcd::Identity(dim, dim) / 3.0;
    shifted = filter_elements(shifted, rot_e, 0.0, 0.0, options.rwa_cutoff);
    HamiltonianTerm st;
    st.scale = sign * coupling.amplitude;
    st.tone = 0.0;
    st.window = drive.window;
    st.factor_ops.emplace_back(assignment.rotor_factor, std::move(shifted));
    st.add_conjugate = false;
    h.add_term(std::move(st));
  }

  // Resonant term at the beat: -(A/2) e^{-i(beat t + 2 phi)} T + h.c. where
  // T = cos^2 (linear) or the dM = +2 tensor part (rotating).
  const Eigen::MatrixXcd t_op = drive.kind == DriveKind::LinearPair
                                    ? cos2
                                    : sin2_exp_operator(rb, +1).cast<Complex>();
  const Complex scale = -0.5 * coupling.amplitude *
                        std::polar(1.0, -coupling.phase2);

  struct Branch {
    Eigen::MatrixXcd phonon_op;  // empty -> no recoil factor
    double shift = 0.0;
  };
  std::vector<Branch> branches;
  branches.push_back({Eigen::MatrixXcd{}, 0.0});
  if (assignment.dressing) {
    const auto& dr = *assignment.dressing;
    const PhononFactor& pf = basis->phonon(dr.phonon_factor);
    const Complex ieta = Complex{0.0, dr.eta};
    branches.push_back({ieta * lowering_operator(pf.n_max), -pf.nu});
    branches.push_back({ieta * raising_operator(pf.n_max), +pf.nu});
  }
  for (auto& br : branches) {
    Eigen::MatrixXcd rot_part =
        filter_elements(t_op, rot_e, br.shift, drive.beat, options.rwa_cutoff);
    if (rot_part.isZero(0.0)) continue;
    HamiltonianTerm term;
    term.scale = scale;
    term.tone = drive.beat;
    term.window = drive.window;
    term.factor_ops.emplace_back(assignment.rotor_factor, std::move(rot_part));
    if (br.phonon_op.size() > 0) {
      term.factor_ops.emplace_back(assignment.dressing->phonon_factor, std::move(br.phonon_op));
    }
    term.add_conjugate = true;
    h.add_term(std::move(term));
  }
}

}  // namespace

Hamiltonian build_hamiltonian(BasisPtr basis, const MoleculeParams& molecule,
                              const std::vector<DriveAssignment>& drives,
                              const BuildOptions& options) {
  Hamiltonian h(std::move(basis), options.frame);
  for (const auto& assignment : drives) {
    add_drive_terms(h, molecule, assignment, options);
  }
  return h;
}

double transition_rabi(const MoleculeParams& molecule, DriveKind kind, double e0_sq,
                       RotState from, RotState to) {
  const double amplitude = molecule.delta_alpha * e0_sq / (8.0 * constants::hbar);
  double element = 0.0;
  if (kind == DriveKind::LinearPair) {
    if (to.m != from.m) throw ConfigError("linear pair conserves M");
    element = cos2_matrix_element(to, from);
  } else {
    const int dm = to.m - from.m;
    if (dm != 2 && dm != -2) throw ConfigError("rotating pair changes M by +-2");
    element = sin2_exp2iphi_matrix_element(to, from, dm / 2);
  }
  if (element == 0.0) throw ConfigError("transition " + to_label(from) + " -> " + to_label(to) +
                                        " is not driven by this pair");
  return amplitude * std::abs(element);
}

double e0sq_for_rabi(const MoleculeParams& molecule, DriveKind kind, double rabi,
                     RotState from, RotState to) {
  if (rabi <= 0.0) throw ConfigError("e0sq_for_rabi: rabi must be positive");
  const double unit = transition_rabi(molecule, kind, 1.0, from, to);
  return rabi / unit;
}

double second_order_stark_shift(const MoleculeParams& molecule, const SynthesizedDrive& drive,
                                RotState level, int j_max,
                                std::optional<std::pair<RotState, RotState>> exclude) {
  const EffectiveCoupling coupling = effective_coupling(molecule, drive);
  const double w = coupling.amplitude / 2.0;  // |scale| of the beat term
  const RotorBasis basis = RotorBasis::even_states(j_max, MRestriction::All);
  basis.require_index(level);
  const double e_level = rot_energy(level.j, molecule.b0);

  const bool linear = drive.kind == DriveKind::LinearPair;
  double total = 0.0;
  for (const RotState& other : basis.states()) {
    if (other == level) continue;  // the two directions cancel exactly
    if (exclude && ((exclude->first == level && exclude->second == other) ||
                    (exclude->first == other && exclude->second == level))) {
      continue;
    }
    // Absorption direction <other|T|level> and emission <other|T^dag|level>.
    const double el_abs = linear ? cos2_matrix_element(other, level)
                                 : sin2_exp2iphi_matrix_element(other, level, +1);
    const double el_emi = linear ? cos2_matrix_element(level, other)
                                 : sin2_exp2iphi_matrix_element(level, other, +1);
    const double de = e_level - rot_energy(other.j, molecule.b0);
    const double els[2] = {el_abs, el_emi};
    const double dens[2] = {de + drive.beat, de - drive.beat};
    for (int d = 0; d < 2; ++d) {
      if (els[d] == 0.0) continue;
      const double v = w * std::abs(els[d]);
      if (std::abs(dens[d]) < 25.0 * v) {
        throw SimulationError("second-order shift of " + to_label(level) +
                              " has a near-resonant coupling to " + to_label(other) +
                              "; exclude the driven pair");
      }
      total += v * v / dens[d];
    }
  }
  return total;
}

double total_level_shift(const MoleculeParams& molecule, const SynthesizedDrive& drive,
                         RotState level, int j_max,
                         std::optional<std::pair<RotState, RotState>> exclude) {
  return static_stark_shift(molecule, drive, level) +
         second_order_stark_shift(molecule, drive, level, j_max, exclude);
}

double corrected_beat(const MoleculeParams& molecule, DriveKind kind, double e0_sq,
                      RotState from, RotState to, int sideband, double nu, int j_max) {
  if (sideband != 0 && nu <= 0.0) throw ConfigError("sideband pulse needs a mode frequency");
  std::optional<std::pair<RotState, RotState>> exclude;
  if (sideband == 0) exclude = std::make_pair(from, to);
  const double bare = rot_energy(to.j, molecule.b0) - rot_energy(from.j, molecule.b0);
  SynthesizedDrive probe = kind == DriveKind::LinearPair
                               ? synthesize_linear_pair(e0_sq, bare + sideband * nu, 0.0, 0.0)
                               : synthesize_rotating_pair(e0_sq, bare + sideband * nu, 0.0, 0.0);
  double beat = probe.beat;
  for (int pass = 0; pass < 2; ++pass) {
    probe.beat = beat;
    const double gap = bare + total_level_shift(molecule, probe, to, j_max, exclude) -
                       total_level_shift(molecule, probe, from, j_max, exclude);
    beat = gap + sideband * nu;
  }
  return beat;
}

RabiResult simulate_rabi_flopping(const RabiScenario& sc) {
  if (sc.samples < 8) throw ConfigError("rabi scenario needs at least 8 samples");
  const RotorBasis rb = RotorBasis::even_states(sc.j_max, sc.restriction);
  const int from_idx = rb.require_index(sc.from);
  const int to_idx = rb.require_index(sc.to);
  if (from_idx == to_idx) throw ConfigError("rabi scenario: from and to are the same state");

  const double e0_sq = intensity_to_e0sq(sc.intensity_w_cm2);
  const double rabi = transition_rabi(sc.molecule, sc.kind, e0_sq, sc.from, sc.to);
  const double omega_gen = std::hypot(rabi, sc.detuning);
  const double duration = sc.duration > 0.0 ? sc.duration : 3.0 * constants::two_pi / omega_gen;

  PulseWindow window{0.0, duration};
  SynthesizedDrive probe = sc.kind == DriveKind::LinearPair
                               ? synthesize_linear_pair(e0_sq, 0.0, sc.phase, 0.0,
                                                        Geometry::CoPropagating, window)
                               : synthesize_rotating_pair(e0_sq, 0.0, sc.phase, 0.0,
                                                          Geometry::CoPropagating, window);
  probe.drop_static_term = sc.drop_static_term;
  const double gap = sc.stark_corrected ? shifted_gap(sc.molecule, sc.from, sc.to, {probe})
                                        : rot_energy(sc.to.j, sc.molecule.b0) -
                                              rot_energy(sc.from.j, sc.molecule.b0);
  probe.beat = gap + sc.detuning;
  probe.detuning = sc.detuning;

  const BasisPtr basis = ProductBasis::create({RotorFactor{rb, sc.molecule.b0, "mol"}});
  BuildOptions build{sc.frame, sc.rwa_cutoff};
  const Hamiltonian h = build_hamiltonian(basis, sc.molecule, {{probe, 0, std::nullopt}}, build);

  JointState state = JointState::basis_state(basis, {from_idx});
  std::vector<double> times(sc.samples);
  for (int i = 0; i < sc.samples; ++i) {
    times[i] = duration * static_cast<double>(i) / (sc.samples - 1);
  }

  RabiResult result;
  result.times = times;
  result.labels.reserve(rb.size());
  for (int i = 0; i < rb.size(); ++i) result.labels.push_back(to_label(rb.state(i)));
  result.populations.resize(sc.samples, rb.size());
  result.stats = propagate_sampled(
      state, h, 0.0, duration, times,
      [&](int i, double, const Vector& amps) {
        result.populations.row(i) = amps.cwiseAbs2().real().transpose();
      },
      sc.propagation);

  result.predicted_rabi = rabi;
  result.generalized_rabi = omega_gen;

  for (int i = 0; i < sc.samples; ++i) {
    const double total = result.populations.row(i).sum();
    const double pair = result.populations(i, from_idx) + result.populations(i, to_idx);
    result.max_pair_leakage = std::max(result.max_pair_leakage, total - pair);
    double bad_m = 0.0;
    for (int k = 0; k < rb.size(); ++k) {
      const int m = rb.state(k).m;
      const bool allowed = sc.kind == DriveKind::LinearPair
                               ? m == sc.from.m
                               : ((m - sc.from.m) % 2 == 0);
      if (!allowed) bad_m += result.populations(i, k);
    }
    result.max_symmetry_leakage = std::max(result.max_symmetry_leakage, bad_m);
  }

  std::vector<double> target(sc.samples);
  for (int i = 0; i < sc.samples; ++i) target[i] = result.populations(i, to_idx);
  const SinusoidFit fit = fit_sinusoid(times, target);
  result.fitted_rabi = fit.omega;
  result.fit_residual_rms = fit.rms_residual;
  return result;
}

}  // namespace rotorsim
