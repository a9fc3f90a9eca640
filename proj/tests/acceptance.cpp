// End-to-end acceptance checks, one line each.  These run the full physics
// stack (no shortcuts, no reduced models) against externally fixed numbers,
// so the slow ones take minutes; run the doctest binary for quick feedback.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "rotorsim/constants.hpp"
#include "rotorsim/decoherence.hpp"
#include "rotorsim/dynamics.hpp"
#include "rotorsim/gates.hpp"
#include "rotorsim/propagator.hpp"
#include "rotorsim/readout.hpp"
#include "rotorsim/scenario.hpp"
#include "rotorsim/units.hpp"

using namespace rotorsim;

namespace {

int g_failures = 0;
int g_index = 0;
std::chrono::steady_clock::time_point g_t0;

void begin() { g_t0 = std::chrono::steady_clock::now(); }

void report(bool ok, const std::string& what, const std::string& detail) {
  const double dt =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - g_t0).count();
  ++g_index;
  if (!ok) ++g_failures;
  std::printf("[%2d] %s  %s (%s; %.1f s)\n", g_index, ok ? "PASS" : "FAIL",
              what.c_str(), detail.c_str(), dt);
  std::fflush(stdout);
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

// --- 1: the qubit coupling matrix element -----------------------------------

void check_matrix_element() {
  begin();
  const double v = cos2_matrix_element({0, 0}, {2, 0});
  const double reference = oracles::cos2_element({0, 0}, {2, 0});
  const bool ok = std::abs(v - 0.29814) <= 1e-4 && std::abs(v - reference) <= 1e-10;
  report(ok, "<0,0|cos^2|2,0> equals 2/(3 sqrt 5)",
         "value " + fmt(v) + ", quadrature " + fmt(reference));
}

// --- 2: rotational constant to qubit gap -------------------------------------

void check_qubit_gap() {
  begin();
  const MoleculeParams m =
      MoleculeParams::from_conventional("NS2+", 3.44e9, 8.47, -0.014, 77.95);
  const double gap_hz = units::rad_to_hz(m.qubit_gap());
  const bool ok = std::abs(gap_hz / 20.64e9 - 1.0) < 1e-12;
  report(ok, "B0 = 3.44 GHz puts the qubit gap at 20.64 GHz", fmt(gap_hz) + " Hz");
}

// --- 3: laser intensity to Rabi frequency ------------------------------------

void check_intensity_scale() {
  begin();
  const MoleculeParams m = MoleculeParams::ns2_plus();
  const double e0sq = intensity_to_e0sq(2.5e6);
  const double rabi_hz =
      units::rad_to_hz(transition_rabi(m, DriveKind::LinearPair, e0sq, {0, 0}, {2, 0}));
  const bool ok = std::abs(rabi_hz / 1.0e6 - 1.0) < 0.10;
  report(ok, "2.5e6 W/cm^2 drives the qubit at ~1 MHz", fmt(rabi_hz) + " Hz");
}

// --- 4: full time integration of the driven rotor ----------------------------

void check_full_integration() {
  begin();
  const MoleculeParams m = MoleculeParams::ns2_plus();
  const double rabi = 1.0e-3 * m.qubit_gap();
  RabiScenario sc;
  sc.molecule = m;
  sc.intensity_w_cm2 =
      e0sq_for_rabi(m, DriveKind::LinearPair, rabi, {0, 0}, {2, 0}) *
      constants::epsilon0 * constants::speed_of_light / 2.0 / 1.0e4;
  sc.j_max = 6;
  sc.restriction = MRestriction::All;
  sc.samples = 200;
  const RabiResult r = simulate_rabi_flopping(sc);

  const double rel = std::abs(r.fitted_rabi - r.predicted_rabi) / r.predicted_rabi;
  const bool ok = rel <= 0.02 && r.max_symmetry_leakage < 1e-10 &&
                  std::abs(r.stats.norm_drift) < 1e-10;
  report(ok, "flopping at drive/gap = 1e-3: fit, M leakage, norm",
         "fit off by " + fmt(rel) + ", M leakage " + fmt(r.max_symmetry_leakage) +
             ", norm drift " + fmt(r.stats.norm_drift));
}

// --- 5: auxiliary transfer leaves the spectator level alone ------------------

void check_aux_transfer() {
  begin();
  const MoleculeParams m = MoleculeParams::ns2_plus();
  const double rabi = units::hz_to_rad(1.0e6);
  const double e0sq = e0sq_for_rabi(m, DriveKind::RotatingPair, rabi, {0, 0}, {2, 2});
  const double duration = constants::pi / rabi;

  RabiScenario sc;
  sc.molecule = m;
  sc.kind = DriveKind::RotatingPair;
  sc.from = {0, 0};
  sc.to = {2, 2};
  sc.intensity_w_cm2 = e0sq * constants::epsilon0 * constants::speed_of_light / 2.0 / 1.0e4;
  sc.j_max = 6;
  sc.restriction = MRestriction::EvenM;
  sc.duration = duration;
  sc.samples = 40;
  const RabiResult r = simulate_rabi_flopping(sc);
  const RotorBasis rb6 = RotorBasis::even_states(6, MRestriction::EvenM);
  const double transfer = r.populations(r.times.size() - 1, rb6.require_index({2, 2}));

  // Same drive applied to a molecule parked in |2,0>.
  const RotorBasis rb = RotorBasis::even_states(4, MRestriction::EvenM);
  const BasisPtr basis = ProductBasis::create({RotorFactor{rb, m.b0, "mol"}});
  SynthesizedDrive probe =
      synthesize_rotating_pair(e0sq, 0.0, 0.0, 0.0, Geometry::CoPropagating, {0.0, duration});
  probe.beat = shifted_gap(m, {0, 0}, {2, 2}, {probe});
  const Hamiltonian h = build_hamiltonian(basis, m, {{probe, 0, std::nullopt}});

  const int spectator = rb.require_index({2, 0});
  JointState state = JointState::basis_state(basis, {spectator});
  std::vector<double> times;
  for (int i = 1; i <= 25; ++i) times.push_back(duration * i / 25.0);
  double max_change = 0.0;
  PropagationOptions opts;
  opts.tolerance = 1e-9;
  propagate_sampled(
      state, h, 0.0, duration, times,
      [&](int, double, const Vector& amps) {
        double pop = 0.0;
        for (int k = 0; k < rb.size(); ++k) {
          if (rb.state(k) == RotState{2, 0}) pop += std::norm(amps[k]);
        }
        max_change = std::max(max_change, std::abs(pop - 1.0));
      },
      opts);

  const bool ok = transfer >= 0.999 && max_change < 1e-8;
  report(ok, "pi transfer |0,0> -> |2,2| leaves |2,0> untouched",
         "transfer " + fmt(transfer) + ", spectator moved " + fmt(max_change));
}

// --- 6: controlled-NOT through the shared mode -------------------------------

void check_cnot() {
  begin();
  const CnotGateResult r = simulate_cnot();
  bool ok = r.bell_fidelity >= 0.999;
  double worst = 1.0;
  for (double f : r.truth_fidelity) {
    worst = std::min(worst, f);
    ok = ok && f >= 0.999;
  }
  report(ok, "CNOT truth table and Bell output from n = 0",
         "worst row " + fmt(worst) + ", Bell " + fmt(r.bell_fidelity));
}

// --- 7: Molmer-Sorensen thermal insensitivity ---------------------------------

void check_ms_thermal() {
  begin();
  double lo = 1.0, hi = 0.0;
  std::string detail;
  for (double nbar : {0.0, 0.5, 2.0}) {
    MsGateParams p;
    p.nbar = nbar;
    const MsGateResult r = simulate_ms(p);
    lo = std::min(lo, r.thermal_fidelity);
    hi = std::max(hi, r.thermal_fidelity);
    if (!detail.empty()) detail += ", ";
    detail += "nbar " + fmt(nbar) + ": " + fmt(r.thermal_fidelity);
  }
  const double variation = (hi - lo) / hi;
  report(variation < 0.01 && lo > 0.99, "Molmer-Sorensen fidelity vs thermal occupation",
         detail + "; variation " + fmt(variation));
}

// --- 8: shipped readout preset and its vote curve -----------------------------

void check_readout_preset() {
  begin();
  RunOptions opts;
  opts.write_files = false;
  const ScenarioOutcome main_run = run_scenario(preset_scenario("ns2-readout"), opts);
  const double fidelity = main_run.document["results"]["fidelity"].get<double>();
  bool ok = fidelity >= 0.9994;
  // sanity: the preset really is the advertised configuration
  const auto& echo = main_run.document["scenario"];
  ok = ok && echo["protocol"]["pulse_infidelity"].get<double>() <= 0.01;
  ok = ok && echo["protocol"]["repetitions"].get<int>() >= 3;
  ok = ok && echo["trials"].get<long long>() >= 100000;

  const ScenarioOutcome curve = run_scenario(preset_scenario("ns2-readout-curve"), opts);
  const auto& rows = curve.document["results"]["rows"];
  const double p = 0.1;  // injected per-round classification error of the preset
  double worst_sigma = 0.0;
  for (const auto& row : rows) {
    const int reps = row["value"].get<int>();
    const auto& res = row["results"];
    const double trials = 2.0 * res["trials_per_input"].get<double>();
    const double seen =
        (res["errors_down"].get<double>() + res["errors_up"].get<double>()) / trials;
    const double expect = oracles::vote_error(reps, p, false);
    const double sigma = std::sqrt(expect * (1.0 - expect) / trials);
    worst_sigma = std::max(worst_sigma, std::abs(seen - expect) / sigma);
  }
  ok = ok && worst_sigma < 3.5;
  report(ok, "readout preset fidelity and binomial vote curve",
         "fidelity " + fmt(fidelity) + ", curve max deviation " + fmt(worst_sigma) +
             " sigma");
}

// --- 9: magnetic dephasing across qubit encodings ------------------------------

void check_dephasing_comparison() {
  begin();
  const ZeemanModel model{-0.014};
  const NoiseProcess process{1.0e-8, 2.0e4};
  const DephasingQubit spin = electronic_spin_qubit();
  const DephasingQubit pair = rotational_qubit({2, -2}, {2, 2}, model);

  const CoherenceComparison cmp = compare_coherence(spin, pair, process, 1);
  const double chi_err = std::abs(cmp.chi_ratio / cmp.predicted_chi_ratio - 1.0);
  bool ok = chi_err < 0.10;

  // An M = 0 pair holds phase for 1000x the electronic T2.
  const DephasingQubit clock = rotational_qubit({0, 0}, {2, 0}, model);
  const double t_long = 1000.0 * std::sqrt(2.0) / (spin.sensitivity * process.sigma_b);
  std::vector<double> times;
  for (int i = 1; i <= 10; ++i) times.push_back(t_long * i / 10.0);
  const CoherenceCurve curve = ramsey_decay(clock, process, times, 200, 2);
  double min_coherence = 1.0;
  for (double c : curve.coherence) min_coherence = std::min(min_coherence, c);
  ok = ok && min_coherence > 0.999;

  const double moment = manifold_moment(2, model) / constants::nuclear_magneton;
  ok = ok && std::abs(moment - 0.034) <= 5e-4;

  report(ok, "decay-rate ratio, M = 0 persistence, manifold moment",
         "chi ratio off by " + fmt(chi_err) + ", M = 0 coherence " + fmt(min_coherence) +
             ", moment " + fmt(moment) + " mu_N");
}

// --- 10: documented limits of what this suite reproduces ----------------------

void check_scale_note() {
  begin();
#ifdef ROTORSIM_README_PATH
  std::ifstream in(ROTORSIM_README_PATH);
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  const bool ok = text.find("absolute laboratory") != std::string::npos &&
                  text.find("not reproduced") != std::string::npos;
  report(ok, "README states which headline numbers are out of scope",
         ok ? "note present" : "note missing");
#else
  report(false, "README states which headline numbers are out of scope",
         "README path not configured");
#endif
}

}  // namespace

int main() {
  check_matrix_element();
  check_qubit_gap();
  check_intensity_scale();
  check_full_integration();
  check_aux_transfer();
  check_cnot();
  check_ms_thermal();
  check_readout_preset();
  check_dephasing_comparison();
  check_scale_note();

  if (g_failures == 0) {
    std::printf("all %d checks passed\n", g_index);
    return 0;
  }
  std::printf("%d of %d checks failed\n", g_failures, g_index);
  return 1;
}
