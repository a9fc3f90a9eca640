#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rotorsim/angular.hpp"
#include "rotorsim/rng.hpp"

// Magnetic-field-noise dephasing.  The field couples to a qubit only through
// its level splitting, so decay is computed by accumulating the stochastic
// phase along field trajectories (pure dephasing) instead of integrating a
// Hamiltonian.  Linear Zeeman only: quadratic shifts are deliberately out of
// scope, so an M = 0 rotor pair shows exactly zero decay here -- that is a
// statement about the model, not about nature.

namespace rotorsim {

// Stationary Ornstein-Uhlenbeck field: mean 0, RMS sigma_b, correlation time
// tau_c.  Spans the quasi-static (tau_c >> t) and motional-narrowed regimes.
struct NoiseProcess {
  double sigma_b = 1.0e-8;  // tesla
  double tau_c = 1.0e4;     // s
};

// Linear Zeeman coupling of the rotor: level shift -g_r mu_N M B / hbar.
struct ZeemanModel {
  double g_r = -0.014;
};

// Shift of one rotor level, rad/s.
double zeeman_shift(const RotState& state, double b_field, const ZeemanModel& model);

// Magnitude of the magnetic moment of the J manifold, |g_r| mu_N sqrt(J(J+1)),
// in J/T.  This is the moment the M ladder fans out under, distinct from the
// per-level shift above (which vanishes for M = 0).
double manifold_moment(int j, const ZeemanModel& model);

// Two levels whose splitting responds linearly to the field.
struct DephasingQubit {
  std::string label;
  double sensitivity = 0.0;  // d(splitting)/dB, rad/s per tesla
};

DephasingQubit rotational_qubit(const RotState& lower, const RotState& upper,
                                const ZeemanModel& model);
// Spin-1/2 comparison qubit: sensitivity g_e mu_B / hbar.
DephasingQubit electronic_spin_qubit();

// Stationary trajectory sampled with the exact one-step update
// B_{k+1} = r B_k + sigma sqrt(1 - r^2) xi, r = exp(-dt / tau_c); returns
// n_steps + 1 values including B(0) ~ N(0, sigma^2).
std::vector<double> sample_noise_trajectory(const NoiseProcess& process, double dt,
                                            int n_steps, RandomStream stream);

struct CoherenceCurve {
  std::vector<double> times;
  std::vector<double> coherence;  // |ensemble mean of e^{i phi(t)}|
  double t2 = 0.0;                // fitted; +inf when nothing decays in the window
  std::string fit_model;          // "gaussian", "exponential" or "none"
  double fit_rms = 0.0;
  bool fit_ok = false;
};

// Ramsey ensemble: trial t integrates the Zeeman phase along one trajectory
// (trapezoid rule, step <= min(tau_c / 50, t_max / 1000)) drawn from
// root(seed).derive(t), and the curve is |<e^{i phi}>|.  T2 comes from
// whichever of exp(-(t/T)^2) or exp(-t/T) fits the curve better.
CoherenceCurve ramsey_decay(const DephasingQubit& qubit, const NoiseProcess& process,
                            const std::vector<double>& times, long long trials,
                            std::uint64_t seed, unsigned threads = 0);

struct CompareOptions {
  long long trials = 2000;
  int points = 40;
  double window_t2_factor = 2.0;  // window length in units of the predicted T2
  unsigned threads = 0;
};

// Side-by-side Ramsey runs of two qubits, each over a window scaled to its
// own predicted quasi-static T2 = sqrt(2) / (|sensitivity| sigma_b).  In the
// Gaussian (tau_c >> t) regime the decay rates chi = 1 / T2^2 satisfy
// chi_b / chi_a = (s_b / s_a)^2; that prediction is attached for comparison.
struct CoherenceComparison {
  CoherenceCurve a;
  CoherenceCurve b;
  double sensitivity_ratio = 0.0;    // |s_b / s_a|
  double t2_ratio = 0.0;             // T2_a / T2_b
  double t2_ratio_ci_low = 0.0;      // 95% jackknife interval over trial blocks
  double t2_ratio_ci_high = 0.0;
  double chi_ratio = 0.0;            // (T2_a / T2_b)^2
  double predicted_chi_ratio = 0.0;  // sensitivity_ratio^2
};

CoherenceComparison compare_coherence(const DephasingQubit& a, const DephasingQubit& b,
                                      const NoiseProcess& process, std::uint64_t seed,
                                      const CompareOptions& options = {});

}  // namespace rotorsim
