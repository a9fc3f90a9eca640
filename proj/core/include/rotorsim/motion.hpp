#pragma once

#include <Eigen/Dense>
#include <vector>

namespace rotorsim {

// One normal mode of the trapped string used as the gate bus.
struct MotionalMode {
  double nu = 0.0;   // rad/s
  double eta = 0.0;  // Lamb-Dicke parameter of the driving geometry
};

// eta = k_eff * sqrt(hbar / (2 m nu)) for effective wavevector k_eff (1/m),
// ion mass in amu and trap frequency nu (rad/s).
double lamb_dicke(double k_eff, double mass_amu, double nu);

// First sideband Rabi frequency for |n> <-> |n+1>: eta * rabi * sqrt(n + 1).
double sideband_rabi(double transition_rabi, double eta, int n);

// Thermal occupation weights p_n, n = 0..n_cut, renormalized over the cut.
std::vector<double> thermal_weights(double nbar, int n_cut);

// Smallest n_cut whose discarded geometric tail is below tail_tol.
int thermal_cutoff(double nbar, double tail_tol);

// a and a^dagger on a Fock ladder truncated at n_max.
Eigen::MatrixXcd lowering_operator(int n_max);
Eigen::MatrixXcd raising_operator(int n_max);

}  // namespace rotorsim
