#include "rotorsim/motion.hpp"

#include <cmath>

#include "rotorsim/constants.hpp"
#include "rotorsim/errors.hpp"

namespace rotorsim {

namespace {
constexpr double kAmuKg = 1.66053906660e-27;
}

double lamb_dicke(double k_eff, double mass_amu, double nu) {
  if (mass_amu <= 0.0 || nu <= 0.0) throw ConfigError("lamb_dicke: mass and nu must be positive");
  return k_eff * std::sqrt(constants::hbar / (2.0 * mass_amu * kAmuKg * nu));
}

double sideband_rabi(double transition_rabi, double eta, int n) {
  if (n < 0) throw ConfigError("sideband_rabi: negative Fock index");
  return transition_rabi * eta * std::sqrt(static_cast<double>(n) + 1.0);
}

std::vector<double> thermal_weights(double nbar, int n_cut) {
  if (nbar < 0.0) throw ConfigError("thermal_weights: nbar must be non-negative");
  if (n_cut < 0) throw ConfigError("thermal_weights: n_cut must be non-negative");
  std::vector<double> w(n_cut + 1);
  if (nbar == 0.0) {
    w.assign(n_cut + 1, 0.0);
    w[0] = 1.0;
    return w;
  }
  const double r = nbar / (1.0 + nbar);
  double sum = 0.0;
  double p = 1.0 / (1.0 + nbar);
  for (int n = 0; n <= n_cut; ++n) {
    w[n] = p;
    sum += p;
    p *= r;
  }
  for (auto& x : w) x /= sum;
  return w;
}

int thermal_cutoff(double nbar, double tail_tol) {
  if (nbar < 0.0) throw ConfigError("thermal_cutoff: nbar must be non-negative");
  if (tail_tol <= 0.0 || tail_tol >= 1.0) throw ConfigError("thermal_cutoff: tail_tol in (0,1)");
  if (nbar == 0.0) return 0;
  const double r = nbar / (1.0 + nbar);
  // Tail above n_cut is r^(n_cut + 1).
  int n_cut = static_cast<int>(std::ceil(std::log(tail_tol) / std::log(r))) - 1;
  return std::max(n_cut, 0);
}

Eigen::MatrixXcd lowering_operator(int n_max) {
  if (n_max < 0) throw ConfigError("lowering_operator: n_max must be non-negative");
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(n_max + 1, n_max + 1);
  for (int n = 1; n <= n_max; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

Eigen::MatrixXcd raising_operator(int n_max) {
  return lowering_operator(n_max).adjoint();
}

}  // namespace rotorsim
