#include "rotorsim/angular.hpp"

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <mutex>

#include "rotorsim/errors.hpp"
#include "rotorsim/units.hpp"

namespace rotorsim {

namespace mp = boost::multiprecision;

std::string to_label(const RotState& s) {
  return "J" + std::to_string(s.j) + "M" + std::to_string(s.m);
}

double rot_energy(int j, double b0) {
  if (j < 0) throw ConfigError("rot_energy: J must be non-negative");
  return b0 * static_cast<double>(j) * static_cast<double>(j + 1);
}

namespace {

// Returned by value: growing the memo table reallocates it, which would
// invalidate references held across other factorial() calls in the same
// expression.
mp::cpp_int factorial(int n) {
  static std::vector<mp::cpp_int> table{1};
  static std::mutex guard;
  std::lock_guard<std::mutex> lock(guard);
  while (static_cast<int>(table.size()) <= n) {
    table.push_back(table.back() * static_cast<int>(table.size()));
  }
  return table[n];
}

int parity(int n) { return (n % 2 == 0) ? 1 : -1; }

}  // namespace

double wigner3j(int j1, int j2, int j3, int m1, int m2, int m3) {
  if (j1 < 0 || j2 < 0 || j3 < 0) throw ConfigError("wigner3j: negative angular momentum");
  if (std::abs(m1) > j1 || std::abs(m2) > j2 || std::abs(m3) > j3) return 0.0;
  if (m1 + m2 + m3 != 0) return 0.0;
  if (j3 < std::abs(j1 - j2) || j3 > j1 + j2) return 0.0;

  // Racah sum with exact rationals; promoted to double at the very end.
  const int k_min = std::max({0, j2 - j3 - m1, j1 - j3 + m2});
  const int k_max = std::min({j1 + j2 - j3, j1 - m1, j2 + m2});
  mp::cpp_rational sum = 0;
  for (int k = k_min; k <= k_max; ++k) {
    mp::cpp_int denom = factorial(k) * factorial(j1 + j2 - j3 - k) * factorial(j1 - m1 - k) *
                        factorial(j2 + m2 - k) * factorial(j3 - j2 + m1 + k) *
                        factorial(j3 - j1 - m2 + k);
    sum += mp::cpp_rational(parity(k), denom);
  }
  if (sum == 0) return 0.0;

  mp::cpp_rational norm(factorial(j1 + j2 - j3) * factorial(j1 - j2 + j3) * factorial(-j1 + j2 + j3),
                        factorial(j1 + j2 + j3 + 1));
  norm *= factorial(j1 + m1) * factorial(j1 - m1);
  norm *= factorial(j2 + m2) * factorial(j2 - m2);
  norm *= factorial(j3 + m3) * factorial(j3 - m3);

  const mp::cpp_rational square = norm * sum * sum;
  const double magnitude = std::sqrt(square.convert_to<double>());
  const int sign = (sum > 0 ? 1 : -1) * parity(std::abs(j1 - j2 - m3));
  return sign * magnitude;
}

namespace {

// <J' M'| Y_{2,K} |J M> reduced through the Gaunt formula, without the
// sqrt(5/4pi) prefactor of Y2K itself (folded into the callers).
double rank2_element(const RotState& bra, const RotState& ket, int K) {
  if (bra.m != ket.m + K) return 0.0;
  const double root = std::sqrt(static_cast<double>((2 * bra.j + 1) * (2 * ket.j + 1)));
  return parity(std::abs(bra.m)) * root * wigner3j(bra.j, 2, ket.j, 0, 0, 0) *
         wigner3j(bra.j, 2, ket.j, -bra.m, K, ket.m);
}

void check_pair(const RotState& bra, const RotState& ket, const char* who) {
  if (!bra.valid() || !ket.valid()) throw ConfigError(std::string(who) + ": invalid |J,M> state");
}

}  // namespace

double cos2_matrix_element(const RotState& bra, const RotState& ket) {
  check_pair(bra, ket, "cos2_matrix_element");
  double value = 0.0;
  if (bra.j == ket.j && bra.m == ket.m) value += 1.0 / 3.0;
  // cos^2 = 1/3 + (2/3) P2(cos theta); P2 couples dJ in {0,+-2}, dM = 0.
  value += (2.0 / 3.0) * rank2_element(bra, ket, 0);
  return value;
}

double sin2_exp2iphi_matrix_element(const RotState& bra, const RotState& ket, int sign) {
  check_pair(bra, ket, "sin2_exp2iphi_matrix_element");
  if (sign != 1 && sign != -1) throw ConfigError("sin2_exp2iphi_matrix_element: sign must be +-1");
  // sin^2(theta) e^{+-2i phi} = sqrt(32 pi / 15) Y_{2,+-2}; combined with the
  // Gaunt prefactor this leaves sqrt(8/3) times the reduced element.
  return std::sqrt(8.0 / 3.0) * rank2_element(bra, ket, 2 * sign);
}

RotorBasis RotorBasis::even_states(int j_max, MRestriction restriction) {
  if (j_max < 2 || j_max % 2 != 0) {
    throw ConfigError("RotorBasis: j_max must be an even integer >= 2");
  }
  RotorBasis basis;
  basis.j_max_ = j_max;
  basis.restriction_ = restriction;
  for (int j = 0; j <= j_max; j += 2) {
    for (int m = -j; m <= j; ++m) {
      if (restriction == MRestriction::ZeroM && m != 0) continue;
      if (restriction == MRestriction::EvenM && m % 2 != 0) continue;
      basis.states_.push_back(RotState{j, m});
    }
  }
  return basis;
}

int RotorBasis::index_of(const RotState& s) const {
  for (int i = 0; i < size(); ++i) {
    if (states_[i] == s) return i;
  }
  return -1;
}

int RotorBasis::require_index(const RotState& s) const {
  const int i = index_of(s);
  if (i < 0) throw ConfigError("RotorBasis: state " + to_label(s) + " not in basis");
  return i;
}

std::vector<int> RotorBasis::shell_indices(int j) const {
  std::vector<int> out;
  for (int i = 0; i < size(); ++i) {
    if (states_[i].j == j) out.push_back(i);
  }
  return out;
}

Eigen::MatrixXd cos2_operator(const RotorBasis& basis) {
  const int n = basis.size();
  Eigen::MatrixXd op = Eigen::MatrixXd::Zero(n, n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      const RotState& bra = basis.state(r);
      const RotState& ket = basis.state(c);
      if (bra.m != ket.m || std::abs(bra.j - ket.j) > 2) continue;
      op(r, c) = cos2_matrix_element(bra, ket);
    }
  }
  return op;
}

Eigen::MatrixXd sin2_exp_operator(const RotorBasis& basis, int sign) {
  const int n = basis.size();
  Eigen::MatrixXd op = Eigen::MatrixXd::Zero(n, n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      const RotState& bra = basis.state(r);
      const RotState& ket = basis.state(c);
      if (bra.m != ket.m + 2 * sign || std::abs(bra.j - ket.j) > 2) continue;
      op(r, c) = sin2_exp2iphi_matrix_element(bra, ket, sign);
    }
  }
  return op;
}

Eigen::VectorXd energy_diagonal(const RotorBasis& basis, double b0) {
  Eigen::VectorXd diag(basis.size());
  for (int i = 0; i < basis.size(); ++i) diag[i] = rot_energy(basis.state(i).j, b0);
  return diag;
}

MoleculeParams MoleculeParams::from_conventional(const std::string& name, double b0_hz,
                                                 double delta_alpha_a3, double g_r,
                                                 double mass_amu) {
  if (b0_hz <= 0.0) throw ConfigError("MoleculeParams: B0 must be positive");
  MoleculeParams p;
  p.name = name;
  p.b0 = units::hz_to_rad(b0_hz);
  p.delta_alpha = units::polarizability_volume_a3_to_si(delta_alpha_a3);
  p.g_r = g_r;
  p.mass_amu = mass_amu;
  return p;
}

MoleculeParams MoleculeParams::ns2_plus() {
  return from_conventional("NS2+", 3.44e9, 8.47, -0.014, 77.95);
}

}  // namespace rotorsim
