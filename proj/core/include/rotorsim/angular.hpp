#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace rotorsim {

// One rigid-rotor level |J, M>.
struct RotState {
  int j = 0;
  int m = 0;

  bool valid() const { return j >= 0 && m >= -j && m <= j; }
  bool operator==(const RotState&) const = default;
};

std::string to_label(const RotState& s);  // "J2M-1" style

// Rotational kinetic energy B0 * J(J+1); the result carries the units of b0.
double rot_energy(int j, double b0);

// Wigner 3-j symbol for integer angular momenta.  Racah's factorial sum is
// evaluated in exact rational arithmetic and promoted to double only at the
// end, so values are correct to the last bit even for large J.
double wigner3j(int j1, int j2, int j3, int m1, int m2, int m3);

// <bra| cos^2(theta) |ket>.  Nonzero only for dJ in {0, +-2}, dM = 0.
double cos2_matrix_element(const RotState& bra, const RotState& ket);

// <bra| sin^2(theta) e^{+-2 i phi} |ket> for sign = +1 / -1.  Nonzero only
// for dJ in {0, +-2} with M_bra - M_ket = 2*sign.  Real in this phase
// convention; <a|T-|b> == <b|T+|a>.
double sin2_exp2iphi_matrix_element(const RotState& bra, const RotState& ket, int sign);

// Which M sublevels a basis keeps.  Linearly polarized drives conserve M
// exactly and rotating drives conserve M parity, so the restricted bases are
// exact reductions for the corresponding protocols (the unrestricted basis is
// used to demonstrate that numerically).
enum class MRestriction { All, EvenM, ZeroM };

// Even-J rotor basis J = 0, 2, ..., j_max, ordered by (J, M).
class RotorBasis {
 public:
  static RotorBasis even_states(int j_max, MRestriction restriction = MRestriction::All);

  int j_max() const { return j_max_; }
  MRestriction restriction() const { return restriction_; }
  int size() const { return static_cast<int>(states_.size()); }
  const std::vector<RotState>& states() const { return states_; }
  const RotState& state(int i) const { return states_[i]; }

  bool contains(const RotState& s) const { return index_of(s) >= 0; }
  int index_of(const RotState& s) const;      // -1 if absent
  int require_index(const RotState& s) const; // throws ConfigError if absent

  std::vector<int> shell_indices(int j) const;

 private:
  RotorBasis() = default;
  int j_max_ = 0;
  MRestriction restriction_ = MRestriction::All;
  std::vector<RotState> states_;
};

// Dense operators over a rotor basis (built once, cached by callers).
Eigen::MatrixXd cos2_operator(const RotorBasis& basis);
Eigen::MatrixXd sin2_exp_operator(const RotorBasis& basis, int sign);
Eigen::VectorXd energy_diagonal(const RotorBasis& basis, double b0);

// Species parameters.  b0 and delta_alpha are stored in SI (rad/s and
// C m^2 / V); use from_conventional() to construct from the units usually
// quoted in tables (Hz and Angstrom^3).
struct MoleculeParams {
  std::string name;
  double b0 = 0.0;
  double delta_alpha = 0.0;
  double g_r = 0.0;
  double mass_amu = 0.0;

  double qubit_gap() const { return 6.0 * b0; }  // E(2) - E(0) = 6 B0

  static MoleculeParams from_conventional(const std::string& name, double b0_hz,
                                          double delta_alpha_a3, double g_r, double mass_amu);
  static MoleculeParams ns2_plus();
};

}  // namespace rotorsim
