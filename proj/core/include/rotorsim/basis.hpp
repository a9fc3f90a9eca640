#pragma once

#include <Eigen/Dense>
#include <complex>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "rotorsim/angular.hpp"

namespace rotorsim {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;

// Factors of the joint Hilbert space.  Energies are rad/s and define the
// interaction frame.

struct RotorFactor {
  RotorBasis basis;
  double b0 = 0.0;  // rad/s
  std::string label = "mol";
};

struct QubitFactor {
  std::string label = "atom";
  std::string lower = "dn";
  std::string upper = "up";
  double gap = 0.0;  // rad/s
};

struct PhononFactor {
  std::string label = "ph";
  int n_max = 0;   // highest Fock state kept
  double nu = 0.0; // rad/s
};

using Factor = std::variant<RotorFactor, QubitFactor, PhononFactor>;

int factor_dim(const Factor& f);
std::string factor_label(const Factor& f);
std::string local_label(const Factor& f, int local);
Eigen::VectorXd factor_energies(const Factor& f);

class ProductBasis {
 public:
  static std::shared_ptr<const ProductBasis> create(std::vector<Factor> factors);

  int dim() const { return dim_; }
  int factor_count() const { return static_cast<int>(factors_.size()); }
  const Factor& factor(int f) const { return factors_.at(f); }
  int factor_dim(int f) const { return dims_.at(f); }
  int stride(int f) const { return strides_.at(f); }

  const RotorFactor& rotor(int f) const;
  const QubitFactor& qubit(int f) const;
  const PhononFactor& phonon(int f) const;

  int flatten(const std::vector<int>& locals) const;
  std::vector<int> unflatten(int index) const;
  int local_of(int index, int f) const { return (index / strides_[f]) % dims_[f]; }
  std::string label(int index) const;

  // Joint energy diagonal (sum of factor energies), rad/s.
  const Eigen::VectorXd& energies() const { return energies_; }

 private:
  std::vector<Factor> factors_;
  std::vector<int> dims_;
  std::vector<int> strides_;
  int dim_ = 0;
  Eigen::VectorXd energies_;
};

using BasisPtr = std::shared_ptr<const ProductBasis>;

class JointState {
 public:
  explicit JointState(BasisPtr basis);
  JointState(BasisPtr basis, Vector amplitudes);

  static JointState basis_state(BasisPtr basis, const std::vector<int>& locals);

  const BasisPtr& basis() const { return basis_; }
  int dim() const { return static_cast<int>(amps_.size()); }
  const Vector& amplitudes() const { return amps_; }
  Vector& amplitudes() { return amps_; }

  double norm() const { return amps_.norm(); }
  void normalize();

  double population(int index) const { return std::norm(amps_[index]); }
  // Marginal population of one local level of one factor.
  double factor_population(int f, int local) const;
  // Reduced density matrix over the listed factors (in the given order).
  Eigen::MatrixXcd reduced_density(const std::vector<int>& keep) const;

 private:
  BasisPtr basis_;
  Vector amps_;
};

// |<a|b>|^2 for pure states on the same basis.
double state_fidelity(const JointState& a, const JointState& b);

// <psi_ref| rho_reduced(a) |psi_ref> where a is reduced over `keep` factors
// and psi_ref lives on that reduced space.
double reduced_fidelity(const JointState& a, const std::vector<int>& keep,
                        const Eigen::VectorXcd& psi_ref);

}  // namespace rotorsim
