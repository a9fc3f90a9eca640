#include "rotorsim/basis.hpp"

#include <numeric>
#include <sstream>

#include "rotorsim/errors.hpp"

namespace rotorsim {

int factor_dim(const Factor& f) {
  return std::visit(
      [](const auto& x) -> int {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, RotorFactor>) {
          return x.basis.size();
        } else if constexpr (std::is_same_v<T, QubitFactor>) {
          return 2;
        } else {
          return x.n_max + 1;
        }
      },
      f);
}

std::string factor_label(const Factor& f) {
  return std::visit([](const auto& x) { return x.label; }, f);
}

std::string local_label(const Factor& f, int local) {
  return std::visit(
      [local](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, RotorFactor>) {
          return to_label(x.basis.state(local));
        } else if constexpr (std::is_same_v<T, QubitFactor>) {
          return local == 0 ? x.lower : x.upper;
        } else {
          return "n" + std::to_string(local);
        }
      },
      f);
}

Eigen::VectorXd factor_energies(const Factor& f) {
  return std::visit(
      [](const auto& x) -> Eigen::VectorXd {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, RotorFactor>) {
          Eigen::VectorXd e(x.basis.size());
          for (int i = 0; i < x.basis.size(); ++i) {
            e[i] = rot_energy(x.basis.state(i).j, x.b0);
          }
          return e;
        } else if constexpr (std::is_same_v<T, QubitFactor>) {
          Eigen::VectorXd e(2);
          e << 0.0, x.gap;
          return e;
        } else {
          Eigen::VectorXd e(x.n_max + 1);
          for (int n = 0; n <= x.n_max; ++n) e[n] = x.nu * n;
          return e;
        }
      },
      f);
}

std::shared_ptr<const ProductBasis> ProductBasis::create(std::vector<Factor> factors) {
  if (factors.empty()) throw ConfigError("product basis needs at least one factor");
  auto basis = std::make_shared<ProductBasis>();
  basis->factors_ = std::move(factors);
  const int nf = static_cast<int>(basis->factors_.size());
  basis->dims_.resize(nf);
  basis->strides_.resize(nf);
  long dim = 1;
  for (int f = 0; f < nf; ++f) {
    basis->dims_[f] = rotorsim::factor_dim(basis->factors_[f]);
    if (basis->dims_[f] <= 0) throw ConfigError("empty basis factor");
    dim *= basis->dims_[f];
    if (dim > 2'000'000) throw ConfigError("joint basis dimension too large");
  }
  basis->dim_ = static_cast<int>(dim);
  int stride = basis->dim_;
  for (int f = 0; f < nf; ++f) {
    stride /= basis->dims_[f];
    basis->strides_[f] = stride;
  }
  basis->energies_ = Eigen::VectorXd::Zero(basis->dim_);
  for (int f = 0; f < nf; ++f) {
    const Eigen::VectorXd ef = factor_energies(basis->factors_[f]);
    for (int i = 0; i < basis->dim_; ++i) {
      basis->energies_[i] += ef[basis->local_of(i, f)];
    }
  }
  return basis;
}

const RotorFactor& ProductBasis::rotor(int f) const {
  const auto* p = std::get_if<RotorFactor>(&factors_.at(f));
  if (!p) throw ConfigError("factor " + std::to_string(f) + " is not a rotor");
  return *p;
}

const QubitFactor& ProductBasis::qubit(int f) const {
  const auto* p = std::get_if<QubitFactor>(&factors_.at(f));
  if (!p) throw ConfigError("factor " + std::to_string(f) + " is not a qubit");
  return *p;
}

const PhononFactor& ProductBasis::phonon(int f) const {
  const auto* p = std::get_if<PhononFactor>(&factors_.at(f));
  if (!p) throw ConfigError("factor " + std::to_string(f) + " is not a phonon mode");
  return *p;
}

int ProductBasis::flatten(const std::vector<int>& locals) const {
  if (static_cast<int>(locals.size()) != factor_count()) {
    throw ConfigError("local index count does not match factor count");
  }
  int index = 0;
  for (int f = 0; f < factor_count(); ++f) {
    if (locals[f] < 0 || locals[f] >= dims_[f]) {
      throw ConfigError("local index out of range for factor " + factor_label(factors_[f]));
    }
    index += locals[f] * strides_[f];
  }
  return index;
}

std::vector<int> ProductBasis::unflatten(int index) const {
  std::vector<int> locals(factor_count());
  for (int f = 0; f < factor_count(); ++f) locals[f] = local_of(index, f);
  return locals;
}

std::string ProductBasis::label(int index) const {
  std::ostringstream out;
  for (int f = 0; f < factor_count(); ++f) {
    if (f > 0) out << ".";
    if (factor_count() > 1) out << factor_label(factors_[f]) << ":";
    out << local_label(factors_[f], local_of(index, f));
  }
  return out.str();
}

JointState::JointState(BasisPtr basis)
    : basis_(std::move(basis)), amps_(Vector::Zero(basis_->dim())) {}

JointState::JointState(BasisPtr basis, Vector amplitudes)
    : basis_(std::move(basis)), amps_(std::move(amplitudes)) {
  if (amps_.size() != basis_->dim()) throw ConfigError("amplitude size does not match basis");
}

JointState JointState::basis_state(BasisPtr basis, const std::vector<int>& locals) {
  JointState s(basis);
  s.amps_[s.basis_->flatten(locals)] = 1.0;
  return s;
}

void JointState::normalize() {
  const double n = norm();
  if (n <= 0.0) throw SimulationError("cannot normalize a zero state");
  amps_ /= n;
}

double JointState::factor_population(int f, int local) const {
  double p = 0.0;
  for (int i = 0; i < dim(); ++i) {
    if (basis_->local_of(i, f) == local) p += std::norm(amps_[i]);
  }
  return p;
}

Eigen::MatrixXcd JointState::reduced_density(const std::vector<int>& keep) const {
  long kept_dim = 1;
  for (int f : keep) kept_dim *= basis_->factor_dim(f);
  if (kept_dim > 4096) throw ConfigError("reduced density matrix too large");
  std::vector<int> kept_strides(keep.size());
  {
    long s = kept_dim;
    for (size_t k = 0; k < keep.size(); ++k) {
      s /= basis_->factor_dim(keep[k]);
      kept_strides[k] = static_cast<int>(s);
    }
  }
  auto project = [&](int index) {
    int r = 0;
    for (size_t k = 0; k < keep.size(); ++k) {
      r += basis_->local_of(index, keep[k]) * kept_strides[k];
    }
    return r;
  };
  // Group joint indices by the traced-out part so that each group contributes
  // one dyad.
  std::vector<int> env_key(dim());
  for (int i = 0; i < dim(); ++i) {
    int key = 0;
    int mul = 1;
    for (int f = 0; f < basis_->factor_count(); ++f) {
      bool is_kept = false;
      for (int kf : keep) is_kept |= (kf == f);
      if (is_kept) continue;
      key = key * basis_->factor_dim(f) + basis_->local_of(i, f);
      mul *= basis_->factor_dim(f);
    }
    (void)mul;
    env_key[i] = key;
  }
  const int env_dim = dim() / static_cast<int>(kept_dim);
  Eigen::MatrixXcd cols = Eigen::MatrixXcd::Zero(kept_dim, env_dim);
  for (int i = 0; i < dim(); ++i) cols(project(i), env_key[i]) += amps_[i];
  return cols * cols.adjoint();
}

double state_fidelity(const JointState& a, const JointState& b) {
  if (a.basis() != b.basis() && a.dim() != b.dim()) {
    throw ConfigError("fidelity between states on different bases");
  }
  return std::norm(a.amplitudes().dot(b.amplitudes()));
}

double reduced_fidelity(const JointState& a, const std::vector<int>& keep,
                        const Eigen::VectorXcd& psi_ref) {
  const Eigen::MatrixXcd rho = a.reduced_density(keep);
  if (rho.rows() != psi_ref.size()) {
    throw ConfigError("reference state does not match reduced space");
  }
  return std::real(psi_ref.dot(rho * psi_ref));
}

}  // namespace rotorsim
