#pragma once

#include <Eigen/Dense>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "rotorsim/basis.hpp"
#include "rotorsim/fields.hpp"

namespace rotorsim {

enum class Frame {
  Interaction,  // bare energies absorbed into rotating phases
  Lab,          // bare energy diagonal kept explicitly
};

// One product-operator term:
//   scale * exp(-i tone t) * (op_1 x op_2 x ...)   [+ h.c. if add_conjugate]
// active inside `window`.  Factors not listed act as identity.
struct HamiltonianTerm {
  Complex scale{0.0, 0.0};
  double tone = 0.0;  // rad/s
  PulseWindow window{};
  std::vector<std::pair<int, Eigen::MatrixXcd>> factor_ops;
  bool add_conjugate = true;
};

struct Workspace {
  Vector acc, tmp_a, tmp_b;
  void resize(int dim);
};

class Hamiltonian {
 public:
  Hamiltonian(BasisPtr basis, Frame frame);

  const BasisPtr& basis() const { return basis_; }
  Frame frame() const { return frame_; }
  int dim() const { return basis_->dim(); }

  void add_term(HamiltonianTerm term);
  const std::vector<HamiltonianTerm>& terms() const { return terms_; }

  // y = H(t) x.  Workspace holds scratch so concurrent callers can use one
  // Hamiltonian with per-thread workspaces.
  void apply(double t, const Vector& x, Vector& y, Workspace& ws) const;
  void apply(double t, const Vector& x, Vector& y) const;
  // y = (ca H(ta) + cb H(tb)) x, the combination the integrator needs at its
  // two quadrature nodes; one sweep over the compiled elements.
  void apply_blend(double ta, Complex ca, double tb, Complex cb, const Vector& x,
                   Vector& y, Workspace& ws) const;

  // Upper bound on ||H(t)|| over [t0, t1] (spectral norm bounded via factor
  // Frobenius norms), rad/s.
  double norm_bound(double t0, double t1) const;
  // Fastest oscillation of any active matrix element in this frame, rad/s.
  double max_element_frequency(double t0, double t1) const;
  // True if no term is active anywhere in (t0, t1).
  bool idle(double t0, double t1) const;
  // Window edges strictly inside (t0, t1), sorted.
  std::vector<double> breakpoints(double t0, double t1) const;

  // Dense matrix at time t (small systems / tests only).
  Eigen::MatrixXcd dense(double t) const;

 private:
  struct TermMeta {
    double op_norm = 0.0;       // |scale| * prod (spectral norm bound of op_f)
    double min_bare_shift = 0.0;  // min over nonzero elements of E_row - E_col
    double max_bare_shift = 0.0;
  };

  // In the interaction frame every matrix element of a term evolves as
  // val * exp(i rho t) with the constant residual rho = E_row - E_col -+ tone
  // (val includes the term scale), so the Hamiltonian compiles into a few
  // static sparse blocks with one scalar phase each; grouping by residual
  // keeps the per-apply cost at one complex exponential per block.
  struct CompiledBlock {
    double rho = 0.0;
    PulseWindow window{};
    std::vector<int> row, col;
    std::vector<Complex> val;
  };

  // Lazily built, shared across copies; add_term swaps in a fresh cache.
  struct CompileState {
    std::once_flag once;
    std::vector<CompiledBlock> blocks;
  };

  void apply_terms(double t, const Vector& x, Vector& y, Workspace& ws) const;
  static void apply_factor_op(const ProductBasis& basis, int f,
                              const Eigen::MatrixXcd& op, bool adjoint,
                              const Vector& x, Vector& y);
  const std::vector<CompiledBlock>& compiled() const;

  BasisPtr basis_;
  Frame frame_;
  std::vector<HamiltonianTerm> terms_;
  std::vector<TermMeta> meta_;
  std::shared_ptr<CompileState> compile_state_;
};

}  // namespace rotorsim
