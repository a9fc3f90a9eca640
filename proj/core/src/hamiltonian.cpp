#include "rotorsim/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

#include "rotorsim/errors.hpp"

namespace rotorsim {

void Workspace::resize(int dim) {
  if (acc.size() == dim) return;
  acc.resize(dim);
  tmp_a.resize(dim);
  tmp_b.resize(dim);
}

Hamiltonian::Hamiltonian(BasisPtr basis, Frame frame)
    : basis_(std::move(basis)),
      frame_(frame),
      compile_state_(std::make_shared<CompileState>()) {}

void Hamiltonian::add_term(HamiltonianTerm term) {
  if (term.window.duration <= 0.0) throw ConfigError("term window must have positive duration");
  TermMeta meta;
  meta.op_norm = std::abs(term.scale);
  for (auto& [f, op] : term.factor_ops) {
    if (f < 0 || f >= basis_->factor_count()) throw ConfigError("term factor index out of range");
    if (op.rows() != basis_->factor_dim(f) || op.cols() != basis_->factor_dim(f)) {
      throw ConfigError("term operator shape does not match factor dimension");
    }
    // Spectral-norm bound: min of Frobenius and sqrt(norm1 * normInf).  The
    // latter is much tighter for ladder operators on large phonon spaces.
    const double holder = std::sqrt(op.cwiseAbs().colwise().sum().maxCoeff() *
                                    op.cwiseAbs().rowwise().sum().maxCoeff());
    meta.op_norm *= std::min(op.norm(), holder);
    const Eigen::VectorXd ef = factor_energies(basis_->factor(f));
    double lo = 0.0, hi = 0.0;
    bool any = false;
    for (int r = 0; r < op.rows(); ++r) {
      for (int c = 0; c < op.cols(); ++c) {
        if (op(r, c) == Complex{0.0, 0.0}) continue;
        const double shift = ef[r] - ef[c];
        lo = any ? std::min(lo, shift) : shift;
        hi = any ? std::max(hi, shift) : shift;
        any = true;
      }
    }
    if (!any) return;  // operator is exactly zero; drop the term
    meta.min_bare_shift += lo;
    meta.max_bare_shift += hi;
  }
  terms_.push_back(std::move(term));
  meta_.push_back(meta);
  compile_state_ = std::make_shared<CompileState>();
}

const std::vector<Hamiltonian::CompiledBlock>& Hamiltonian::compiled() const {
  CompileState& state = *compile_state_;
  std::call_once(state.once, [&] {
    const Eigen::VectorXd& energy = basis_->energies();
    const int factors = basis_->factor_count();
    // Block lookup key: (window start, window duration, residual).
    std::map<std::tuple<double, double, double>, size_t> index;
    struct Part {
      int row, col;
      Complex v;
    };
    for (const auto& term : terms_) {
      // Collapse repeated factor indices into one operator per factor
      // (later entries act after earlier ones).
      std::vector<Eigen::MatrixXcd> ops(factors);
      for (const auto& [f, op] : term.factor_ops) {
        ops[f] = ops[f].size() == 0 ? op : Eigen::MatrixXcd(op * ops[f]);
      }
      std::vector<Part> parts{{0, 0, term.scale}};
      for (int f = 0; f < factors; ++f) {
        const int stride = basis_->stride(f);
        std::vector<Part> next;
        if (ops[f].size() == 0) {  // identity factor
          const int d = basis_->factor_dim(f);
          next.reserve(parts.size() * d);
          for (int i = 0; i < d; ++i) {
            for (const Part& p : parts) {
              next.push_back({p.row + i * stride, p.col + i * stride, p.v});
            }
          }
        } else {
          const auto& op = ops[f];
          for (int r = 0; r < op.rows(); ++r) {
            for (int c = 0; c < op.cols(); ++c) {
              if (op(r, c) == Complex{0.0, 0.0}) continue;
              for (const Part& p : parts) {
                next.push_back({p.row + r * stride, p.col + c * stride, p.v * op(r, c)});
              }
            }
          }
        }
        parts = std::move(next);
      }
      auto emit = [&](int row, int col, Complex val, double rho) {
        const auto key = std::make_tuple(term.window.start, term.window.duration, rho);
        auto [it, fresh] = index.try_emplace(key, state.blocks.size());
        if (fresh) state.blocks.push_back({rho, term.window, {}, {}, {}});
        CompiledBlock& block = state.blocks[it->second];
        block.row.push_back(row);
        block.col.push_back(col);
        block.val.push_back(val);
      };
      for (const Part& p : parts) {
        emit(p.row, p.col, p.v, energy[p.row] - energy[p.col] - term.tone);
        if (term.add_conjugate) {
          emit(p.col, p.row, std::conj(p.v), energy[p.col] - energy[p.row] + term.tone);
        }
      }
    }
  });
  return state.blocks;
}

void Hamiltonian::apply_factor_op(const ProductBasis& basis, int f,
                                  const Eigen::MatrixXcd& op, bool adjoint,
                                  const Vector& x, Vector& y) {
  const int d = basis.factor_dim(f);
  const int post = basis.stride(f);
  const int pre = basis.dim() / (d * post);
  for (int a = 0; a < pre; ++a) {
    Eigen::Map<const Eigen::MatrixXcd> in(x.data() + static_cast<long>(a) * d * post, post, d);
    Eigen::Map<Eigen::MatrixXcd> out(y.data() + static_cast<long>(a) * d * post, post, d);
    if (adjoint) {
      out.noalias() = in * op.conjugate();
    } else {
      out.noalias() = in * op.transpose();
    }
  }
}

void Hamiltonian::apply_terms(double t, const Vector& x, Vector& y, Workspace& ws) const {
  y.setZero();
  for (size_t k = 0; k < terms_.size(); ++k) {
    const auto& term = terms_[k];
    if (!term.window.contains(t)) continue;
    for (int pass = 0; pass < (term.add_conjugate ? 2 : 1); ++pass) {
      const bool adjoint = pass == 1;
      const Vector* src = &x;
      Vector* dst = &ws.tmp_a;
      for (const auto& [f, op] : term.factor_ops) {
        apply_factor_op(*basis_, f, op, adjoint, *src, *dst);
        src = dst;
        dst = (dst == &ws.tmp_a) ? &ws.tmp_b : &ws.tmp_a;
      }
      const double arg = term.tone * t;
      const Complex phase = adjoint ? std::polar(1.0, arg) : std::polar(1.0, -arg);
      const Complex coeff = (adjoint ? std::conj(term.scale) : term.scale) * phase;
      y.noalias() += coeff * (*src);
    }
  }
}

void Hamiltonian::apply(double t, const Vector& x, Vector& y, Workspace& ws) const {
  ws.resize(dim());
  if (frame_ == Frame::Lab) {
    apply_terms(t, x, y, ws);
    y.array() += basis_->energies().array() * x.array();
    return;
  }
  y.setZero();
  const Complex* xs = x.data();
  Complex* ys = y.data();
  for (const auto& block : compiled()) {
    if (!block.window.contains(t)) continue;
    const Complex phase = std::polar(1.0, block.rho * t);
    const size_t n = block.row.size();
    for (size_t i = 0; i < n; ++i) {
      ys[block.row[i]] += phase * block.val[i] * xs[block.col[i]];
    }
  }
}

void Hamiltonian::apply(double t, const Vector& x, Vector& y) const {
  Workspace ws;
  apply(t, x, y, ws);
}

void Hamiltonian::apply_blend(double ta, Complex ca, double tb, Complex cb,
                              const Vector& x, Vector& y, Workspace& ws) const {
  ws.resize(dim());
  if (frame_ == Frame::Lab) {
    apply(ta, x, y, ws);
    apply(tb, x, ws.acc, ws);
    y = ca * y + cb * ws.acc;
    return;
  }
  y.setZero();
  const Complex* xs = x.data();
  Complex* ys = y.data();
  for (const auto& block : compiled()) {
    Complex phase{0.0, 0.0};
    if (block.window.contains(ta)) phase += ca * std::polar(1.0, block.rho * ta);
    if (block.window.contains(tb)) phase += cb * std::polar(1.0, block.rho * tb);
    if (phase == Complex{0.0, 0.0}) continue;
    const size_t n = block.row.size();
    for (size_t i = 0; i < n; ++i) {
      ys[block.row[i]] += phase * block.val[i] * xs[block.col[i]];
    }
  }
}

double Hamiltonian::norm_bound(double t0, double t1) const {
  double bound = 0.0;
  for (size_t k = 0; k < terms_.size(); ++k) {
    const auto& w = terms_[k].window;
    if (w.start >= t1 || w.end() <= t0) continue;
    bound += meta_[k].op_norm * (terms_[k].add_conjugate ? 2.0 : 1.0);
  }
  if (frame_ == Frame::Lab && basis_->dim() > 0) {
    bound += basis_->energies().cwiseAbs().maxCoeff();
  }
  return bound;
}

double Hamiltonian::max_element_frequency(double t0, double t1) const {
  double fmax = 0.0;
  for (size_t k = 0; k < terms_.size(); ++k) {
    const auto& term = terms_[k];
    if (term.window.start >= t1 || term.window.end() <= t0) continue;
    if (frame_ == Frame::Lab) {
      fmax = std::max(fmax, std::abs(term.tone));
      continue;
    }
    const double lo = meta_[k].min_bare_shift - term.tone;
    const double hi = meta_[k].max_bare_shift - term.tone;
    fmax = std::max({fmax, std::abs(lo), std::abs(hi)});
  }
  return fmax;
}

bool Hamiltonian::idle(double t0, double t1) const {
  for (const auto& term : terms_) {
    if (term.window.start < t1 && term.window.end() > t0) return false;
  }
  return true;
}

std::vector<double> Hamiltonian::breakpoints(double t0, double t1) const {
  std::vector<double> edges;
  for (const auto& term : terms_) {
    for (double e : {term.window.start, term.window.end()}) {
      if (e > t0 && e < t1 && std::isfinite(e)) edges.push_back(e);
    }
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

Eigen::MatrixXcd Hamiltonian::dense(double t) const {
  if (dim() > 2048) throw ConfigError("dense Hamiltonian requested for a large basis");
  Eigen::MatrixXcd h(dim(), dim());
  Workspace ws;
  Vector e = Vector::Zero(dim());
  Vector col(dim());
  for (int j = 0; j < dim(); ++j) {
    e[j] = 1.0;
    apply(t, e, col, ws);
    h.col(j) = col;
    e[j] = 0.0;
  }
  return h;
}

}  // namespace rotorsim
