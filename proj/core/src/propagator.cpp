#include "rotorsim/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rotorsim/constants.hpp"
#include "rotorsim/errors.hpp"

namespace rotorsim {

namespace {

// Fourth-order commutator-free scheme on the Gauss-Legendre nodes
//   t + h*(1/2 -+ sqrt(3)/6):
//   U(h) = exp(-i h (w2 H1 + w1 H2)) * exp(-i h (w1 H1 + w2 H2))
// with w1 = 1/4 + sqrt(3)/6, w2 = 1/4 - sqrt(3)/6.
const double kSqrt3 = std::sqrt(3.0);
const double kNodeA = 0.5 - kSqrt3 / 6.0;
const double kNodeB = 0.5 + kSqrt3 / 6.0;
const double kWeightMajor = 0.25 + kSqrt3 / 6.0;
const double kWeightMinor = 0.25 - kSqrt3 / 6.0;

struct Stepper {
  const Hamiltonian& h;
  Workspace ws;
  Vector term, hv;
  long steps = 0;
  long max_steps = 0;

  explicit Stepper(const Hamiltonian& ham) : h(ham) {
    term.resize(ham.dim());
    hv.resize(ham.dim());
  }

  // psi <- exp(-i dt (wa H(ta) + wb H(tb))) psi via scaled Taylor series.
  void expm_apply(Vector& psi, double dt, double wa, double ta, double wb,
                  double tb, double norm_bound) {
    const double theta = std::abs(dt) * (std::abs(wa) + std::abs(wb)) * norm_bound;
    const int scalings = std::max(1, static_cast<int>(std::ceil(theta / 0.5)));
    const Complex ca = Complex{0.0, -1.0} * (dt * wa / scalings);
    const Complex cb = Complex{0.0, -1.0} * (dt * wb / scalings);
    for (int rep = 0; rep < scalings; ++rep) {
      term = psi;
      const double ref = psi.norm();
      for (int j = 1; j <= 60; ++j) {
        h.apply_blend(ta, ca, tb, cb, term, hv, ws);
        term = hv / static_cast<double>(j);
        psi.noalias() += term;
        if (term.norm() <= 1e-16 * ref) break;
        if (j == 60) throw SimulationError("matrix exponential series did not converge");
      }
    }
  }

  void cf4_step(Vector& psi, double t, double dt, double norm_bound) {
    const double ta = t + kNodeA * dt;
    const double tb = t + kNodeB * dt;
    expm_apply(psi, dt, kWeightMajor, ta, kWeightMinor, tb, norm_bound);
    expm_apply(psi, dt, kWeightMinor, ta, kWeightMajor, tb, norm_bound);
    ++steps;
    if (steps > max_steps) throw SimulationError("step budget exceeded");
  }
};

}  // namespace

static PropagationStats propagate_impl(JointState& state, const Hamiltonian& h,
                                       double t0, double t1,
                                       const std::vector<double>& sample_times,
                                       const SampleObserver& observer,
                                       const PropagationOptions& opts) {
  if (state.basis() != h.basis()) throw ConfigError("state and Hamiltonian bases differ");
  if (t1 < t0) throw ConfigError("propagation interval is reversed");
  for (size_t i = 0; i < sample_times.size(); ++i) {
    if (sample_times[i] < t0 || sample_times[i] > t1) {
      throw ConfigError("sample time outside the propagation interval");
    }
    if (i > 0 && sample_times[i] <= sample_times[i - 1]) {
      throw ConfigError("sample times must be strictly increasing");
    }
  }

  // Segment boundaries: window edges plus sample times.
  std::vector<double> edges = h.breakpoints(t0, t1);
  std::vector<double> events;
  events.reserve(edges.size() + sample_times.size() + 2);
  events.push_back(t0);
  events.insert(events.end(), edges.begin(), edges.end());
  for (double s : sample_times) {
    if (s > t0 && s < t1) events.push_back(s);
  }
  events.push_back(t1);
  std::sort(events.begin(), events.end());
  events.erase(std::unique(events.begin(), events.end()), events.end());

  const Vector initial = state.amplitudes();
  const double initial_norm = initial.norm();

  PropagationStats stats;
  Stepper stepper(h);
  stepper.max_steps = opts.max_steps_per_pass;

  std::vector<Vector> samples(sample_times.size());
  Vector prev_final;

  int pts = opts.points_per_period;
  bool converged = sample_times.empty() && t1 == t0;
  for (int pass = 0; pass <= opts.max_refinements; ++pass) {
    Vector psi = initial;
    stepper.steps = 0;
    size_t next_sample = 0;
    auto record = [&](double t) {
      while (next_sample < sample_times.size() && sample_times[next_sample] == t) {
        samples[next_sample] = psi;
        ++next_sample;
      }
    };
    record(t0);
    for (size_t e = 0; e + 1 < events.size(); ++e) {
      const double s0 = events[e];
      const double s1 = events[e + 1];
      if (h.idle(s0, s1)) {
        if (h.frame() == Frame::Lab) {
          psi.array() *= (Complex{0.0, -1.0} * (s1 - s0) * h.basis()->energies()).array().exp();
        }
      } else {
        const double bound = h.norm_bound(s0, s1);
        const double omega = std::max(h.max_element_frequency(s0, s1), bound);
        const double wanted = (s1 - s0) * omega * pts / constants::two_pi;
        if (wanted > static_cast<double>(opts.max_steps_per_pass)) {
          throw SimulationError("step budget exceeded");
        }
        const long n = std::max(1L, static_cast<long>(std::ceil(wanted)));
        const double dt = (s1 - s0) / static_cast<double>(n);
        for (long k = 0; k < n; ++k) {
          stepper.cf4_step(psi, s0 + k * dt, dt, bound);
        }
      }
      record(s1);
    }
    if (next_sample != sample_times.size()) {
      throw SimulationError("internal error: sample times not visited");
    }

    stats.total_steps += stepper.steps;
    stats.steps = stepper.steps;
    stats.refinements = pass;
    stats.norm_drift = std::abs(psi.norm() - initial_norm);
    if (stats.norm_drift > opts.norm_tolerance * std::max(1.0, initial_norm)) {
      throw SimulationError("propagation lost unitarity (norm drift " +
                            std::to_string(stats.norm_drift) + ")");
    }
    if (pass > 0) {
      stats.step_error = (psi - prev_final).cwiseAbs().maxCoeff();
      if (stats.step_error <= opts.tolerance) {
        converged = true;
        state.amplitudes() = std::move(psi);
        break;
      }
    }
    prev_final = psi;
    state.amplitudes() = std::move(psi);
    if (stepper.steps == 0) {  // nothing active: the pass is exact
      converged = true;
      break;
    }
    pts *= 2;
  }
  if (!converged && opts.require_converged) {
    throw SimulationError("time integration did not converge to tolerance " +
                          std::to_string(opts.tolerance));
  }
  if (observer) {
    for (size_t i = 0; i < sample_times.size(); ++i) {
      observer(static_cast<int>(i), sample_times[i], samples[i]);
    }
  }
  return stats;
}

PropagationStats propagate(JointState& state, const Hamiltonian& h, double t0,
                           double t1, const PropagationOptions& opts) {
  return propagate_impl(state, h, t0, t1, {}, nullptr, opts);
}

PropagationStats propagate_sampled(JointState& state, const Hamiltonian& h,
                                   double t0, double t1,
                                   const std::vector<double>& sample_times,
                                   const SampleObserver& observer,
                                   const PropagationOptions& opts) {
  return propagate_impl(state, h, t0, t1, sample_times, observer, opts);
}

}  // namespace rotorsim
