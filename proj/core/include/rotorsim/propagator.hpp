#pragma once

#include <functional>
#include <vector>

#include "rotorsim/basis.hpp"
#include "rotorsim/hamiltonian.hpp"

namespace rotorsim {

struct PropagationOptions {
  // Convergence target for inter-pass amplitude differences (max abs).
  double tolerance = 1e-8;
  // Initial sampling density relative to the fastest kept element frequency.
  int points_per_period = 16;
  // Each refinement pass halves the step until two passes agree.
  int max_refinements = 10;
  // Allowed drift of the state norm over a pass.
  double norm_tolerance = 1e-9;
  long max_steps_per_pass = 50'000'000;
  bool require_converged = true;
};

struct PropagationStats {
  long steps = 0;        // steps taken by the accepted pass
  long total_steps = 0;  // steps across all passes
  int refinements = 0;
  double step_error = 0.0;  // final inter-pass difference
  double norm_drift = 0.0;
};

using SampleObserver = std::function<void(int index, double t, const Vector& amps)>;

// Evolve `state` from t0 to t1 under H using a fourth-order commutator-free
// exponential integrator (two Gauss nodes per step, exponentials applied by
// scaled Taylor expansion).  Steps never cross pulse-window edges.
PropagationStats propagate(JointState& state, const Hamiltonian& h, double t0,
                           double t1, const PropagationOptions& opts = {});

// Same, recording amplitudes at the given strictly increasing times within
// [t0, t1].  The observer sees samples from the accepted (converged) pass.
PropagationStats propagate_sampled(JointState& state, const Hamiltonian& h,
                                   double t0, double t1,
                                   const std::vector<double>& sample_times,
                                   const SampleObserver& observer,
                                   const PropagationOptions& opts = {});

}  // namespace rotorsim
