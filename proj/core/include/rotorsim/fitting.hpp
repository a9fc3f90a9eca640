#pragma once

#include <vector>

namespace rotorsim {

// y(t) ~ amplitude * cos(omega t + phase) + offset.
struct SinusoidFit {
  double omega = 0.0;
  double amplitude = 0.0;
  double phase = 0.0;
  double offset = 0.0;
  double rms_residual = 0.0;
};

// Grid scan over omega with a linear least-squares solve per candidate,
// then a golden-section refinement around the best cell.
SinusoidFit fit_sinusoid(const std::vector<double>& t, const std::vector<double>& y);

struct DecayFit {
  double time_constant = 0.0;
  double rms_residual = 0.0;  // in the original (linear) space
};

// y(t) ~ exp(-(t / T)^2); log-space weighted linear fit.
DecayFit fit_gaussian_decay(const std::vector<double>& t, const std::vector<double>& y);
// y(t) ~ exp(-t / T).
DecayFit fit_exponential_decay(const std::vector<double>& t, const std::vector<double>& y);

}  // namespace rotorsim
