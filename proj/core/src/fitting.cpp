#include "rotorsim/fitting.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>

#include "rotorsim/constants.hpp"
#include "rotorsim/errors.hpp"

namespace rotorsim {

namespace {

// Sum of squared residuals of the best a*cos(wt) + b*sin(wt) + c fit at a
// fixed frequency, with the coefficients reported through `coef`.
double sse_at(double omega, const std::vector<double>& t, const std::vector<double>& y,
              Eigen::Vector3d* coef) {
  const int n = static_cast<int>(t.size());
  Eigen::Matrix3d ata = Eigen::Matrix3d::Zero();
  Eigen::Vector3d aty = Eigen::Vector3d::Zero();
  for (int i = 0; i < n; ++i) {
    const Eigen::Vector3d row(std::cos(omega * t[i]), std::sin(omega * t[i]), 1.0);
    ata += row * row.transpose();
    aty += row * y[i];
  }
  const Eigen::Vector3d x = ata.ldlt().solve(aty);
  double sse = 0.0;
  for (int i = 0; i < n; ++i) {
    const double fit = x[0] * std::cos(omega * t[i]) + x[1] * std::sin(omega * t[i]) + x[2];
    sse += (y[i] - fit) * (y[i] - fit);
  }
  if (coef) *coef = x;
  return sse;
}

}  // namespace

SinusoidFit fit_sinusoid(const std::vector<double>& t, const std::vector<double>& y) {
  if (t.size() != y.size() || t.size() < 8) {
    throw ConfigError("fit_sinusoid needs at least 8 samples");
  }
  const double span = t.back() - t.front();
  if (span <= 0.0) throw ConfigError("fit_sinusoid needs increasing sample times");
  double dt_min = span;
  for (size_t i = 1; i < t.size(); ++i) dt_min = std::min(dt_min, t[i] - t[i - 1]);

  const double omega_lo = 0.25 * constants::two_pi / span;
  const double omega_hi = 0.9 * constants::pi / dt_min;
  const double step = 0.05 * constants::two_pi / span;
  double best_omega = omega_lo;
  double best_sse = std::numeric_limits<double>::infinity();
  for (double w = omega_lo; w <= omega_hi; w += step) {
    const double sse = sse_at(w, t, y, nullptr);
    if (sse < best_sse) {
      best_sse = sse;
      best_omega = w;
    }
  }

  // Golden-section refinement around the best grid cell.
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = std::max(omega_lo, best_omega - step);
  double b = std::min(omega_hi, best_omega + step);
  double c = b - gr * (b - a);
  double d = a + gr * (b - a);
  double fc = sse_at(c, t, y, nullptr);
  double fd = sse_at(d, t, y, nullptr);
  for (int it = 0; it < 80 && (b - a) > 1e-14 * best_omega; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = sse_at(c, t, y, nullptr);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = sse_at(d, t, y, nullptr);
    }
  }
  const double omega = 0.5 * (a + b);
  Eigen::Vector3d coef;
  const double sse = sse_at(omega, t, y, &coef);

  SinusoidFit fit;
  fit.omega = omega;
  fit.amplitude = std::hypot(coef[0], coef[1]);
  fit.phase = std::atan2(-coef[1], coef[0]);
  fit.offset = coef[2];
  fit.rms_residual = std::sqrt(sse / static_cast<double>(t.size()));
  return fit;
}

namespace {

DecayFit fit_log_linear(const std::vector<double>& t, const std::vector<double>& y,
                        bool quadratic) {
  if (t.size() != y.size() || t.size() < 3) {
    throw ConfigError("decay fit needs at least 3 samples");
  }
  // Weighted least squares on ln y = -x / scale with x = t or t^2; weights y^2
  // undo the log-space distortion.  Points near zero carry no information.
  double sxx = 0.0, sxy = 0.0;
  int used = 0;
  for (size_t i = 0; i < t.size(); ++i) {
    if (y[i] < 0.02 || t[i] < 0.0) continue;
    const double x = quadratic ? t[i] * t[i] : t[i];
    const double w = y[i] * y[i];
    sxx += w * x * x;
    sxy += w * x * std::log(y[i]);
    ++used;
  }
  if (used < 3 || sxx == 0.0) throw ConfigError("decay fit: too few usable samples");
  const double slope = sxy / sxx;  // expected negative
  if (slope >= 0.0) throw ConfigError("decay fit: data does not decay");
  DecayFit fit;
  fit.time_constant = quadratic ? 1.0 / std::sqrt(-slope) : -1.0 / slope;
  double sse = 0.0;
  for (size_t i = 0; i < t.size(); ++i) {
    const double x = quadratic ? t[i] * t[i] : t[i];
    const double model = std::exp(slope * x);
    sse += (y[i] - model) * (y[i] - model);
  }
  fit.rms_residual = std::sqrt(sse / static_cast<double>(t.size()));
  return fit;
}

}  // namespace

DecayFit fit_gaussian_decay(const std::vector<double>& t, const std::vector<double>& y) {
  return fit_log_linear(t, y, true);
}

DecayFit fit_exponential_decay(const std::vector<double>& t, const std::vector<double>& y) {
  return fit_log_linear(t, y, false);
}

}  // namespace rotorsim
