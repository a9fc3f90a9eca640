#include "oracles.hpp"

#include <cmath>
#include <stdexcept>

namespace oracles {
namespace {

// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration on P_n.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.resize(n);
  w.resize(n);
  for (int i = 0; i < n; ++i) {
    double xi = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = xi;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * xi * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double dp = n * (xi * p1 - p0) / (xi * xi - 1.0);
      const double step = p1 / dp;
      xi -= step;
      if (std::abs(step) < 1e-15) break;
    }
    double p0 = 1.0, p1 = xi;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2 * k - 1) * xi * p1 - (k - 1) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    const double dp = n * (xi * p1 - p0) / (xi * xi - 1.0);
    x[i] = xi;
    w[i] = 2.0 / ((1.0 - xi * xi) * dp * dp);
  }
}

// Y_{l m}(theta, 0), real; negative m via Y_{l,-m} = (-1)^m Y_{l,m}^*.
double sph_real(int l, int m, double theta) {
  const int am = std::abs(m);
  if (am > l) return 0.0;
  const double base = std::sph_legendre(l, am, theta);
  return (m < 0 && am % 2 != 0) ? -base : base;
}

double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

}  // namespace

double cos2_element(const rotorsim::RotState& bra, const rotorsim::RotState& ket) {
  if (bra.m != ket.m) return 0.0;
  std::vector<double> x, w;
  gauss_legendre(96, x, w);
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double theta = std::acos(x[i]);
    sum += w[i] * sph_real(bra.j, bra.m, theta) * x[i] * x[i] * sph_real(ket.j, ket.m, theta);
  }
  return 2.0 * M_PI * sum;
}

double sin2_exp2iphi_element(const rotorsim::RotState& bra, const rotorsim::RotState& ket,
                             int sign) {
  if (bra.m != ket.m + 2 * sign) return 0.0;
  std::vector<double> x, w;
  gauss_legendre(96, x, w);
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double theta = std::acos(x[i]);
    const double sin2 = 1.0 - x[i] * x[i];
    sum += w[i] * sph_real(bra.j, bra.m, theta) * sin2 * sph_real(ket.j, ket.m, theta);
  }
  return 2.0 * M_PI * sum;
}

double wigner3j(int j1, int j2, int j3, int m1, int m2, int m3) {
  if (m1 + m2 + m3 != 0) return 0.0;
  if (j3 < std::abs(j1 - j2) || j3 > j1 + j2) return 0.0;
  if (std::abs(m1) > j1 || std::abs(m2) > j2 || std::abs(m3) > j3) return 0.0;

  const double delta = std::sqrt(factorial(j1 + j2 - j3) * factorial(j1 - j2 + j3) *
                                 factorial(-j1 + j2 + j3) / factorial(j1 + j2 + j3 + 1));
  const double norm = std::sqrt(factorial(j1 + m1) * factorial(j1 - m1) * factorial(j2 + m2) *
                                factorial(j2 - m2) * factorial(j3 + m3) * factorial(j3 - m3));
  const int k_min = std::max({0, j2 - j3 - m1, j1 - j3 + m2});
  const int k_max = std::min({j1 + j2 - j3, j1 - m1, j2 + m2});
  double sum = 0.0;
  for (int k = k_min; k <= k_max; ++k) {
    const double term = factorial(k) * factorial(j1 + j2 - j3 - k) * factorial(j1 - m1 - k) *
                        factorial(j2 + m2 - k) * factorial(j3 - j2 + m1 + k) *
                        factorial(j3 - j1 - m2 + k);
    sum += (k % 2 == 0 ? 1.0 : -1.0) / term;
  }
  const double phase = ((j1 - j2 - m3) % 2 == 0) ? 1.0 : -1.0;
  return phase * delta * norm * sum;
}

double vote_error(int reps, double p, bool input_up) {
  // W wrong rounds out of reps; input down misreads when 2W > reps, input up
  // when 2(reps - W) <= reps.
  double err = 0.0;
  for (int w = 0; w <= reps; ++w) {
    const bool wrong_vote = input_up ? (2 * (reps - w) <= reps) : (2 * w > reps);
    if (!wrong_vote) continue;
    double pw = 1.0;
    for (int i = 0; i < w; ++i) pw *= p * double(reps - i) / double(i + 1);
    for (int i = 0; i < reps - w; ++i) pw *= 1.0 - p;
    err += pw;
  }
  return err;
}

Eigen::VectorXcd propagate_dense(
    const std::function<Eigen::MatrixXcd(double)>& hamiltonian,
    const Eigen::VectorXcd& psi0, double t0, double t1, int steps) {
  const std::complex<double> mi(0.0, -1.0);
  Eigen::VectorXcd psi = psi0;
  const double h = (t1 - t0) / steps;
  for (int s = 0; s < steps; ++s) {
    const double t = t0 + s * h;
    const Eigen::VectorXcd k1 = mi * (hamiltonian(t) * psi);
    const Eigen::VectorXcd k2 = mi * (hamiltonian(t + 0.5 * h) * (psi + 0.5 * h * k1));
    const Eigen::VectorXcd k3 = mi * (hamiltonian(t + 0.5 * h) * (psi + 0.5 * h * k2));
    const Eigen::VectorXcd k4 = mi * (hamiltonian(t + h) * (psi + h * k3));
    psi += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return psi;
}

}  // namespace oracles
