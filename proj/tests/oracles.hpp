#pragma once

// Independent reference implementations used to cross-check the library.
// Everything here is built from first principles (quadrature, factorial
// sums, dense integrators) and shares no code with core/.

#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "rotorsim/angular.hpp"

namespace oracles {

// <bra| cos^2(theta) |ket> by Gauss-Legendre quadrature over spherical
// harmonics (std::sph_legendre).
double cos2_element(const rotorsim::RotState& bra, const rotorsim::RotState& ket);

// <bra| sin^2(theta) e^{i 2 sign phi} |ket> by quadrature.
double sin2_exp2iphi_element(const rotorsim::RotState& bra, const rotorsim::RotState& ket,
                             int sign);

// Wigner 3-j by the Racah sum over double-precision factorials.
double wigner3j(int j1, int j2, int j3, int m1, int m2, int m3);

// Strict-majority misclassification probability: `reps` rounds, each
// independently wrong with probability p, vote decided by 2 * dark > reps
// (ties count as "down").
double vote_error(int reps, double p, bool input_up);

// Dense fixed-step RK4 for psi' = -i H(t) psi.
Eigen::VectorXcd propagate_dense(
    const std::function<Eigen::MatrixXcd(double)>& hamiltonian,
    const Eigen::VectorXcd& psi0, double t0, double t1, int steps);

}  // namespace oracles
