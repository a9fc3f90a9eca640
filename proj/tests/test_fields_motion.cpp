#include <doctest.h>

#include <cmath>

#include "rotorsim/constants.hpp"
#include "rotorsim/dynamics.hpp"
#include "rotorsim/fields.hpp"
#include "rotorsim/motion.hpp"
#include "rotorsim/units.hpp"

using namespace rotorsim;

TEST_CASE("intensity to squared field follows I = eps0 c E0^2 / 2") {
  const double i_w_cm2 = 2.5e6;
  const double e0sq = intensity_to_e0sq(i_w_cm2);
  const double back =
      e0sq * constants::epsilon0 * constants::speed_of_light / 2.0 / 1.0e4;
  CHECK(back == doctest::Approx(i_w_cm2).epsilon(1e-14));
}

TEST_CASE("effective coupling amplitude is dalpha E0^2 / (8 hbar)") {
  const MoleculeParams m = MoleculeParams::ns2_plus();
  SynthesizedDrive d = synthesize_linear_pair(1.0e12, units::hz_to_rad(1.0e9), 0.3, 0.0);
  const EffectiveCoupling c = effective_coupling(m, d);
  CHECK(c.amplitude ==
        doctest::Approx(m.delta_alpha * 1.0e12 / (8.0 * constants::hbar)).epsilon(1e-14));
  CHECK(c.beat == d.beat);
  CHECK(c.phase2 == doctest::Approx(0.6).epsilon(1e-14));
  CHECK(c.kind == DriveKind::LinearPair);
}

TEST_CASE("carrier averaging reproduces the slow envelope of the exact field") {
  SynthesizedDrive d = synthesize_linear_pair(4.0, units::hz_to_rad(2.0e6), 0.1, 0.0);
  const double carrier = units::hz_to_rad(3.0e14);
  // Average the exact squared field over one optical cycle and compare.
  for (double t : {0.0, 1.3e-7, 4.9e-7}) {
    const int n = 2000;
    const double cycle = constants::two_pi / carrier;
    double avg = 0.0;
    for (int i = 0; i < n; ++i)
      avg += linear_pair_e_sq_exact(d, carrier, t + cycle * i / n);
    avg /= n;
    CHECK(avg == doctest::Approx(linear_pair_e_sq_averaged(d, t)).epsilon(1e-6));
  }
}

TEST_CASE("pulse windows gate the averaged field") {
  SynthesizedDrive d = synthesize_linear_pair(4.0, units::hz_to_rad(2.0e6), 0.0, 0.0,
                                              Geometry::CoPropagating, {1.0e-6, 2.0e-6});
  CHECK(linear_pair_e_sq_averaged(d, 0.5e-6) == 0.0);
  CHECK(linear_pair_e_sq_averaged(d, 1.5e-6) > 0.0);
  CHECK(linear_pair_e_sq_averaged(d, 3.5e-6) == 0.0);
  CHECK(d.window.contains(1.0e-6));
  CHECK(!d.window.contains(3.0e-6));
}

TEST_CASE("transition Rabi frequency reaches 1 MHz at 2.5e6 W/cm^2") {
  const MoleculeParams m = MoleculeParams::ns2_plus();
  const double e0sq = intensity_to_e0sq(2.5e6);
  const double rabi = transition_rabi(m, DriveKind::LinearPair, e0sq, {0, 0}, {2, 0});
  CHECK(std::abs(units::rad_to_hz(std::abs(rabi)) / 1.0e6 - 1.0) < 0.1);
  // and e0sq_for_rabi inverts it
  CHECK(e0sq_for_rabi(m, DriveKind::LinearPair, rabi, {0, 0}, {2, 0}) ==
        doctest::Approx(e0sq).epsilon(1e-12));
}

TEST_CASE("static light shifts move levels and shifted_gap accounts for them") {
  const MoleculeParams m = MoleculeParams::ns2_plus();
  SynthesizedDrive d = synthesize_linear_pair(intensity_to_e0sq(2.5e6),
                                              units::hz_to_rad(20.64e9), 0.0, 0.0);
  const double s00 = static_stark_shift(m, d, {0, 0});
  const double s20 = static_stark_shift(m, d, {2, 0});
  CHECK(s00 == 0.0);  // |0,0> is isotropic: <cos^2> = 1/3 exactly
  CHECK(s20 != 0.0);
  const double gap = shifted_gap(m, {0, 0}, {2, 0}, {d});
  CHECK(gap == doctest::Approx(m.qubit_gap() + s20 - s00).epsilon(1e-12));

  SynthesizedDrive off = d;
  off.drop_static_term = true;
  CHECK(static_stark_shift(m, off, {0, 0}) == 0.0);
}

TEST_CASE("corrected beat hits the shifted resonance self-consistently") {
  const MoleculeParams m = MoleculeParams::ns2_plus();
  const double e0sq = intensity_to_e0sq(2.5e6);
  const double beat =
      corrected_beat(m, DriveKind::LinearPair, e0sq, {0, 0}, {2, 0}, 0, 0.0, 6);
  // The correction is small but nonzero, and of the light-shift scale.
  const double shift = beat - m.qubit_gap();
  CHECK(shift != 0.0);
  CHECK(std::abs(shift) < 0.01 * m.qubit_gap());
  // Self-consistency: re-evaluating the shifts at the corrected beat lands on
  // the same value (the fixed point has converged).
  SynthesizedDrive d = synthesize_linear_pair(e0sq, beat, 0.0, 0.0);
  const std::pair<RotState, RotState> pr{RotState{0, 0}, RotState{2, 0}};
  const double s1 = total_level_shift(m, d, {2, 0}, 6, pr) -
                    total_level_shift(m, d, {0, 0}, 6, pr);
  CHECK(std::abs(beat - m.qubit_gap() - s1) < 1e-3 * std::abs(s1));
}

TEST_CASE("Lamb-Dicke parameter and sideband scaling") {
  // eta = k sqrt(hbar / (2 m nu))
  const double nu = units::hz_to_rad(1.0e6);
  const double k = 2.0 * constants::two_pi / 1.064e-6;  // counter-propagating pair
  const double eta = lamb_dicke(k, 77.95, nu);
  const double amu = 1.66053906660e-27;
  CHECK(eta ==
        doctest::Approx(k * std::sqrt(constants::hbar / (2.0 * 77.95 * amu * nu)))
            .epsilon(1e-9));
  CHECK(sideband_rabi(units::hz_to_rad(1.0e4), 0.1, 0) ==
        doctest::Approx(units::hz_to_rad(1.0e3)).epsilon(1e-14));
  CHECK(sideband_rabi(units::hz_to_rad(1.0e4), 0.1, 3) ==
        doctest::Approx(units::hz_to_rad(2.0e3)).epsilon(1e-14));
}

TEST_CASE("thermal weights are normalized geometric distributions") {
  const std::vector<double> w = thermal_weights(0.5, 20);
  double sum = 0.0;
  for (double v : w) sum += v;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  // p_{n+1} / p_n = nbar / (1 + nbar)
  for (std::size_t n = 0; n + 1 < w.size(); ++n)
    CHECK(w[n + 1] / w[n] == doctest::Approx(0.5 / 1.5).epsilon(1e-12));

  const std::vector<double> w0 = thermal_weights(0.0, 5);
  CHECK(w0[0] == doctest::Approx(1.0));
  CHECK(w0[3] == doctest::Approx(0.0));

  // cutoff: discarded tail below tolerance, previous cutoff above it
  const int cut = thermal_cutoff(2.0, 1e-4);
  const double r = 2.0 / 3.0;
  CHECK(std::pow(r, cut + 1) <= 1e-4);
  CHECK(std::pow(r, cut) > 1e-4);
  CHECK(thermal_cutoff(0.0, 1e-4) == 0);
}

TEST_CASE("ladder operators satisfy the truncated commutator") {
  const int n_max = 6;
  const Eigen::MatrixXcd a = lowering_operator(n_max);
  const Eigen::MatrixXcd ad = raising_operator(n_max);
  CHECK((ad - a.adjoint()).norm() < 1e-14);
  const Eigen::MatrixXcd comm = a * ad - ad * a;
  for (int n = 0; n < n_max; ++n) CHECK(std::abs(comm(n, n) - 1.0) < 1e-13);
  // a |n> = sqrt(n) |n-1>
  for (int n = 1; n <= n_max; ++n)
    CHECK(std::abs(a(n - 1, n) - std::sqrt(double(n))) < 1e-14);
}
