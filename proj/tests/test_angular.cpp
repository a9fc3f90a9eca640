#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "rotorsim/angular.hpp"
#include "rotorsim/errors.hpp"
#include "rotorsim/units.hpp"

using namespace rotorsim;

TEST_CASE("wigner3j matches the factorial-sum oracle for all j <= 6") {
  for (int j1 = 0; j1 <= 6; ++j1)
    for (int j2 = 0; j2 <= 6; ++j2)
      for (int j3 = std::abs(j1 - j2); j3 <= std::min(6, j1 + j2); ++j3)
        for (int m1 = -j1; m1 <= j1; ++m1)
          for (int m2 = -j2; m2 <= j2; ++m2) {
            const int m3 = -m1 - m2;
            if (std::abs(m3) > j3) continue;
            const double got = wigner3j(j1, j2, j3, m1, m2, m3);
            const double ref = oracles::wigner3j(j1, j2, j3, m1, m2, m3);
            CHECK(std::abs(got - ref) < 1e-12);
          }
}

TEST_CASE("wigner3j textbook values") {
  CHECK(wigner3j(1, 1, 2, 0, 0, 0) == doctest::Approx(std::sqrt(2.0 / 15.0)).epsilon(1e-14));
  CHECK(wigner3j(2, 2, 2, 0, 0, 0) == doctest::Approx(-std::sqrt(2.0 / 35.0)).epsilon(1e-14));
  CHECK(wigner3j(2, 2, 0, 1, -1, 0) == doctest::Approx(-1.0 / std::sqrt(5.0)).epsilon(1e-14));
  // Violated triangle/parity conditions are exact zeros.
  CHECK(wigner3j(1, 1, 3, 0, 0, 0) == 0.0);
  CHECK(wigner3j(1, 1, 1, 0, 0, 0) == 0.0);  // odd sum, all m = 0
  CHECK(wigner3j(2, 2, 2, 2, 2, -4) == 0.0);  // |m3| > j3
}

TEST_CASE("cos^2 matrix elements match quadrature") {
  for (int ja = 0; ja <= 6; ja += 2)
    for (int jb = 0; jb <= 6; jb += 2)
      for (int ma = -ja; ma <= ja; ++ma)
        for (int mb = -jb; mb <= jb; ++mb) {
          const double got = cos2_matrix_element({jb, mb}, {ja, ma});
          const double ref = oracles::cos2_element({jb, mb}, {ja, ma});
          CHECK(std::abs(got - ref) < 1e-10);
        }
}

TEST_CASE("cos^2 selection rules") {
  CHECK(cos2_matrix_element({0, 0}, {4, 0}) == 0.0);   // dJ = 4
  CHECK(cos2_matrix_element({2, 1}, {2, 0}) == 0.0);   // dM != 0
  CHECK(cos2_matrix_element({2, 0}, {2, 0}) != 0.0);   // dJ = 0 allowed
  CHECK(cos2_matrix_element({0, 0}, {0, 0}) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("the |0,0> <-> |2,0> element is 2/(3 sqrt 5)") {
  const double v = cos2_matrix_element({0, 0}, {2, 0});
  CHECK(v == doctest::Approx(2.0 / (3.0 * std::sqrt(5.0))).epsilon(1e-14));
  CHECK(std::abs(v - 0.29814) < 1e-4);
}

TEST_CASE("sin^2 e^{+-2i phi} elements match quadrature and are mutually adjoint") {
  for (int ja = 0; ja <= 6; ja += 2)
    for (int jb = 0; jb <= 6; jb += 2)
      for (int ma = -ja; ma <= ja; ++ma)
        for (int mb = -jb; mb <= jb; ++mb)
          for (int sign : {+1, -1}) {
            const double got = sin2_exp2iphi_matrix_element({jb, mb}, {ja, ma}, sign);
            const double ref = oracles::sin2_exp2iphi_element({jb, mb}, {ja, ma}, sign);
            CHECK(std::abs(got - ref) < 1e-10);
            // <a|T-|b> == <b|T+|a> in this (real) convention
            CHECK(got ==
                  doctest::Approx(sin2_exp2iphi_matrix_element({ja, ma}, {jb, mb}, -sign))
                      .epsilon(1e-13).scale(1.0));
          }
}

TEST_CASE("rotational energies and the qubit gap") {
  const MoleculeParams m = MoleculeParams::ns2_plus();
  CHECK(rot_energy(0, m.b0) == 0.0);
  CHECK(rot_energy(2, m.b0) == doctest::Approx(6.0 * m.b0).epsilon(1e-15));
  CHECK(rot_energy(4, m.b0) == doctest::Approx(20.0 * m.b0).epsilon(1e-15));
  CHECK(m.qubit_gap() == doctest::Approx(6.0 * m.b0).epsilon(1e-15));
  CHECK(units::rad_to_hz(m.qubit_gap()) == doctest::Approx(20.64e9).epsilon(1e-12));
}

TEST_CASE("from_conventional applies the declared unit conventions") {
  const MoleculeParams m = MoleculeParams::from_conventional("X", 1.0e9, 2.0, -0.5, 10.0);
  CHECK(m.b0 == doctest::Approx(units::hz_to_rad(1.0e9)).epsilon(1e-15));
  CHECK(m.delta_alpha ==
        doctest::Approx(units::polarizability_volume_a3_to_si(2.0)).epsilon(1e-15));
  CHECK(m.g_r == -0.5);
  CHECK(m.mass_amu == 10.0);
}

TEST_CASE("rotor bases keep the advertised sublevels in (J, M) order") {
  const RotorBasis all = RotorBasis::even_states(4, MRestriction::All);
  CHECK(all.size() == 1 + 5 + 9);
  CHECK(all.state(0) == RotState{0, 0});
  CHECK(all.state(1) == RotState{2, -2});
  CHECK(all.index_of({4, 4}) == all.size() - 1);

  const RotorBasis even = RotorBasis::even_states(4, MRestriction::EvenM);
  CHECK(even.size() == 1 + 3 + 5);
  for (const RotState& s : even.states()) CHECK(s.m % 2 == 0);

  const RotorBasis zero = RotorBasis::even_states(6, MRestriction::ZeroM);
  CHECK(zero.size() == 4);
  for (const RotState& s : zero.states()) CHECK(s.m == 0);

  CHECK(zero.shell_indices(2) == std::vector<int>{1});
  CHECK(all.shell_indices(2).size() == 5);
  CHECK(all.contains({2, -1}));
  CHECK(!zero.contains({2, -1}));
  CHECK(zero.index_of({2, -1}) == -1);
  CHECK_THROWS_AS((void)zero.require_index({2, -1}), ConfigError);
}
