#include <doctest.h>

#include <cmath>
#include <vector>

#include "rotorsim/constants.hpp"
#include "rotorsim/decoherence.hpp"

using namespace rotorsim;

TEST_CASE("Zeeman shifts are linear with the expected scale and sign") {
  const ZeemanModel model{-0.014};
  const double unit = constants::nuclear_magneton / constants::hbar;
  // shift = -g_r mu_N M B / hbar; negative g_r makes M = +2 shift up
  CHECK(zeeman_shift({2, 2}, 1.0, model) ==
        doctest::Approx(0.014 * 2.0 * unit).epsilon(1e-12));
  CHECK(zeeman_shift({2, 2}, 1.0, model) == doctest::Approx(1.341037e6).epsilon(1e-6));
  CHECK(zeeman_shift({2, -2}, 1.0, model) ==
        doctest::Approx(-0.014 * 2.0 * unit).epsilon(1e-12));
  CHECK(zeeman_shift({2, 0}, 1.0, model) == 0.0);
  CHECK(zeeman_shift({4, 4}, 0.5, model) ==
        doctest::Approx(0.5 * zeeman_shift({4, 4}, 1.0, model)).epsilon(1e-12));
}

TEST_CASE("manifold moment of the upper qubit level") {
  const ZeemanModel model{-0.014};
  CHECK(manifold_moment(2, model) / constants::nuclear_magneton ==
        doctest::Approx(0.014 * std::sqrt(6.0)).epsilon(1e-12));
  // 0.0343 nuclear magnetons to three significant figures
  CHECK(std::abs(manifold_moment(2, model) / constants::nuclear_magneton - 0.0343) < 5e-4);
  CHECK(manifold_moment(0, model) == 0.0);
}

TEST_CASE("qubit sensitivities") {
  const ZeemanModel model{-0.014};
  const double unit = constants::nuclear_magneton / constants::hbar;
  const DephasingQubit pair = rotational_qubit({2, -2}, {2, 2}, model);
  CHECK(std::abs(pair.sensitivity) == doctest::Approx(4.0 * 0.014 * unit).epsilon(1e-12));
  CHECK(std::abs(pair.sensitivity) == doctest::Approx(2682073.2853095015).epsilon(1e-12));

  const DephasingQubit clock = rotational_qubit({0, 0}, {2, 0}, model);
  CHECK(clock.sensitivity == 0.0);

  const DephasingQubit spin = electronic_spin_qubit();
  CHECK(spin.sensitivity ==
        doctest::Approx(constants::electron_g_factor * constants::bohr_magneton /
                        constants::hbar)
            .epsilon(1e-12));
  CHECK(spin.sensitivity == doctest::Approx(176085963129.89923).epsilon(1e-12));
}

TEST_CASE("noise trajectories have stationary OU statistics") {
  const NoiseProcess process{1.0e-8, 2.0e4};
  const double dt = process.tau_c / 50.0;
  const int n = 500000;
  const std::vector<double> b =
      sample_noise_trajectory(process, dt, n, RandomStream::root(17));
  REQUIRE(b.size() == std::size_t(n + 1));

  double var = 0.0, lag = 0.0;
  for (int k = 0; k < n; ++k) {
    var += b[k] * b[k];
    lag += b[k] * b[k + 1];
  }
  var /= n;
  lag /= n;
  const double s2 = process.sigma_b * process.sigma_b;
  CHECK(var == doctest::Approx(s2).epsilon(0.1));
  CHECK(lag / var == doctest::Approx(std::exp(-dt / process.tau_c)).epsilon(2e-3));
}

TEST_CASE("quasi-static Ramsey decay matches the Gaussian closed form") {
  const DephasingQubit spin = electronic_spin_qubit();
  const NoiseProcess process{1.0e-8, 2.0e4};
  const double t2 = std::sqrt(2.0) / (spin.sensitivity * process.sigma_b);

  std::vector<double> times;
  for (int i = 1; i <= 8; ++i) times.push_back(2.0 * t2 * i / 8.0);
  const CoherenceCurve curve = ramsey_decay(spin, process, times, 3000, 9);

  for (std::size_t i = 0; i < times.size(); ++i) {
    const double expected = std::exp(-std::pow(times[i] / t2, 2));
    CHECK(std::abs(curve.coherence[i] - expected) < 0.05);
  }
  CHECK(curve.fit_ok);
  CHECK(curve.fit_model == "gaussian");
  CHECK(curve.t2 == doctest::Approx(t2).epsilon(0.05));
}

TEST_CASE("field-insensitive pair does not decay at linear order") {
  const ZeemanModel model{-0.014};
  const DephasingQubit clock = rotational_qubit({0, 0}, {2, 0}, model);
  const NoiseProcess process{1.0e-6, 2.0e4};  // even a large field does nothing
  const std::vector<double> times{0.1, 1.0, 10.0, 100.0};
  const CoherenceCurve curve = ramsey_decay(clock, process, times, 50, 4);
  for (double c : curve.coherence) CHECK(c == 1.0);
  CHECK(curve.fit_model == "none");
  CHECK(std::isinf(curve.t2));
}

TEST_CASE("doubling the field RMS halves the quasi-static T2") {
  const DephasingQubit spin = electronic_spin_qubit();
  const NoiseProcess base{1.0e-8, 2.0e4};
  const NoiseProcess loud{2.0e-8, 2.0e4};
  const double t2 = std::sqrt(2.0) / (spin.sensitivity * base.sigma_b);

  std::vector<double> times_a, times_b;
  for (int i = 1; i <= 10; ++i) {
    times_a.push_back(2.0 * t2 * i / 10.0);
    times_b.push_back(t2 * i / 10.0);
  }
  const CoherenceCurve a = ramsey_decay(spin, base, times_a, 1500, 23);
  const CoherenceCurve b = ramsey_decay(spin, loud, times_b, 1500, 23);
  REQUIRE(a.fit_ok);
  REQUIRE(b.fit_ok);
  CHECK(a.t2 / b.t2 == doctest::Approx(2.0).epsilon(0.02));
}

TEST_CASE("ramsey ensemble is deterministic and thread-invariant") {
  const DephasingQubit spin = electronic_spin_qubit();
  const NoiseProcess process{1.0e-8, 2.0e4};
  const std::vector<double> times{2.0e-4, 4.0e-4, 8.0e-4};
  const CoherenceCurve a = ramsey_decay(spin, process, times, 400, 13, 1);
  const CoherenceCurve b = ramsey_decay(spin, process, times, 400, 13, 3);
  REQUIRE(a.coherence.size() == b.coherence.size());
  for (std::size_t i = 0; i < a.coherence.size(); ++i)
    CHECK(a.coherence[i] == b.coherence[i]);
}

TEST_CASE("electronic spin versus stretched rotational pair") {
  const ZeemanModel model{-0.014};
  const DephasingQubit spin = electronic_spin_qubit();
  const DephasingQubit pair = rotational_qubit({2, -2}, {2, 2}, model);
  const NoiseProcess process{1.0e-8, 2.0e4};

  const CoherenceComparison cmp = compare_coherence(spin, pair, process, 1);

  CHECK(cmp.sensitivity_ratio ==
        doctest::Approx(std::abs(pair.sensitivity) / spin.sensitivity).epsilon(1e-12));
  CHECK(cmp.predicted_chi_ratio ==
        doctest::Approx(cmp.sensitivity_ratio * cmp.sensitivity_ratio).epsilon(1e-12));

  // Frozen Monte-Carlo outputs (seed 1, 2000 trials, 40 points).
  CHECK(cmp.a.t2 == doctest::Approx(8.002933548267869e-4).epsilon(1e-9));
  CHECK(cmp.b.t2 == doctest::Approx(52.52752206973239).epsilon(1e-9));
  CHECK(cmp.chi_ratio == doctest::Approx(2.3212643082875057e-10).epsilon(1e-9));
  CHECK(cmp.predicted_chi_ratio == doctest::Approx(2.3200204153344103e-10).epsilon(1e-9));

  // The simulated ratio agrees with the sensitivity prediction and the
  // jackknife interval brackets the point estimate.
  CHECK(std::abs(cmp.chi_ratio / cmp.predicted_chi_ratio - 1.0) < 0.1);
  CHECK(cmp.t2_ratio_ci_low <= cmp.t2_ratio);
  CHECK(cmp.t2_ratio <= cmp.t2_ratio_ci_high);
  CHECK(cmp.t2_ratio == doctest::Approx(cmp.a.t2 / cmp.b.t2).epsilon(1e-12));
}
