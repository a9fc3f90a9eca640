#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "rotorsim/readout.hpp"

using namespace rotorsim;

namespace {

AtomicIonModel clean_atom() {
  // Dark counts off and threshold 1: detection itself misclassifies with
  // probability e^-20, so the protocol error budget is whatever the config
  // injects.
  AtomicIonModel atom;
  atom.detection = DetectionModel{20.0, 0.0, 1};
  return atom;
}

}  // namespace

TEST_CASE("fluorescence detection statistics") {
  DetectionModel model{20.0, 0.5, 5};
  RandomStream stream = RandomStream::root(3);

  const int n = 20000;
  double bright_sum = 0.0, dark_sum = 0.0;
  int bright_flags = 0, dark_flags = 0;
  for (int i = 0; i < n; ++i) {
    const ReadoutRound b = detection_round(true, model, stream);
    const ReadoutRound d = detection_round(false, model, stream);
    bright_sum += b.photons;
    dark_sum += d.photons;
    bright_flags += b.bright ? 1 : 0;
    dark_flags += d.bright ? 1 : 0;
    CHECK(b.bright == (b.photons >= model.threshold));
  }
  CHECK(bright_sum / n == doctest::Approx(20.0).epsilon(0.01));
  CHECK(dark_sum / n == doctest::Approx(0.5).epsilon(0.05));
  CHECK(bright_flags > n - 10);   // P(Poisson(20) < 5) ~ 1e-5
  CHECK(dark_flags < n / 100);    // P(Poisson(0.5) >= 5) ~ 2e-4

  DetectionModel permissive{20.0, 0.5, 0};
  const ReadoutRound r = detection_round(false, permissive, stream);
  CHECK(r.bright);  // threshold <= 0 classifies everything as bright
}

TEST_CASE("ideal protocol reads both basis states perfectly") {
  const MoleculeParams m = MoleculeParams::ns2_plus();
  const BasisPtr basis = readout_basis(m);
  const AtomicIonModel atom = clean_atom();
  ReadoutConfig config;
  config.repetitions = 5;

  const RotorBasis& rb = basis->rotor(0).basis;
  const int dn = rb.require_index({0, 0});
  const int up = rb.require_index({2, 0});
  const int read = rb.require_index({4, 0});

  const ReadoutResult rd =
      readout_protocol(JointState::basis_state(basis, {dn, 0, 0}), atom, config, 42);
  CHECK(rd.outcome == ReadoutOutcome::Down);
  REQUIRE(rd.rounds.size() == 5);
  for (const auto& round : rd.rounds) CHECK(round.bright);
  CHECK(rd.state.factor_population(0, dn) == doctest::Approx(1.0));

  const ReadoutResult ru =
      readout_protocol(JointState::basis_state(basis, {up, 0, 0}), atom, config, 42);
  CHECK(ru.outcome == ReadoutOutcome::Up);
  for (const auto& round : ru.rounds) CHECK(!round.bright);
  // Odd number of rounds: the alternating transfer parks the up branch in
  // the shelf state.
  CHECK(ru.state.factor_population(0, read) == doctest::Approx(1.0));
  CHECK(ru.state.norm() == doctest::Approx(1.0));
}

TEST_CASE("superposition input collapses with Born-rule statistics") {
  const MoleculeParams m = MoleculeParams::ns2_plus();
  const BasisPtr basis = readout_basis(m);
  const AtomicIonModel atom = clean_atom();
  ReadoutConfig config;
  config.repetitions = 3;

  const RotorBasis& rb = basis->rotor(0).basis;
  const int dn = rb.require_index({0, 0});
  const int up = rb.require_index({2, 0});

  JointState input(basis);
  input.amplitudes()[basis->flatten({dn, 0, 0})] = std::sqrt(0.3);
  input.amplitudes()[basis->flatten({up, 0, 0})] = std::sqrt(0.7);

  const int n = 2000;
  int ups = 0;
  for (int t = 0; t < n; ++t) {
    const ReadoutResult r = readout_protocol(input, atom, config, 1000 + t);
    CHECK(r.state.norm() == doctest::Approx(1.0));
    if (r.outcome == ReadoutOutcome::Up) {
      ++ups;
      CHECK(r.state.factor_population(0, dn) == doctest::Approx(0.0));
    } else {
      CHECK(r.state.factor_population(0, dn) == doctest::Approx(1.0));
    }
  }
  // 4 sigma band around p = 0.7
  const double sigma = std::sqrt(0.3 * 0.7 / n);
  CHECK(std::abs(double(ups) / n - 0.7) < 4.0 * sigma);
}

TEST_CASE("majority vote follows the closed-form binomial error") {
  const AtomicIonModel atom = clean_atom();
  const double p = 0.1;
  std::vector<ReadoutConfig> grid;
  for (int reps : {1, 3, 5, 9}) {
    ReadoutConfig c;
    c.repetitions = reps;
    c.classification_error = p;
    grid.push_back(c);
  }
  const long long trials = 20000;
  const auto rows = readout_fidelity_sweep(atom, grid, trials, 7);
  REQUIRE(rows.size() == grid.size());

  for (std::size_t k = 0; k < rows.size(); ++k) {
    const int reps = grid[k].repetitions;
    CHECK(rows[k].config.repetitions == reps);
    const double expect_dn = oracles::vote_error(reps, p, false);
    const double expect_up = oracles::vote_error(reps, p, true);
    const double sig_dn = std::sqrt(expect_dn * (1.0 - expect_dn) / trials);
    const double sig_up = std::sqrt(expect_up * (1.0 - expect_up) / trials);
    const double seen_dn = double(rows[k].estimate.errors_down) / trials;
    const double seen_up = double(rows[k].estimate.errors_up) / trials;
    CHECK(std::abs(seen_dn - expect_dn) < 4.0 * sig_dn);
    CHECK(std::abs(seen_up - expect_up) < 4.0 * sig_up);
  }
  // more repetitions, fewer errors
  CHECK(rows[3].estimate.fidelity > rows[0].estimate.fidelity);
}

TEST_CASE("assignment fidelity is deterministic and thread-invariant") {
  const AtomicIonModel atom = clean_atom();
  ReadoutConfig config;
  config.repetitions = 3;
  config.pulse_infidelity = 0.05;

  const auto a = readout_assignment_fidelity(atom, config, 3000, 11, MoleculeParams::ns2_plus(), 1);
  const auto b = readout_assignment_fidelity(atom, config, 3000, 11, MoleculeParams::ns2_plus(), 3);
  CHECK(a.errors_down == b.errors_down);
  CHECK(a.errors_up == b.errors_up);
  CHECK(a.fidelity == b.fidelity);

  const auto c = readout_assignment_fidelity(atom, config, 3000, 12, MoleculeParams::ns2_plus(), 1);
  CHECK((c.errors_down != a.errors_down || c.errors_up != a.errors_up));
}

TEST_CASE("Wilson interval brackets the estimate") {
  const AtomicIonModel atom = clean_atom();
  ReadoutConfig config;
  config.repetitions = 3;
  config.classification_error = 0.1;
  const auto est = readout_assignment_fidelity(atom, config, 5000, 21);
  CHECK(est.ci_low < est.fidelity);
  CHECK(est.fidelity < est.ci_high);
  CHECK(est.ci_low > 0.9);
  CHECK(est.ci_high < 1.0);

  ReadoutConfig perfect;
  perfect.repetitions = 3;
  const auto ideal = readout_assignment_fidelity(atom, perfect, 2000, 5);
  CHECK(ideal.errors_down == 0);
  CHECK(ideal.errors_up == 0);
  CHECK(ideal.fidelity == 1.0);
  CHECK(ideal.ci_high == 1.0);
  CHECK(ideal.ci_low < 1.0);  // finite trials leave residual uncertainty
}

TEST_CASE("pulse misses degrade the assignment fidelity monotonically") {
  const AtomicIonModel atom = clean_atom();
  ReadoutConfig mild;
  mild.repetitions = 5;
  mild.pulse_infidelity = 0.02;
  ReadoutConfig harsh = mild;
  harsh.pulse_infidelity = 0.2;

  const auto a = readout_assignment_fidelity(atom, mild, 4000, 31);
  const auto b = readout_assignment_fidelity(atom, harsh, 4000, 31);
  CHECK(a.fidelity > b.fidelity);
  CHECK(a.fidelity > 0.99);
  CHECK(b.fidelity < 0.999);
}
