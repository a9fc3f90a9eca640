#include <benchmark/benchmark.h>

#include "rotorsim/angular.hpp"
#include "rotorsim/decoherence.hpp"
#include "rotorsim/dynamics.hpp"
#include "rotorsim/readout.hpp"
#include "rotorsim/units.hpp"

using namespace rotorsim;

namespace {

void bm_cos2_matrix(benchmark::State& state) {
  const int j_max = static_cast<int>(state.range(0));
  const RotorBasis basis = RotorBasis::even_states(j_max, MRestriction::All);
  for (auto _ : state) {
    double acc = 0.0;
    for (const RotState& a : basis.states())
      for (const RotState& b : basis.states()) acc += cos2_matrix_element(a, b);
    benchmark::DoNotOptimize(acc);
  }
  state.SetItemsProcessed(state.iterations() * basis.size() * basis.size());
}
BENCHMARK(bm_cos2_matrix)->Arg(4)->Arg(8);

void bm_rabi_flop(benchmark::State& state) {
  RabiScenario sc;
  sc.molecule = MoleculeParams::from_conventional("test", 5.0e7, 8.47, -0.014, 77.95);
  sc.j_max = 4;
  sc.restriction = MRestriction::ZeroM;
  sc.rwa_cutoff = units::hz_to_rad(1.0e8);
  sc.samples = 16;
  long long steps = 0;
  for (auto _ : state) {
    const RabiResult r = simulate_rabi_flopping(sc);
    steps += r.stats.total_steps;
    benchmark::DoNotOptimize(r.fitted_rabi);
  }
  state.SetItemsProcessed(steps);
}
BENCHMARK(bm_rabi_flop)->Unit(benchmark::kMillisecond);

void bm_readout_trials(benchmark::State& state) {
  AtomicIonModel atom;
  atom.detection = DetectionModel{20.0, 0.5, 5};
  ReadoutConfig config;
  config.repetitions = 9;
  config.pulse_infidelity = 0.01;
  const long long trials = state.range(0);
  std::uint64_t seed = 1;
  for (auto _ : state) {
    const AssignmentEstimate est =
        readout_assignment_fidelity(atom, config, trials, seed++);
    benchmark::DoNotOptimize(est.fidelity);
  }
  state.SetItemsProcessed(state.iterations() * 2 * trials);
}
BENCHMARK(bm_readout_trials)->Arg(500)->Unit(benchmark::kMillisecond);

void bm_noise_trajectory(benchmark::State& state) {
  const NoiseProcess process{1.0e-8, 2.0e4};
  const int n = static_cast<int>(state.range(0));
  std::uint64_t seed = 1;
  for (auto _ : state) {
    const auto traj =
        sample_noise_trajectory(process, process.tau_c / 50.0, n, RandomStream::root(seed++));
    benchmark::DoNotOptimize(traj.back());
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(bm_noise_trajectory)->Arg(100000);

}  // namespace

BENCHMARK_MAIN();
