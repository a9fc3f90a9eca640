#include "rotorsim/decoherence.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <thread>
#include <utility>

#include "rotorsim/constants.hpp"
#include "rotorsim/errors.hpp"
#include "rotorsim/fitting.hpp"
#include "rotorsim/parallel.hpp"

namespace rotorsim {

namespace {

void validate_process(const NoiseProcess& process) {
  if (process.sigma_b < 0.0) throw ConfigError("noise amplitude must be >= 0");
  if (!(process.tau_c > 0.0)) throw ConfigError("noise correlation time must be > 0");
}

void validate_times(const std::vector<double>& times) {
  if (times.empty()) throw ConfigError("need at least one evolution time");
  double prev = 0.0;
  for (double t : times) {
    if (t < prev) throw ConfigError("evolution times must be sorted and >= 0");
    prev = t;
  }
}

// Ensemble sums of e^{i phi} at the sample times, split into trial blocks so
// callers can jackknife.  Trials are processed in fixed chunks (chunk c ->
// block c % blocks, sequential inside a chunk, chunk sums combined in chunk
// order), which keeps the floating-point reduction identical for every
// worker count.
struct BlockSums {
  std::vector<std::vector<std::complex<double>>> sums;  // [block][time]
  std::vector<long long> counts;                        // trials per block
  long long trials = 0;

  std::vector<double> mean_magnitude(int leave_out) const {
    std::vector<std::complex<double>> total(sums[0].size(), {0.0, 0.0});
    long long n = 0;
    for (std::size_t k = 0; k < sums.size(); ++k) {
      if (static_cast<int>(k) == leave_out) continue;
      for (std::size_t i = 0; i < total.size(); ++i) total[i] += sums[k][i];
      n += counts[k];
    }
    std::vector<double> mag(total.size(), 1.0);
    for (std::size_t i = 0; i < total.size(); ++i) {
      mag[i] = std::abs(total[i]) / static_cast<double>(n);
    }
    return mag;
  }
};

BlockSums phase_ensemble(const DephasingQubit& qubit, const NoiseProcess& process,
                         const std::vector<double>& times, long long trials,
                         std::uint64_t seed, unsigned threads, int blocks) {
  validate_process(process);
  validate_times(times);
  if (trials < 1) throw ConfigError("need at least one trajectory");

  const double t_max = times.back();
  const double dt_max =
      t_max > 0.0 ? std::min(process.tau_c / 50.0, t_max / 1000.0)
                  : process.tau_c;
  const double sens = qubit.sensitivity;
  const double sigma = process.sigma_b;
  const RandomStream root = RandomStream::root(seed);

  const int chunk_count = static_cast<int>(
      std::max<long long>(blocks, std::min<long long>(trials, 8LL * blocks)));
  const long long chunk_len = (trials + chunk_count - 1) / chunk_count;

  std::vector<std::vector<std::complex<double>>> chunk_sums(
      chunk_count, std::vector<std::complex<double>>(times.size(), {0.0, 0.0}));
  std::vector<long long> chunk_trials(chunk_count, 0);

  unsigned workers = threads > 0 ? threads : std::thread::hardware_concurrency();
  if (workers == 0) workers = 1;
  parallel_for(chunk_count, workers, [&](std::size_t c) {
    const long long first = static_cast<long long>(c) * chunk_len;
    const long long last = std::min(trials, first + chunk_len);
    auto& acc = chunk_sums[c];
    for (long long t = first; t < last; ++t) {
      RandomStream stream = root.derive(static_cast<std::uint64_t>(t));
      double field = sigma * stream.next_normal();
      double t_cur = 0.0;
      double phi = 0.0;
      for (std::size_t i = 0; i < times.size(); ++i) {
        const double span = times[i] - t_cur;
        if (span > 0.0) {
          const int steps = std::max(1, static_cast<int>(std::ceil(span / dt_max)));
          const double h = span / steps;
          const double r = std::exp(-h / process.tau_c);
          const double kick = sigma * std::sqrt(1.0 - r * r);
          for (int k = 0; k < steps; ++k) {
            const double next = r * field + kick * stream.next_normal();
            phi += 0.5 * (field + next) * h * sens;
            field = next;
          }
          t_cur = times[i];
        }
        acc[i] += std::complex<double>(std::cos(phi), std::sin(phi));
      }
      ++chunk_trials[c];
    }
  });

  BlockSums out;
  out.trials = trials;
  out.sums.assign(blocks, std::vector<std::complex<double>>(times.size(), {0.0, 0.0}));
  out.counts.assign(blocks, 0);
  for (int c = 0; c < chunk_count; ++c) {
    const int k = c % blocks;
    for (std::size_t i = 0; i < times.size(); ++i) out.sums[k][i] += chunk_sums[c][i];
    out.counts[k] += chunk_trials[c];
  }
  return out;
}

// Fits T2 to the curve, preferring whichever of the Gaussian and exponential
// shapes leaves the smaller residual.  Points below the Monte-Carlo noise
// floor are excluded; a curve that never drops 1% is reported as "none".
void fit_curve(CoherenceCurve& curve, long long trials) {
  curve.t2 = std::numeric_limits<double>::infinity();
  curve.fit_model = "none";
  curve.fit_rms = 0.0;
  curve.fit_ok = false;

  const double floor =
      std::max(1.0e-3, 3.0 / std::sqrt(static_cast<double>(trials)));
  std::vector<double> t, y;
  double y_min = 1.0;
  for (std::size_t i = 0; i < curve.times.size(); ++i) {
    y_min = std::min(y_min, curve.coherence[i]);
    if (curve.times[i] > 0.0 && curve.coherence[i] > floor) {
      t.push_back(curve.times[i]);
      y.push_back(curve.coherence[i]);
    }
  }
  if (y_min > 0.99 || t.size() < 3) return;

  const DecayFit gauss = fit_gaussian_decay(t, y);
  const DecayFit expo = fit_exponential_decay(t, y);
  const bool use_gauss = gauss.rms_residual <= expo.rms_residual;
  const DecayFit& best = use_gauss ? gauss : expo;
  if (!(best.time_constant > 0.0) || !std::isfinite(best.time_constant)) return;
  curve.t2 = best.time_constant;
  curve.fit_model = use_gauss ? "gaussian" : "exponential";
  curve.fit_rms = best.rms_residual;
  curve.fit_ok = true;
}

CoherenceCurve curve_from(const std::vector<double>& times, const BlockSums& sums,
                          int leave_out, long long trials) {
  CoherenceCurve curve;
  curve.times = times;
  curve.coherence = sums.mean_magnitude(leave_out);
  fit_curve(curve, trials);
  return curve;
}

}  // namespace

double zeeman_shift(const RotState& state, double b_field, const ZeemanModel& model) {
  return -model.g_r * constants::nuclear_magneton * static_cast<double>(state.m) *
         b_field / constants::hbar;
}

double manifold_moment(int j, const ZeemanModel& model) {
  if (j < 0) throw ConfigError("negative angular momentum");
  return std::abs(model.g_r) * constants::nuclear_magneton *
         std::sqrt(static_cast<double>(j) * (j + 1.0));
}

DephasingQubit rotational_qubit(const RotState& lower, const RotState& upper,
                                const ZeemanModel& model) {
  DephasingQubit q;
  q.label = "rot(" + std::to_string(lower.j) + "," + std::to_string(lower.m) + ")/(" +
            std::to_string(upper.j) + "," + std::to_string(upper.m) + ")";
  q.sensitivity = zeeman_shift(upper, 1.0, model) - zeeman_shift(lower, 1.0, model);
  return q;
}

DephasingQubit electronic_spin_qubit() {
  DephasingQubit q;
  q.label = "electron spin";
  q.sensitivity =
      constants::electron_g_factor * constants::bohr_magneton / constants::hbar;
  return q;
}

std::vector<double> sample_noise_trajectory(const NoiseProcess& process, double dt,
                                            int n_steps, RandomStream stream) {
  validate_process(process);
  if (!(dt > 0.0)) throw ConfigError("trajectory step must be > 0");
  if (n_steps < 0) throw ConfigError("negative step count");
  const double r = std::exp(-dt / process.tau_c);
  const double kick = process.sigma_b * std::sqrt(1.0 - r * r);
  std::vector<double> field(static_cast<std::size_t>(n_steps) + 1);
  field[0] = process.sigma_b * stream.next_normal();
  for (int k = 0; k < n_steps; ++k) {
    field[k + 1] = r * field[k] + kick * stream.next_normal();
  }
  return field;
}

CoherenceCurve ramsey_decay(const DephasingQubit& qubit, const NoiseProcess& process,
                            const std::vector<double>& times, long long trials,
                            std::uint64_t seed, unsigned threads) {
  const BlockSums sums = phase_ensemble(qubit, process, times, trials, seed, threads, 1);
  return curve_from(times, sums, -1, trials);
}

CoherenceComparison compare_coherence(const DephasingQubit& a, const DephasingQubit& b,
                                      const NoiseProcess& process, std::uint64_t seed,
                                      const CompareOptions& options) {
  validate_process(process);
  if (a.sensitivity == 0.0 || b.sensitivity == 0.0) {
    throw ConfigError("coherence comparison needs field-sensitive qubits");
  }
  if (options.points < 4) throw ConfigError("need at least four curve points");
  if (!(process.sigma_b > 0.0)) throw ConfigError("comparison needs nonzero noise");

  constexpr int kBlocks = 10;
  const RandomStream root = RandomStream::root(seed);

  const double t2a_pred = std::sqrt(2.0) / (std::abs(a.sensitivity) * process.sigma_b);
  const double t2b_pred = std::sqrt(2.0) / (std::abs(b.sensitivity) * process.sigma_b);
  std::vector<double> times_a(options.points), times_b(options.points);
  for (int i = 0; i < options.points; ++i) {
    times_a[i] = options.window_t2_factor * t2a_pred * (i + 1) / options.points;
    times_b[i] = options.window_t2_factor * t2b_pred * (i + 1) / options.points;
  }
  const BlockSums sums_a = phase_ensemble(a, process, times_a, options.trials,
                                          root.derive(0).next_u64(), options.threads,
                                          kBlocks);
  const BlockSums sums_b = phase_ensemble(b, process, times_b, options.trials,
                                          root.derive(1).next_u64(), options.threads,
                                          kBlocks);

  CoherenceComparison cmp;
  cmp.a = curve_from(times_a, sums_a, -1, options.trials);
  cmp.b = curve_from(times_b, sums_b, -1, options.trials);
  cmp.sensitivity_ratio = std::abs(b.sensitivity / a.sensitivity);
  cmp.predicted_chi_ratio = cmp.sensitivity_ratio * cmp.sensitivity_ratio;

  const double nan = std::numeric_limits<double>::quiet_NaN();
  cmp.t2_ratio = nan;
  cmp.t2_ratio_ci_low = nan;
  cmp.t2_ratio_ci_high = nan;
  cmp.chi_ratio = nan;
  if (!cmp.a.fit_ok || !cmp.b.fit_ok) return cmp;

  cmp.t2_ratio = cmp.a.t2 / cmp.b.t2;
  cmp.chi_ratio = cmp.t2_ratio * cmp.t2_ratio;

  // Jackknife over trial blocks for the ratio's sampling error.
  std::vector<double> ratios;
  ratios.reserve(kBlocks);
  for (int k = 0; k < kBlocks; ++k) {
    const long long n_left = options.trials - sums_a.counts[k];
    CoherenceCurve ca = curve_from(times_a, sums_a, k, n_left);
    CoherenceCurve cb = curve_from(times_b, sums_b, k, n_left);
    if (ca.fit_ok && cb.fit_ok) ratios.push_back(ca.t2 / cb.t2);
  }
  if (ratios.size() >= 2) {
    double mean = 0.0;
    for (double r : ratios) mean += r;
    mean /= static_cast<double>(ratios.size());
    double var = 0.0;
    for (double r : ratios) var += (r - mean) * (r - mean);
    const double k = static_cast<double>(ratios.size());
    const double se = std::sqrt((k - 1.0) / k * var);
    cmp.t2_ratio_ci_low = cmp.t2_ratio - 1.959963984540054 * se;
    cmp.t2_ratio_ci_high = cmp.t2_ratio + 1.959963984540054 * se;
  }
  return cmp;
}

}  // namespace rotorsim
