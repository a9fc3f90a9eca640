#pragma once

#include <cmath>
#include <cstdint>

namespace rotorsim {

// Counter-based random stream (SplitMix64 output function applied to
// key + counter * golden gamma).  Streams derived from the same seed and
// index list are identical regardless of how work is split across threads,
// which is what makes Monte-Carlo runs reproducible for any --threads value.
//
// Each trial of a Monte-Carlo loop should use root(seed).derive(trial_index).
class RandomStream {
 public:
  RandomStream() : key_(0), counter_(0) {}

  static RandomStream root(std::uint64_t seed) { return RandomStream(mix(seed ^ 0x5851f42d4c957f2dULL)); }

  // Independent child stream; derive(i) != derive(j) for i != j.
  RandomStream derive(std::uint64_t index) const {
    return RandomStream(mix(key_ ^ mix(index + 0x9e3779b97f4a7c15ULL)));
  }

  std::uint64_t next_u64() { return mix(key_ + ++counter_ * 0x9e3779b97f4a7c15ULL); }

  // Uniform in [0, 1) with 53-bit resolution.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Standard normal, Box-Muller (deterministic across platforms, unlike
  // std::normal_distribution).
  double next_normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    do {
      u1 = next_double();
    } while (u1 <= 0.0);
    const double u2 = next_double();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  // Exact Poisson sampling (Knuth product method); fine for the photon-count
  // means used here (< ~50).
  int next_poisson(double mean) {
    if (mean <= 0.0) return 0;
    const double limit = std::exp(-mean);
    double prod = 1.0;
    int k = -1;
    do {
      ++k;
      prod *= next_double();
    } while (prod > limit);
    return k;
  }

 private:
  explicit RandomStream(std::uint64_t key) : key_(key), counter_(0) {}

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
  std::uint64_t counter_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace rotorsim
