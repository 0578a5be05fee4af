#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace qpos {

/// Counter-based random stream with splittable per-run keying.
///
/// A batch of r runs uses streams RunRng(seed, 0) .. RunRng(seed, r-1).
/// Each stream is a SplitMix64 counter generator keyed by a mix of the
/// master seed and the run index, so a run's draws do not depend on how
/// the batch is sharded across threads. Gaussian and Poisson draws are
/// generated from the uniform stream explicitly, keeping the sequence
/// identical across standard libraries.
class RunRng {
 public:
  RunRng(std::uint64_t master_seed, std::uint64_t stream)
      : state_(mix(master_seed ^ mix(stream + 0x9E3779B97F4A7C15ull))) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ull;
    return mix(state_);
  }

  /// Uniform in [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform in (0, 1]; safe as a log() argument.
  double uniform_pos() {
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  }

  bool bernoulli(double p) { return uniform() < p; }

  /// Standard normal via Box-Muller; the second variate of each pair is
  /// cached, so draws come in a fixed order within a stream.
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double radius = std::sqrt(-2.0 * std::log(uniform_pos()));
    const double angle = 2.0 * std::numbers::pi * uniform();
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

  double gaussian(double mean, double sigma) { return mean + sigma * gaussian(); }

  /// Exact Poisson sampler. Means above 16 are split into independent
  /// chunks (Poisson additivity) to keep exp(-mean) away from underflow.
  std::uint64_t poisson(double mean) {
    std::uint64_t total = 0;
    while (mean > 16.0) {
      total += poisson_knuth(16.0);
      mean -= 16.0;
    }
    return total + poisson_knuth(mean);
  }

  /// Uniform integer in [0, n); widening-multiply range reduction.
  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  std::uint64_t poisson_knuth(double lambda) {
    if (lambda <= 0.0) return 0;
    const double limit = std::exp(-lambda);
    std::uint64_t k = 0;
    double p = 1.0;
    do {
      ++k;
      p *= uniform_pos();
    } while (p > limit);
    return k - 1;
  }

  std::uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace qpos
