#pragma once

// Test-only oracles and statistics helpers. Everything here is independent
// of the implementation paths it is used to check: quadrature instead of
// closed forms, explicit loss-pattern enumeration instead of binomial sums.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "qpos/rng.hpp"

namespace support {

inline double simpson(const std::function<double(double)>& f, double a,
                      double b, int panels) {
  if (panels % 2 != 0) ++panels;
  const double h = (b - a) / panels;
  double total = f(a) + f(b);
  for (int i = 1; i < panels; ++i)
    total += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return total * h / 3.0;
}

inline double mean(std::span<const double> xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s / double(xs.size());
}

inline double sample_std(std::span<const double> xs) {
  const double m = mean(xs);
  double sq = 0.0;
  for (double x : xs) sq += (x - m) * (x - m);
  return std::sqrt(sq / double(xs.size() - 1));
}

/// Bootstrap standard error of the sample std itself.
inline double bootstrap_std_error_of_std(std::span<const double> xs,
                                         int resamples, std::uint64_t seed) {
  qpos::RunRng rng(seed, 0xB00Tull);
  std::vector<double> stds(resamples);
  std::vector<double> draw(xs.size());
  for (int b = 0; b < resamples; ++b) {
    for (size_t i = 0; i < xs.size(); ++i) draw[i] = xs[rng.below(xs.size())];
    stds[b] = sample_std(draw);
  }
  return sample_std(stds);
}

/// Two-sample Kolmogorov-Smirnov statistic.
inline double ks_statistic(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  size_t i = 0, j = 0;
  double worst = 0.0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j]) ++i;
    else ++j;
    worst = std::max(worst, std::abs(double(i) / a.size() -
                                     double(j) / b.size()));
  }
  return worst;
}

/// Rejection threshold at alpha = 0.01.
inline double ks_threshold_alpha01(size_t n, size_t m) {
  const double c = std::sqrt(-0.5 * std::log(0.005));
  return c * std::sqrt(double(n + m) / (double(n) * double(m)));
}

/// Per-usable-run variance of the mean of surviving unentangled photon
/// times (unit dtau), by brute-force enumeration of all 2^M loss patterns.
inline double enumerate_unentangled_variance(int photons, double eta) {
  if (photons > 20) throw std::invalid_argument("enumeration oracle: too big");
  double var = 0.0, usable = 0.0;
  for (unsigned pattern = 1; pattern < (1u << photons); ++pattern) {
    const int m = __builtin_popcount(pattern);
    const double prob =
        std::pow(eta, m) * std::pow(1.0 - eta, photons - m);
    usable += prob;
    var += prob / m;
  }
  return var / usable;
}

/// Same enumeration for the partially entangled family with the
/// retained-photon-average estimator: the first Q photons form the block,
/// whose times count only if all Q survive.
inline double enumerate_partial_variance(int photons, int block, double eta) {
  if (photons > 20) throw std::invalid_argument("enumeration oracle: too big");
  double var = 0.0, usable = 0.0;
  for (unsigned pattern = 0; pattern < (1u << photons); ++pattern) {
    const int survivors = __builtin_popcount(pattern);
    const double prob =
        std::pow(eta, survivors) * std::pow(1.0 - eta, photons - survivors);
    const unsigned block_mask = (1u << block) - 1;
    const bool block_intact = (pattern & block_mask) == block_mask;
    const int loose = __builtin_popcount(pattern >> block);
    if (block_intact) {
      // block sum has variance 1, each loose time variance 1
      const int weight = block + loose;
      var += prob * (1.0 + loose) / (double(weight) * weight);
      usable += prob;
    } else if (loose > 0) {
      var += prob / loose;
      usable += prob;
    }
  }
  return var / usable;
}

}  // namespace support
