#include "qpos/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qpos {

namespace {

double kahan_sum(std::span<const double> values) {
  double total = 0.0, carry = 0.0;
  for (double v : values) {
    const double y = v - carry;
    const double s = total + y;
    carry = (s - total) - y;
    total = s;
  }
  return total;
}

}  // namespace

RunOutcome sample_unentangled(int channels, double eta, double dtau,
                              double true_offset, RunRng& rng) {
  RunOutcome out;
  out.survivors.resize(channels);
  double sum = 0.0;
  int kept = 0;
  for (int i = 0; i < channels; ++i) {
    const bool survives = rng.bernoulli(eta);
    out.survivors[i] = survives ? 1 : 0;
    if (survives) {
      sum += rng.gaussian(true_offset, dtau);
      ++kept;
    }
  }
  out.weight = kept;
  if (kept > 0) out.statistic = sum / kept;
  return out;
}

RunOutcome sample_entangled(int channels, int photons_per_channel, double eta,
                            double dtau, double true_offset, RunRng& rng) {
  RunOutcome out;
  out.survivors.resize(channels);
  bool intact = true;
  for (int i = 0; i < channels; ++i) {
    int kept = 0;
    for (int k = 0; k < photons_per_channel; ++k)
      if (rng.bernoulli(eta)) ++kept;
    out.survivors[i] = kept;
    intact = intact && kept == photons_per_channel;
  }
  if (intact) {
    const int total = channels * photons_per_channel;
    out.weight = total;
    out.statistic = true_offset + rng.gaussian(0.0, dtau) / total;
  }
  return out;
}

RunOutcome sample_group(int groups, int photons_per_group, double eta,
                        const GroupSpectrum& spec, double true_offset,
                        RunRng& rng) {
  const double p_group = std::pow(eta, photons_per_group);
  RunOutcome out;
  out.survivors.resize(groups);
  int intact = 0;
  for (int j = 0; j < groups; ++j) {
    const bool keep = rng.bernoulli(p_group);
    out.survivors[j] = keep ? 1 : 0;
    if (keep) ++intact;
  }
  if (intact > 0) {
    const double tau_g = group_tau(intact, groups, spec);
    const int photons = intact * photons_per_group;
    out.weight = photons;
    out.statistic = true_offset + rng.gaussian(0.0, tau_g) / photons;
  }
  return out;
}

RunOutcome sample_partial(int channels, int entangled_channels, double eta,
                          double dtau, double true_offset, RunRng& rng) {
  const int q = entangled_channels;
  RunOutcome out;
  out.survivors.resize(channels);
  bool block_intact = true;
  for (int i = 0; i < q; ++i) {
    const bool survives = rng.bernoulli(eta);
    out.survivors[i] = survives ? 1 : 0;
    block_intact = block_intact && survives;
  }
  double sum = 0.0;
  int weight = 0;
  if (block_intact) {
    // Sum of the block's arrival times: q * offset plus a width-dtau spread.
    sum += q * true_offset + rng.gaussian(0.0, dtau);
    weight += q;
  }
  for (int i = q; i < channels; ++i) {
    const bool survives = rng.bernoulli(eta);
    out.survivors[i] = survives ? 1 : 0;
    if (survives) {
      sum += rng.gaussian(true_offset, dtau);
      ++weight;
    }
  }
  out.weight = weight;
  if (weight > 0) out.statistic = sum / weight;
  return out;
}

RunOutcome sample_classical(int channels, double mean_photons, double eta,
                            double dtau, double true_offset, RunRng& rng) {
  RunOutcome out;
  out.survivors.resize(channels);
  double channel_mean_sum = 0.0;
  int occupied = 0;
  for (int i = 0; i < channels; ++i) {
    const auto n = rng.poisson(eta * mean_photons);
    out.survivors[i] = int(n);
    out.weight += int(n);
    if (n > 0) {
      double s = 0.0;
      for (std::uint64_t k = 0; k < n; ++k) s += rng.gaussian(true_offset, dtau);
      channel_mean_sum += s / double(n);
      ++occupied;
    }
  }
  if (occupied > 0) out.statistic = channel_mean_sum / occupied;
  return out;
}

RunOutcome sample_run(const StateFamily& family, double eta, double dtau,
                      double true_offset, RunRng& rng) {
  return std::visit(
      [&](const auto& f) -> RunOutcome {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Classical>) {
          return sample_classical(f.channels, f.mean_photons, eta, dtau,
                                  true_offset, rng);
        } else if constexpr (std::is_same_v<T, MaxEntangled>) {
          return sample_entangled(f.channels, f.photons_per_channel, eta, dtau,
                                  true_offset, rng);
        } else if constexpr (std::is_same_v<T, Unentangled>) {
          return sample_unentangled(f.channels, eta, dtau, true_offset, rng);
        } else if constexpr (std::is_same_v<T, PartialEntangled>) {
          return sample_partial(f.channels, f.entangled_channels, eta, dtau,
                                true_offset, rng);
        } else {
          return sample_group(f.groups, f.photons_per_group, eta, f.spectrum,
                              true_offset, rng);
        }
      },
      family);
}

Estimate estimate_values(std::vector<double> values, long long runs_total) {
  if (values.empty())
    throw std::invalid_argument("estimate: no usable runs");
  std::sort(values.begin(), values.end());

  Estimate est;
  est.runs_total = runs_total;
  est.runs_used = static_cast<long long>(values.size());
  est.mean = kahan_sum(values) / double(values.size());
  if (values.size() >= 2) {
    std::vector<double> sq(values.size());
    for (size_t i = 0; i < values.size(); ++i) {
      const double d = values[i] - est.mean;
      sq[i] = d * d;
    }
    const double var = kahan_sum(sq) / double(values.size() - 1);
    est.std_of_mean = std::sqrt(var / double(values.size()));
  }
  return est;
}

Estimate estimate(std::span<const RunOutcome> runs) {
  std::vector<double> values;
  values.reserve(runs.size());
  for (const auto& run : runs)
    if (run.statistic) values.push_back(*run.statistic);
  return estimate_values(std::move(values),
                         static_cast<long long>(runs.size()));
}

double statistic_std(std::span<const RunOutcome> runs) {
  const Estimate est = estimate(runs);
  return est.std_of_mean * std::sqrt(double(est.runs_used));
}

namespace {

void check_batch_args(const StateFamily& family, double eta, double dtau,
                      long long runs) {
  validate(family);
  if (!(eta > 0.0 && eta <= 1.0))
    throw std::invalid_argument("run_batch: eta must lie in (0, 1]");
  if (!std::holds_alternative<GroupEntangled>(family) && !(dtau > 0.0))
    throw std::invalid_argument("run_batch: dtau must be positive");
  if (runs < 1) throw std::invalid_argument("run_batch: runs must be >= 1");
}

}  // namespace

std::vector<RunOutcome> run_batch(const StateFamily& family, double eta,
                                  double dtau, double true_offset,
                                  long long runs, std::uint64_t seed) {
  check_batch_args(family, eta, dtau, runs);
  std::vector<RunOutcome> out(static_cast<size_t>(runs));
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < runs; ++i) {
    RunRng rng(seed, static_cast<std::uint64_t>(i));
    out[static_cast<size_t>(i)] = sample_run(family, eta, dtau, true_offset, rng);
  }
  return out;
}

std::vector<RunOutcome> run_batch_serial(const StateFamily& family, double eta,
                                         double dtau, double true_offset,
                                         long long runs, std::uint64_t seed) {
  check_batch_args(family, eta, dtau, runs);
  std::vector<RunOutcome> out;
  out.reserve(static_cast<size_t>(runs));
  for (long long i = 0; i < runs; ++i) {
    RunRng rng(seed, static_cast<std::uint64_t>(i));
    out.push_back(sample_run(family, eta, dtau, true_offset, rng));
  }
  return out;
}

}  // namespace qpos
