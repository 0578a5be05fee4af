#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "qpos/rng.hpp"
#include "qpos/states.hpp"

namespace qpos {

/// One experimental run: which photons (or groups) survived, and the
/// value of the sufficient timing statistic when the run is usable.
/// weight counts the photons contributing to the statistic.
struct RunOutcome {
  std::vector<int> survivors;
  std::optional<double> statistic;
  int weight = 0;
};

RunOutcome sample_unentangled(int channels, double eta, double dtau,
                              double true_offset, RunRng& rng);

/// Only the sufficient statistic is sampled: the joint arrival density of
/// the maximally entangled photons depends solely on the time sum, so
/// individual times have no proper marginal to draw from.
RunOutcome sample_entangled(int channels, int photons_per_channel, double eta,
                            double dtau, double true_offset, RunRng& rng);

RunOutcome sample_group(int groups, int photons_per_group, double eta,
                        const GroupSpectrum& spec, double true_offset,
                        RunRng& rng);

/// Entangled block survives as a whole or is discarded; surviving
/// unentangled times are retained. The statistic averages all retained
/// arrival times with equal weight, which reproduces the closed-form
/// eta = 1 accuracy for every Q.
RunOutcome sample_partial(int channels, int entangled_channels, double eta,
                          double dtau, double true_offset, RunRng& rng);

RunOutcome sample_classical(int channels, double mean_photons, double eta,
                            double dtau, double true_offset, RunRng& rng);

/// Dispatch on the family descriptor. dtau is ignored for GroupEntangled.
RunOutcome sample_run(const StateFamily& family, double eta, double dtau,
                      double true_offset, RunRng& rng);

struct Estimate {
  double mean = 0.0;
  double std_of_mean = 0.0;  // 0 when fewer than 2 usable runs
  long long runs_used = 0;
  long long runs_total = 0;
};

/// Mean of the usable statistics with its standard error. The reduction
/// sorts values first, so the result is independent of run order and of
/// how a batch was sharded.
Estimate estimate(std::span<const RunOutcome> runs);

/// Same reduction over raw statistic values.
Estimate estimate_values(std::vector<double> values, long long runs_total);

/// Sample std of the usable statistics (the per-run accuracy the analytic
/// formulas predict).
double statistic_std(std::span<const RunOutcome> runs);

/// Batch of independent runs on per-run derived streams; parallelized
/// with OpenMP. Bit-identical to run_batch_serial for any thread count.
std::vector<RunOutcome> run_batch(const StateFamily& family, double eta,
                                  double dtau, double true_offset,
                                  long long runs, std::uint64_t seed);

/// Plain-loop reference implementation kept for testing and benchmarks.
std::vector<RunOutcome> run_batch_serial(const StateFamily& family, double eta,
                                         double dtau, double true_offset,
                                         long long runs, std::uint64_t seed);

}  // namespace qpos
