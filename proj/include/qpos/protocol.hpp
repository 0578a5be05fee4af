#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "qpos/montecarlo.hpp"
#include "qpos/rng.hpp"

namespace qpos {

enum class Basis { Time, Frequency };

enum class EveStrategy { None, MeasureTime, MeasureFrequency };

struct EveConfig {
  EveStrategy strategy = EveStrategy::None;
  double fraction = 1.0;  // fraction of transiting copies intercepted
};

/// Individual arrival times of the shared-frequency state have no proper
/// marginal; they are regularized to a wide Gaussian of this many dtau so
/// that only the time sum carries position information.
inline constexpr double kWideWindowFactor = 1e4;

/// One M-photon maximally frequency-entangled resource. offsets[0] is the
/// photon Alice keeps; the offsets sum to a width-dtau deviation, each one
/// separately spread over the wide window. An intercepted-in-time copy has
/// its frequency correlation broken (tampered); an intercepted-in-frequency
/// copy keeps it but loses the time-sum correlation (time_uncorrelated).
struct EntangledCopy {
  double omega = 0.0;
  std::vector<double> offsets;
  bool tampered = false;
  bool time_uncorrelated = false;
};

EntangledCopy make_entangled_copy(int channels, double sigma_omega,
                                  double dtau, RunRng& rng);

EntangledCopy eve_intercept(EntangledCopy copy, EveStrategy strategy);

/// Probability that two independent draws from the Gaussian frequency
/// spectrum land in the same bin of the given width.
double bin_collision_probability(double sigma_omega, double freq_bin);

// ---------------------------------------------------------------------------
// Protocol one: Alice keeps one photon, Bob measures and broadcasts the
// other M-1 arrival times; only Alice can combine them into her position.
// ---------------------------------------------------------------------------

struct ProtocolOneCopy {
  long long index = 0;
  bool complete = false;
  double estimate = 0.0;          // valid when complete
  std::vector<double> bob_times;  // the broadcast record, empty if lost
};

struct ProtocolOneResult {
  std::optional<Estimate> estimate;  // pooled over complete copies
  std::vector<ProtocolOneCopy> copies;
  long long copies_total = 0;
  long long copies_used = 0;
};

ProtocolOneResult run_protocol_one(int channels, long long copies, double eta,
                                   double dtau, double true_distance,
                                   RunRng& rng);

/// Flattened view of everything Bob made public in a session.
std::vector<double> bob_broadcast_times(const ProtocolOneResult& result);

/// Estimates of the complete copies, in session order.
std::vector<double> copy_estimates(const ProtocolOneResult& result);

// ---------------------------------------------------------------------------
// Protocol two: BB84-style basis sifting with frequency checks, then
// disjoint-half broadcasts of the time data.
// ---------------------------------------------------------------------------

enum class Verdict { Clean, EavesdropperDetected, Inconclusive };

struct CopyRecord {
  long long index = 0;
  bool arrived = false;
  bool tampered = false;
  Basis alice_basis = Basis::Time;
  Basis bob_basis = Basis::Time;
  bool sifted = false;
  std::optional<long long> alice_freq_bin;
  std::optional<long long> bob_freq_bin;
  std::optional<bool> freq_match;
  std::optional<double> alice_time;
  std::optional<double> bob_time_sum;
  enum class Broadcast { None, Alice, Bob } broadcast = Broadcast::None;
};

struct ProtocolTranscript {
  std::vector<CopyRecord> copies;
  Verdict verdict = Verdict::Inconclusive;
  long long n_checked = 0;       // frequency-frequency copies compared
  double collision_prob = 0.0;   // bin collision probability c
  double predicted_detection = 0.0;  // 1 - c^n_checked under intercept-all
  std::optional<Estimate> estimate;        // pooled, both halves
  std::optional<Estimate> alice_estimate;  // Bob-broadcast half
  std::optional<Estimate> bob_estimate;    // Alice-broadcast half
};

/// copies >= 4; freq_bin > 0. Returns Inconclusive when no copy survives
/// sifting. The verdict is Clean only if every checked frequency pair
/// agrees, and the estimate(s) are present only on a Clean verdict with at
/// least one complete time-time copy.
ProtocolTranscript run_protocol_two(int channels, long long copies, double eta,
                                    double dtau, double freq_bin,
                                    const EveConfig& eve, double true_distance,
                                    RunRng& rng);

}  // namespace qpos
