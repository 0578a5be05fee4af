#include "qpos/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qpos {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

bool all_photons_arrive(int channels, double eta, RunRng& rng) {
  bool arrived = true;
  for (int i = 0; i < channels; ++i) arrived = rng.bernoulli(eta) && arrived;
  return arrived;
}

}  // namespace

EntangledCopy make_entangled_copy(int channels, double sigma_omega,
                                  double dtau, RunRng& rng) {
  require(channels >= 2, "entangled copy: needs at least 2 channels");
  require(sigma_omega > 0.0 && dtau > 0.0,
          "entangled copy: sigma_omega and dtau must be positive");
  EntangledCopy copy;
  copy.omega = rng.gaussian(0.0, sigma_omega);
  copy.offsets.resize(channels);
  const double window = kWideWindowFactor * dtau;
  double transit_sum = 0.0;
  for (int i = 1; i < channels; ++i) {
    copy.offsets[i] = rng.gaussian(0.0, window);
    transit_sum += copy.offsets[i];
  }
  // Alice's photon absorbs the sum constraint: the total deviation of all
  // M arrival times is sharp at width dtau.
  copy.offsets[0] = rng.gaussian(0.0, dtau) - transit_sum;
  return copy;
}

EntangledCopy eve_intercept(EntangledCopy copy, EveStrategy strategy) {
  switch (strategy) {
    case EveStrategy::None:
      break;
    case EveStrategy::MeasureTime:
      copy.tampered = true;  // frequency correlation destroyed
      break;
    case EveStrategy::MeasureFrequency:
      copy.time_uncorrelated = true;  // time sum destroyed, frequency kept
      break;
  }
  return copy;
}

double bin_collision_probability(double sigma_omega, double freq_bin) {
  require(sigma_omega > 0.0 && freq_bin > 0.0,
          "bin collision: widths must be positive");
  const long long reach =
      static_cast<long long>(std::ceil(10.0 * sigma_omega / freq_bin)) + 1;
  double c = 0.0;
  for (long long k = -reach; k < reach; ++k) {
    const double lo = k * freq_bin / sigma_omega;
    const double hi = (k + 1) * freq_bin / sigma_omega;
    const double p = normal_cdf(hi) - normal_cdf(lo);
    c += p * p;
  }
  return c;
}

ProtocolOneResult run_protocol_one(int channels, long long copies, double eta,
                                   double dtau, double true_distance,
                                   RunRng& rng) {
  require(channels >= 2, "protocol one: needs at least 2 channels");
  require(copies >= 1, "protocol one: needs at least 1 copy");
  require(eta > 0.0 && eta <= 1.0, "protocol one: eta must lie in (0, 1]");
  require(dtau > 0.0, "protocol one: dtau must be positive");

  const double sigma_omega = 1.0 / (2.0 * dtau);
  ProtocolOneResult result;
  result.copies_total = copies;
  result.copies.reserve(static_cast<size_t>(copies));
  for (long long i = 0; i < copies; ++i) {
    ProtocolOneCopy rec;
    rec.index = i;
    rec.complete = all_photons_arrive(channels, eta, rng);
    if (rec.complete) {
      const EntangledCopy copy =
          make_entangled_copy(channels, sigma_omega, dtau, rng);
      const double alice_time = copy.offsets[0];
      double bob_sum = 0.0;
      for (int ch = 1; ch < channels; ++ch) {
        const double t = copy.offsets[ch] + true_distance;
        rec.bob_times.push_back(t);
        bob_sum += t;
      }
      rec.estimate = (alice_time + bob_sum) / (channels - 1);
      ++result.copies_used;
    }
    result.copies.push_back(std::move(rec));
  }
  if (result.copies_used > 0)
    result.estimate = estimate_values(copy_estimates(result), copies);
  return result;
}

std::vector<double> bob_broadcast_times(const ProtocolOneResult& result) {
  std::vector<double> times;
  for (const auto& rec : result.copies)
    times.insert(times.end(), rec.bob_times.begin(), rec.bob_times.end());
  return times;
}

std::vector<double> copy_estimates(const ProtocolOneResult& result) {
  std::vector<double> values;
  values.reserve(static_cast<size_t>(result.copies_used));
  for (const auto& rec : result.copies)
    if (rec.complete) values.push_back(rec.estimate);
  return values;
}

ProtocolTranscript run_protocol_two(int channels, long long copies, double eta,
                                    double dtau, double freq_bin,
                                    const EveConfig& eve, double true_distance,
                                    RunRng& rng) {
  require(channels >= 2, "protocol two: needs at least 2 channels");
  require(copies >= 4, "protocol two: needs at least 4 copies");
  require(eta > 0.0 && eta <= 1.0, "protocol two: eta must lie in (0, 1]");
  require(dtau > 0.0, "protocol two: dtau must be positive");
  require(freq_bin > 0.0, "protocol two: freq_bin must be positive");
  require(eve.fraction >= 0.0 && eve.fraction <= 1.0,
          "protocol two: eve fraction must lie in [0, 1]");

  const double sigma_omega = 1.0 / (2.0 * dtau);
  const double window = kWideWindowFactor * dtau;

  ProtocolTranscript transcript;
  transcript.collision_prob = bin_collision_probability(sigma_omega, freq_bin);

  std::vector<double> all_tt, alice_half, bob_half;
  bool any_sifted = false;
  bool mismatch = false;
  long long tt_seen = 0;

  for (long long i = 0; i < copies; ++i) {
    CopyRecord rec;
    rec.index = i;
    rec.arrived = all_photons_arrive(channels, eta, rng);
    if (!rec.arrived) {
      transcript.copies.push_back(rec);
      continue;
    }
    EntangledCopy copy = make_entangled_copy(channels, sigma_omega, dtau, rng);
    if (eve.strategy != EveStrategy::None && rng.bernoulli(eve.fraction))
      copy = eve_intercept(std::move(copy), eve.strategy);
    rec.tampered = copy.tampered;

    rec.alice_basis = rng.bernoulli(0.5) ? Basis::Time : Basis::Frequency;
    rec.bob_basis = rng.bernoulli(0.5) ? Basis::Time : Basis::Frequency;
    rec.sifted = rec.alice_basis == rec.bob_basis;
    if (!rec.sifted) {
      transcript.copies.push_back(rec);
      continue;
    }
    any_sifted = true;

    if (rec.alice_basis == Basis::Frequency) {
      // A time-intercepted copy leaves the two frequency outcomes
      // independent; otherwise both parties see the copy's shared omega.
      const double alice_omega =
          copy.tampered ? rng.gaussian(0.0, sigma_omega) : copy.omega;
      const double bob_omega =
          copy.tampered ? rng.gaussian(0.0, sigma_omega) : copy.omega;
      rec.alice_freq_bin =
          static_cast<long long>(std::floor(alice_omega / freq_bin));
      rec.bob_freq_bin =
          static_cast<long long>(std::floor(bob_omega / freq_bin));
      rec.freq_match = *rec.alice_freq_bin == *rec.bob_freq_bin;
      ++transcript.n_checked;
      if (!*rec.freq_match) mismatch = true;
    } else {
      double alice_time, bob_sum = 0.0;
      if (copy.time_uncorrelated) {
        // Frequency interception collapses every photon to one sharp
        // frequency; arrival times are then unconstrained.
        alice_time = rng.gaussian(0.0, window);
        for (int ch = 1; ch < channels; ++ch)
          bob_sum += true_distance + rng.gaussian(0.0, window);
      } else {
        alice_time = copy.offsets[0];
        for (int ch = 1; ch < channels; ++ch)
          bob_sum += copy.offsets[ch] + true_distance;
      }
      rec.alice_time = alice_time;
      rec.bob_time_sum = bob_sum;
      rec.broadcast = (tt_seen % 2 == 0) ? CopyRecord::Broadcast::Alice
                                         : CopyRecord::Broadcast::Bob;
      const double value = (alice_time + bob_sum) / (channels - 1);
      all_tt.push_back(value);
      (rec.broadcast == CopyRecord::Broadcast::Alice ? bob_half : alice_half)
          .push_back(value);
      ++tt_seen;
    }
    transcript.copies.push_back(rec);
  }

  transcript.predicted_detection =
      1.0 - std::pow(transcript.collision_prob,
                     static_cast<double>(transcript.n_checked));

  if (!any_sifted) {
    transcript.verdict = Verdict::Inconclusive;
  } else if (mismatch) {
    transcript.verdict = Verdict::EavesdropperDetected;
  } else {
    transcript.verdict = Verdict::Clean;
    if (!all_tt.empty())
      transcript.estimate = estimate_values(all_tt, copies);
    if (!alice_half.empty())
      transcript.alice_estimate = estimate_values(alice_half, copies);
    if (!bob_half.empty())
      transcript.bob_estimate = estimate_values(bob_half, copies);
  }
  return transcript;
}

}  // namespace qpos
