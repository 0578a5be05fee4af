#include "qpos/states.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace qpos {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

void check_eta(double eta) {
  require(eta > 0.0 && eta <= 1.0 && std::isfinite(eta),
          "states: eta must lie in (0, 1]");
}

void check_dtau(double dtau) {
  require(dtau > 0.0 && std::isfinite(dtau), "states: dtau must be positive");
}

double log_binomial(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

/// exp(log C(n,k) + a*log(p) + b*log(1-p)) with 0*log(0) treated as 0.
double binomial_weight(int n, int k, double p, double a, double b) {
  double lg = log_binomial(n, k);
  if (a != 0.0) {
    if (p == 0.0) return 0.0;
    lg += a * std::log(p);
  }
  if (b != 0.0) {
    if (p == 1.0) return 0.0;
    lg += b * std::log1p(-p);
  }
  return std::exp(lg);
}

/// 1 - (1-eta)^M without cancellation.
double keep_prob(int m, double eta) {
  if (eta == 1.0) return 1.0;
  return -std::expm1(m * std::log1p(-eta));
}

/// Sum accumulated in descending-magnitude order.
double sum_descending(std::vector<double>& terms) {
  std::sort(terms.begin(), terms.end(),
            [](double a, double b) { return std::abs(a) > std::abs(b); });
  double total = 0.0, carry = 0.0;
  for (double t : terms) {
    const double y = t - carry;
    const double s = total + y;
    carry = (s - total) - y;
    total = s;
  }
  return total;
}

}  // namespace

void validate(const StateFamily& family) {
  std::visit(
      [](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Classical>) {
          require(f.channels >= 1, "classical: channels must be >= 1");
          require(f.mean_photons > 0.0 && std::isfinite(f.mean_photons),
                  "classical: mean photon number must be positive");
        } else if constexpr (std::is_same_v<T, MaxEntangled>) {
          require(f.channels >= 1, "entangled: channels must be >= 1");
          require(f.photons_per_channel >= 1,
                  "entangled: photons per channel must be >= 1");
        } else if constexpr (std::is_same_v<T, Unentangled>) {
          require(f.channels >= 1, "unentangled: channels must be >= 1");
        } else if constexpr (std::is_same_v<T, PartialEntangled>) {
          require(f.channels >= 1, "partial: channels must be >= 1");
          require(f.entangled_channels >= 1 &&
                      f.entangled_channels <= f.channels,
                  "partial: entangled channels must lie in [1, channels]");
        } else {
          require(f.groups >= 1, "group: groups must be >= 1");
          require(f.photons_per_group >= 1,
                  "group: photons per group must be >= 1");
          make_group_spectrum(f.spectrum.delta_Omega, f.spectrum.delta_omega);
        }
      },
      family);
}

std::string family_code(const StateFamily& family) {
  return std::visit(
      [](const auto& f) -> std::string {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Classical>) return "cl";
        else if constexpr (std::is_same_v<T, MaxEntangled>) return "en";
        else if constexpr (std::is_same_v<T, Unentangled>) return "un";
        else if constexpr (std::is_same_v<T, PartialEntangled>) return "pe";
        else return "ge";
      },
      family);
}

double lossless_accuracy(const StateFamily& family, double dtau) {
  validate(family);
  if (!std::holds_alternative<GroupEntangled>(family)) check_dtau(dtau);
  return std::visit(
      [dtau](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Classical>) {
          return dtau / std::sqrt(f.channels * f.mean_photons);
        } else if constexpr (std::is_same_v<T, MaxEntangled>) {
          return dtau / (static_cast<double>(f.channels) * f.photons_per_channel);
        } else if constexpr (std::is_same_v<T, Unentangled>) {
          return dtau / std::sqrt(static_cast<double>(f.channels));
        } else if constexpr (std::is_same_v<T, PartialEntangled>) {
          const double m = f.channels;
          return dtau / std::sqrt(m) *
                 std::sqrt((m - f.entangled_channels + 1.0) / m);
        } else {
          const double w2 = f.spectrum.delta_omega * f.spectrum.delta_omega;
          const double W2 = f.spectrum.delta_Omega * f.spectrum.delta_Omega;
          const double g = f.groups;
          return 1.0 /
                 (2.0 * f.photons_per_group * std::sqrt(g * (g * W2 + w2)));
        }
      },
      family);
}

double threshold_eta(int channels) {
  require(channels >= 2, "threshold_eta: requires at least 2 channels");
  return std::exp(-std::log(static_cast<double>(channels)) / (channels - 1));
}

double unentangled_lossy_std(int channels, double eta, double dtau) {
  require(channels >= 1, "unentangled_lossy_std: channels must be >= 1");
  check_eta(eta);
  check_dtau(dtau);
  const double keep = keep_prob(channels, eta);
  std::vector<double> terms;
  terms.reserve(channels);
  for (int m = 1; m <= channels; ++m)
    terms.push_back(binomial_weight(channels, m, eta, m, channels - m) /
                    (m * keep));
  return dtau * std::sqrt(sum_descending(terms));
}

double unentangled_lossy_std_r(int channels, double eta, double dtau,
                               long long runs) {
  require(runs >= 1, "unentangled_lossy_std_r: runs must be >= 1");
  return unentangled_lossy_std(channels, eta, dtau) /
         std::sqrt(runs * keep_prob(channels, eta));
}

double entangled_lossy_std_r(int channels, double eta, double dtau,
                             long long runs) {
  require(channels >= 1, "entangled_lossy_std_r: channels must be >= 1");
  require(runs >= 1, "entangled_lossy_std_r: runs must be >= 1");
  check_eta(eta);
  check_dtau(dtau);
  return dtau / (channels * std::sqrt(runs * std::pow(eta, channels)));
}

double gain_lambda(int channels, double eta) {
  require(channels >= 1, "gain_lambda: channels must be >= 1");
  check_eta(eta);
  const double keep = keep_prob(channels, eta);
  std::vector<double> terms;
  terms.reserve(channels);
  for (int m = 1; m <= channels; ++m)
    terms.push_back(
        binomial_weight(channels, m, eta, channels + m, channels - m) /
        (m * keep * keep));
  return channels * std::sqrt(sum_descending(terms));
}

double gain_lambda_root(int channels) {
  require(channels >= 2, "gain_lambda_root: requires at least 2 channels");
  double lo = 1e-12, hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (gain_lambda(channels, mid) > 1.0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

double group_tau(int intact_groups, int groups, const GroupSpectrum& spec) {
  require(groups >= 1, "group_tau: groups must be >= 1");
  require(intact_groups >= 1 && intact_groups <= groups,
          "group_tau: intact groups must lie in [1, groups]");
  make_group_spectrum(spec.delta_Omega, spec.delta_omega);
  const double w2 = spec.delta_omega * spec.delta_omega;
  const double W2 = spec.delta_Omega * spec.delta_Omega;
  const double g = intact_groups;
  return std::sqrt(g) / (2.0 * spec.delta_omega) *
         std::sqrt(((groups - g) * W2 + w2) / (groups * W2 + w2));
}

double retained_group_prob(int groups, int photons_per_group, double eta,
                           int intact_groups) {
  require(groups >= 1 && photons_per_group >= 1,
          "retained_group_prob: counts must be >= 1");
  require(intact_groups >= 1 && intact_groups <= groups,
          "retained_group_prob: intact groups must lie in [1, groups]");
  check_eta(eta);
  const double p = std::pow(eta, photons_per_group);
  return binomial_weight(groups, intact_groups, p, intact_groups,
                         groups - intact_groups) /
         keep_prob(groups, p);
}

double group_lossy_std(int groups, int photons_per_group, double eta,
                       const GroupSpectrum& spec) {
  require(groups >= 1 && photons_per_group >= 1,
          "group_lossy_std: counts must be >= 1");
  check_eta(eta);
  make_group_spectrum(spec.delta_Omega, spec.delta_omega);
  const double w2 = spec.delta_omega * spec.delta_omega;
  const double W2 = spec.delta_Omega * spec.delta_Omega;
  std::vector<double> terms;
  terms.reserve(groups);
  for (int g = 1; g <= groups; ++g)
    terms.push_back(((groups - g) * W2 + w2) / (g * (groups * W2 + w2)) *
                    retained_group_prob(groups, photons_per_group, eta, g));
  return std::sqrt(sum_descending(terms)) /
         (2.0 * photons_per_group * spec.delta_omega);
}

double group_lossy_std_r(int groups, int photons_per_group, double eta,
                         const GroupSpectrum& spec, long long runs) {
  require(runs >= 1, "group_lossy_std_r: runs must be >= 1");
  const double p = std::pow(eta, photons_per_group);
  return group_lossy_std(groups, photons_per_group, eta, spec) /
         std::sqrt(runs * keep_prob(groups, p));
}

double partial_lossy_std(int channels, int entangled_channels, double eta,
                         double dtau) {
  require(channels >= 1, "partial_lossy_std: channels must be >= 1");
  require(entangled_channels >= 1 && entangled_channels <= channels,
          "partial_lossy_std: entangled channels must lie in [1, channels]");
  check_eta(eta);
  check_dtau(dtau);
  const int q = entangled_channels;
  const int mu = channels - q;  // unentangled channels
  const double p_block = std::pow(eta, q);
  std::vector<double> terms;
  terms.reserve(2 * mu + 2);
  // Block intact: statistic averages the block sum with m survivor times.
  for (int m = 0; m <= mu; ++m) {
    const double w = p_block * binomial_weight(mu, m, eta, m, mu - m);
    terms.push_back(w * (1.0 + m) / ((q + m) * static_cast<double>(q + m)));
  }
  // Block broken: only survivor times remain; m = 0 is discarded.
  for (int m = 1; m <= mu; ++m) {
    const double w = (1.0 - p_block) * binomial_weight(mu, m, eta, m, mu - m);
    terms.push_back(w / m);
  }
  const double usable = 1.0 - (1.0 - p_block) * std::pow(1.0 - eta, mu);
  return dtau * std::sqrt(sum_descending(terms) / usable);
}

double usable_run_fraction(const StateFamily& family, double eta) {
  validate(family);
  check_eta(eta);
  return std::visit(
      [eta](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Classical>) {
          return -std::expm1(-eta * f.channels * f.mean_photons);
        } else if constexpr (std::is_same_v<T, MaxEntangled>) {
          return std::pow(eta, f.channels * f.photons_per_channel);
        } else if constexpr (std::is_same_v<T, Unentangled>) {
          return keep_prob(f.channels, eta);
        } else if constexpr (std::is_same_v<T, PartialEntangled>) {
          const int mu = f.channels - f.entangled_channels;
          return 1.0 - (1.0 - std::pow(eta, f.entangled_channels)) *
                           std::pow(1.0 - eta, mu);
        } else {
          return keep_prob(f.groups, std::pow(eta, f.photons_per_group));
        }
      },
      family);
}

double lossy_accuracy(const StateFamily& family, double eta, double dtau) {
  validate(family);
  check_eta(eta);
  return std::visit(
      [&](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Classical>) {
          check_dtau(dtau);
          return dtau / std::sqrt(eta * f.channels * f.mean_photons);
        } else if constexpr (std::is_same_v<T, MaxEntangled>) {
          check_dtau(dtau);
          return dtau /
                 (static_cast<double>(f.channels) * f.photons_per_channel);
        } else if constexpr (std::is_same_v<T, Unentangled>) {
          return unentangled_lossy_std(f.channels, eta, dtau);
        } else if constexpr (std::is_same_v<T, PartialEntangled>) {
          return partial_lossy_std(f.channels, f.entangled_channels, eta,
                                   dtau);
        } else {
          return group_lossy_std(f.groups, f.photons_per_group, eta,
                                 f.spectrum);
        }
      },
      family);
}

AccuracyReport accuracy_report(const StateFamily& family, double eta,
                               double dtau, long long runs) {
  require(runs >= 1, "accuracy_report: runs must be >= 1");
  const double per_run = lossy_accuracy(family, eta, dtau);
  const double usable = usable_run_fraction(family, eta);
  double r_runs;
  if (std::holds_alternative<Classical>(family)) {
    // Pooled photon count drives the classical bound; empty runs cost
    // nothing beyond their missing photons.
    r_runs = per_run / std::sqrt(static_cast<double>(runs));
  } else {
    r_runs = per_run / std::sqrt(runs * usable);
  }
  return AccuracyReport{per_run, r_runs, usable};
}

RegionClassification classify_region(int channels, double eta, int group_size,
                                     double ratio, double unit) {
  require(channels >= 1, "classify_region: channels must be >= 1");
  require(group_size >= 1, "classify_region: group size must be >= 1");
  require(channels % group_size == 0,
          "classify_region: channels must be divisible by group size");
  require(ratio > 0.0 && std::isfinite(ratio),
          "classify_region: ratio must be positive");
  require(unit > 0.0 && std::isfinite(unit),
          "classify_region: unit must be positive");
  check_eta(eta);

  const GroupSpectrum spec =
      make_group_spectrum(unit, std::sqrt(ratio) * unit);
  const double dtau = time_std(spec);  // matched single-photon spectra
  const int groups = channels / group_size;

  RegionClassification out;
  out.dt_entangled = entangled_lossy_std_r(channels, eta, dtau, 1);
  out.dt_group = group_lossy_std_r(groups, group_size, eta, spec, 1);
  out.dt_unentangled = unentangled_lossy_std_r(channels, eta, dtau, 1);

  struct Entry {
    const char* name;
    double value;
  };
  Entry entries[3] = {{"en", out.dt_entangled},
                      {"G", out.dt_group},
                      {"un", out.dt_unentangled}};
  std::sort(entries, entries + 3,
            [](const Entry& a, const Entry& b) { return a.value < b.value; });
  const auto tied = [](double a, double b) {
    return std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b));
  };
  out.label = entries[0].name;
  for (int i = 1; i < 3; ++i) {
    out.label += tied(entries[i - 1].value, entries[i].value) ? '=' : '>';
    out.label += entries[i].name;
  }
  return out;
}

}  // namespace qpos
