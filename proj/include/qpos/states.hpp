#pragma once

#include <string>
#include <variant>

#include "qpos/spectrum.hpp"

namespace qpos {

// ---------------------------------------------------------------------------
// Pulse-state families
// ---------------------------------------------------------------------------

/// M coherent pulses with mean_photons photons each.
struct Classical {
  int channels;
  double mean_photons;
};

/// M channels of N photons each, all sharing one random frequency.
struct MaxEntangled {
  int channels;
  int photons_per_channel;
};

/// M independent single-photon pulses.
struct Unentangled {
  int channels;
};

/// One photon per channel; the first entangled_channels share a frequency,
/// the rest are independent.
struct PartialEntangled {
  int channels;
  int entangled_channels;
};

/// groups x photons_per_group single photons; photons within a group share
/// an exact frequency, groups are correlated through the carrier spectrum.
struct GroupEntangled {
  int groups;
  int photons_per_group;
  GroupSpectrum spectrum;
};

using StateFamily =
    std::variant<Classical, MaxEntangled, Unentangled, PartialEntangled,
                 GroupEntangled>;

/// Throws std::invalid_argument on any domain violation.
void validate(const StateFamily& family);

/// Short family code used in CSV output: cl, en, un, pe, ge.
std::string family_code(const StateFamily& family);

// ---------------------------------------------------------------------------
// Accuracy formulas (analytic)
// ---------------------------------------------------------------------------

/// Per-run timing accuracy at unit efficiency. For the classical family this
/// is the large-N bound; the finite-N excess is measured by Monte Carlo.
/// GroupEntangled uses its own spectrum and ignores dtau.
double lossless_accuracy(const StateFamily& family, double dtau);

/// Efficiency above which M maximally entangled photons beat M unentangled
/// ones (per-photon-budget argument): (1/M)^(1/(M-1)). Requires M >= 2.
double threshold_eta(int channels);

/// Accuracy of the usable-run statistic for M unentangled photons under
/// per-photon survival eta, conditioned on at least one arrival.
double unentangled_lossy_std(int channels, double eta, double dtau);

/// r-attempted-run accuracy for the unentangled family; accounts for the
/// fraction of runs discarded entirely.
double unentangled_lossy_std_r(int channels, double eta, double dtau,
                               long long runs);

/// r-attempted-run accuracy for M maximally entangled single photons:
/// dtau / (M sqrt(r eta^M)).
double entangled_lossy_std_r(int channels, double eta, double dtau,
                             long long runs);

/// Accuracy ratio unentangled/entangled at equal run budget; > 1 means the
/// entangled state wins.
double gain_lambda(int channels, double eta);

/// Efficiency at which gain_lambda crosses 1 (unique root; requires M >= 2).
double gain_lambda_root(int channels);

/// Width of the summed arrival times of the photons in g intact groups
/// out of G.
double group_tau(int intact_groups, int groups, const GroupSpectrum& spec);

/// Probability that exactly g of G groups keep all K photons, conditioned
/// on at least one intact group.
double retained_group_prob(int groups, int photons_per_group, double eta,
                           int intact_groups);

/// Usable-run accuracy of the group-entangled family under loss.
double group_lossy_std(int groups, int photons_per_group, double eta,
                       const GroupSpectrum& spec);

/// r-attempted-run version of group_lossy_std.
double group_lossy_std_r(int groups, int photons_per_group, double eta,
                         const GroupSpectrum& spec, long long runs);

/// Usable-run accuracy of the partially entangled family under loss, for
/// the retained-photon-average estimator (reduces to the closed form
/// (dtau/sqrt(M)) sqrt((M-Q+1)/M) at eta = 1).
double partial_lossy_std(int channels, int entangled_channels, double eta,
                         double dtau);

/// Probability that a run yields a usable statistic.
double usable_run_fraction(const StateFamily& family, double eta);

/// Per-usable-run accuracy under loss for any family (the quantity the
/// Monte Carlo statistic std is compared against).
double lossy_accuracy(const StateFamily& family, double eta, double dtau);

struct AccuracyReport {
  double delta_t_per_run;
  double delta_t_r_runs;
  double usable_run_fraction;
};

AccuracyReport accuracy_report(const StateFamily& family, double eta,
                               double dtau, long long runs);

// ---------------------------------------------------------------------------
// Region classification (entangled vs group vs unentangled)
// ---------------------------------------------------------------------------

/// r-normalized accuracies of the three competing states with matched
/// single-photon spectra, and their ordering best-first. Ties within 1e-12
/// relative appear as '=' in the label (e.g. "en=G>un").
struct RegionClassification {
  double dt_entangled;
  double dt_group;
  double dt_unentangled;
  std::string label;
};

/// ratio = delta_omega^2 / delta_Omega^2; unit sets the arbitrary carrier
/// scale and must not affect the ordering. Requires channels % group_size == 0.
RegionClassification classify_region(int channels, double eta, int group_size,
                                     double ratio, double unit = 1.0);

}  // namespace qpos
