#pragma once

namespace qpos {

/// Gaussian single-photon spectrum with angular-frequency std sigma_omega.
/// The spectral density is normalized; in simulator units the whole time
/// scale is carried by the arrival-time width it implies.
struct SpectrumModel {
  double sigma_omega;
};

/// Two-scale spectrum of the group-entangled family: groups share a
/// carrier of std delta_Omega, photons within a group spread delta_omega
/// around it. Both strictly positive; limits are taken analytically.
struct GroupSpectrum {
  double delta_Omega;
  double delta_omega;
};

SpectrumModel make_spectrum(double sigma_omega);
GroupSpectrum make_group_spectrum(double delta_Omega, double delta_omega);

/// Spectrum of one photon drawn from a group-entangled state: Gaussian
/// with variance delta_omega^2 + delta_Omega^2.
SpectrumModel single_photon_spectrum(const GroupSpectrum& g);

/// Arrival-time std of a single photon: dtau = 1/(2 sigma_omega).
double time_std(const SpectrumModel& s);
double time_std(const GroupSpectrum& g);

/// Single-photon arrival-time density: Gaussian, mean 0, std time_std(s).
double arrival_density(const SpectrumModel& s, double t);

}  // namespace qpos
