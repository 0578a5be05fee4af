#include "qpos/spectrum.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qpos {

SpectrumModel make_spectrum(double sigma_omega) {
  if (!(sigma_omega > 0.0) || !std::isfinite(sigma_omega))
    throw std::invalid_argument("spectrum: sigma_omega must be positive");
  return SpectrumModel{sigma_omega};
}

GroupSpectrum make_group_spectrum(double delta_Omega, double delta_omega) {
  if (!(delta_Omega > 0.0) || !std::isfinite(delta_Omega))
    throw std::invalid_argument("spectrum: delta_Omega must be positive");
  if (!(delta_omega > 0.0) || !std::isfinite(delta_omega))
    throw std::invalid_argument("spectrum: delta_omega must be positive");
  return GroupSpectrum{delta_Omega, delta_omega};
}

SpectrumModel single_photon_spectrum(const GroupSpectrum& g) {
  return SpectrumModel{std::hypot(g.delta_omega, g.delta_Omega)};
}

double time_std(const SpectrumModel& s) { return 1.0 / (2.0 * s.sigma_omega); }

double time_std(const GroupSpectrum& g) {
  return time_std(single_photon_spectrum(g));
}

double arrival_density(const SpectrumModel& s, double t) {
  const double dtau = time_std(s);
  const double z = t / dtau;
  return std::exp(-0.5 * z * z) /
         (dtau * std::sqrt(2.0 * std::numbers::pi));
}

}  // namespace qpos
