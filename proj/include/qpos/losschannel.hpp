#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "qpos/spectrum.hpp"

namespace qpos {

/// Density operator on a truncated space. Construction checks hermiticity
/// and unit trace to 1e-12; positivity (eigenvalue floor -1e-10) is checked
/// up to dimension 256 and exposed via min_eigenvalue() beyond that.
class DensityMatrix {
 public:
  explicit DensityMatrix(Eigen::MatrixXcd matrix);
  static DensityMatrix pure(const Eigen::VectorXcd& psi);

  const Eigen::MatrixXcd& matrix() const { return m_; }
  Eigen::Index dim() const { return m_.rows(); }

 private:
  Eigen::MatrixXcd m_;
};

double min_eigenvalue(const DensityMatrix& rho);

/// Kraus decomposition of the transmissivity-eta loss channel on a Fock
/// space truncated at dim-1 photons. operators[n] removes n photons.
struct KrausSet {
  double eta;
  int dim;
  std::vector<Eigen::MatrixXcd> operators;
};

KrausSet kraus_operators(double eta, int dim);

/// Max-abs entry of sum_n V_n^dag V_n - I; zero (to rounding) on the
/// truncated space by construction.
double completeness_error(const KrausSet& ks);

/// sum_n V_n rho V_n^dag, without density-matrix validation.
Eigen::MatrixXcd apply_loss_raw(const Eigen::MatrixXcd& rho,
                                const KrausSet& ks);

DensityMatrix apply_loss(const DensityMatrix& rho, const KrausSet& ks);

/// Independent construction of the same channel: beam splitter of
/// transmissivity eta on a dim^2 two-mode space, vacuum ancilla, partial
/// trace. Returns the max deviation from the Kraus map over all matrix
/// units |i><j| with i, j <= dim-2 (one excitation of truncation headroom).
double beam_splitter_check(double eta, int dim);

// ---------------------------------------------------------------------------
// Discretized multi-channel states
//
// Per channel the space is {vacuum} + {one photon at omega_j}; level 0 is
// the vacuum, level j+1 the photon at omega_grid[j]. Channels compose
// left-to-right, channel 0 most significant.
// ---------------------------------------------------------------------------

int composite_dim(int channels, int freqs);
int basis_index(std::span<const int> levels, int freqs);

/// Normalized spectral amplitudes phi(omega_j) on the grid.
std::vector<double> discretized_amplitudes(const SpectrumModel& s,
                                           std::span<const double> omega_grid);

/// Loss applied per channel-mode to the maximally entangled M-photon state
/// on the grid. channels <= 4, grid size <= 8.
DensityMatrix post_loss_entangled(int channels, double eta,
                                  const SpectrumModel& s,
                                  std::span<const double> omega_grid);

/// Same for the product of M independent single-photon wavepackets.
DensityMatrix post_loss_unentangled(int channels, double eta,
                                    const SpectrumModel& s,
                                    std::span<const double> omega_grid);

/// Overlap of rho with the ideal entangled projector on the grid.
double entangled_block_weight(const DensityMatrix& rho, int channels,
                              const SpectrumModel& s,
                              std::span<const double> omega_grid);

/// Largest coherence involving any basis state with at least one empty
/// channel; the photon-loss sectors of the entangled state must be
/// frequency-diagonal, so this probes exactly the structure loss destroys.
double max_loss_sector_coherence(const DensityMatrix& rho, int channels,
                                 int freqs);

/// Trace of the block where exactly the flagged channels are occupied.
double sector_weight(const DensityMatrix& rho, int channels, int freqs,
                     std::span<const int> occupied);

/// Reduced state of one channel, tracing out the others.
Eigen::MatrixXcd partial_trace_channel(const DensityMatrix& rho, int channels,
                                       int freqs, int keep);

}  // namespace qpos
