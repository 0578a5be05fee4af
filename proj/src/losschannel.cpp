#include "qpos/losschannel.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <stdexcept>

namespace qpos {

namespace {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

double log_binomial(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

MatrixXcd annihilation(int dim) {
  MatrixXcd a = MatrixXcd::Zero(dim, dim);
  for (int m = 1; m < dim; ++m) a(m - 1, m) = std::sqrt(double(m));
  return a;
}

MatrixXcd kron(const MatrixXcd& a, const MatrixXcd& b) {
  MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// Trace out the second mode of a dim x dim two-mode operator.
MatrixXcd trace_out_second(const MatrixXcd& rho, int dim) {
  MatrixXcd out = MatrixXcd::Zero(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      for (int k = 0; k < dim; ++k) out(i, j) += rho(i * dim + k, j * dim + k);
  return out;
}

/// Kraus operators of the loss channel on one discretized channel
/// ({vacuum} + freqs one-photon levels): a damping term plus one
/// photon-removal term per frequency.
std::vector<MatrixXcd> channel_kraus(double eta, int freqs) {
  const int d = freqs + 1;
  std::vector<MatrixXcd> ops;
  MatrixXcd keep = MatrixXcd::Identity(d, d) * std::sqrt(eta);
  keep(0, 0) = 1.0;
  ops.push_back(keep);
  for (int j = 1; j <= freqs; ++j) {
    MatrixXcd drop = MatrixXcd::Zero(d, d);
    drop(0, j) = std::sqrt(1.0 - eta);
    ops.push_back(drop);
  }
  return ops;
}

/// Apply a single-channel Kraus set to one channel of a composite state.
MatrixXcd apply_on_channel(const MatrixXcd& rho,
                           const std::vector<MatrixXcd>& ops, int channels,
                           int channel, int freqs) {
  const int d = freqs + 1;
  MatrixXcd eye_left =
      MatrixXcd::Identity(int(std::pow(d, channel)), int(std::pow(d, channel)));
  const int right_dim = int(std::pow(d, channels - channel - 1));
  MatrixXcd eye_right = MatrixXcd::Identity(right_dim, right_dim);
  MatrixXcd out = MatrixXcd::Zero(rho.rows(), rho.cols());
  for (const auto& op : ops) {
    MatrixXcd full = kron(kron(eye_left, op), eye_right);
    out += full * rho * full.adjoint();
  }
  return out;
}

void check_grid_limits(int channels, std::span<const double> omega_grid) {
  require(channels >= 1 && channels <= 4,
          "losschannel: channels must lie in [1, 4]");
  require(!omega_grid.empty() && omega_grid.size() <= 8,
          "losschannel: omega grid must have 1..8 points");
}

VectorXcd entangled_vector(int channels, std::span<const double> amps,
                           int freqs) {
  VectorXcd psi = VectorXcd::Zero(composite_dim(channels, freqs));
  std::vector<int> levels(channels);
  for (int j = 0; j < freqs; ++j) {
    std::fill(levels.begin(), levels.end(), j + 1);
    psi(basis_index(levels, freqs)) = amps[j];
  }
  return psi;
}

}  // namespace

DensityMatrix::DensityMatrix(Eigen::MatrixXcd matrix) : m_(std::move(matrix)) {
  require(m_.rows() == m_.cols() && m_.rows() >= 1,
          "density matrix: must be square and nonempty");
  require((m_ - m_.adjoint()).cwiseAbs().maxCoeff() <= 1e-12,
          "density matrix: not hermitian");
  require(std::abs(m_.trace().real() - 1.0) <= 1e-12 &&
              std::abs(m_.trace().imag()) <= 1e-12,
          "density matrix: trace must be 1");
  if (m_.rows() <= 256) {
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(m_, Eigen::EigenvaluesOnly);
    require(es.eigenvalues().minCoeff() >= -1e-10,
            "density matrix: not positive semidefinite");
  }
}

DensityMatrix DensityMatrix::pure(const Eigen::VectorXcd& psi) {
  const double norm = psi.norm();
  require(norm > 0.0, "density matrix: zero state vector");
  VectorXcd unit = psi / norm;
  return DensityMatrix(unit * unit.adjoint());
}

double min_eigenvalue(const DensityMatrix& rho) {
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(rho.matrix(),
                                              Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

KrausSet kraus_operators(double eta, int dim) {
  require(eta > 0.0 && eta <= 1.0, "kraus: eta must lie in (0, 1]");
  require(dim >= 1, "kraus: dim must be >= 1");
  KrausSet ks{eta, dim, {}};
  ks.operators.reserve(dim);
  for (int n = 0; n < dim; ++n) {
    MatrixXcd v = MatrixXcd::Zero(dim, dim);
    for (int m = n; m < dim; ++m) {
      // <m-n| V_n |m> = sqrt(C(m,n)) eta^((m-n)/2) (1-eta)^(n/2)
      v(m - n, m) = std::exp(0.5 * log_binomial(m, n)) *
                    std::pow(eta, 0.5 * (m - n)) *
                    std::pow(1.0 - eta, 0.5 * n);
    }
    ks.operators.push_back(std::move(v));
  }
  return ks;
}

double completeness_error(const KrausSet& ks) {
  MatrixXcd sum = MatrixXcd::Zero(ks.dim, ks.dim);
  for (const auto& v : ks.operators) sum += v.adjoint() * v;
  return (sum - MatrixXcd::Identity(ks.dim, ks.dim)).cwiseAbs().maxCoeff();
}

Eigen::MatrixXcd apply_loss_raw(const Eigen::MatrixXcd& rho,
                                const KrausSet& ks) {
  require(rho.rows() == ks.dim && rho.cols() == ks.dim,
          "apply_loss: dimension mismatch");
  MatrixXcd out = MatrixXcd::Zero(ks.dim, ks.dim);
  for (const auto& v : ks.operators) out += v * rho * v.adjoint();
  return out;
}

DensityMatrix apply_loss(const DensityMatrix& rho, const KrausSet& ks) {
  return DensityMatrix(apply_loss_raw(rho.matrix(), ks));
}

double beam_splitter_check(double eta, int dim) {
  require(dim >= 2, "beam_splitter_check: dim must be >= 2");
  require(eta > 0.0 && eta <= 1.0, "beam_splitter_check: eta in (0, 1]");

  const MatrixXcd a = annihilation(dim);
  const MatrixXcd eye = MatrixXcd::Identity(dim, dim);
  const MatrixXcd ab_dag = kron(a, a.adjoint().eval());
  const MatrixXcd a_dag_b = kron(a.adjoint().eval(), a);
  const double theta = std::atan(std::sqrt((1.0 - eta) / eta));
  const MatrixXcd u = (-theta * (ab_dag - a_dag_b)).exp();

  const KrausSet ks = kraus_operators(eta, dim);
  const MatrixXcd vac = [&] {
    MatrixXcd v = MatrixXcd::Zero(dim, dim);
    v(0, 0) = 1.0;
    return v;
  }();

  double worst = 0.0;
  for (int i = 0; i <= dim - 2; ++i) {
    for (int j = 0; j <= dim - 2; ++j) {
      MatrixXcd unit = MatrixXcd::Zero(dim, dim);
      unit(i, j) = 1.0;
      MatrixXcd two_mode = kron(unit, vac);
      MatrixXcd via_bs = trace_out_second(u * two_mode * u.adjoint(), dim);
      MatrixXcd via_kraus = apply_loss_raw(unit, ks);
      worst = std::max(worst, (via_bs - via_kraus).cwiseAbs().maxCoeff());
    }
  }
  return worst;
}

int composite_dim(int channels, int freqs) {
  int d = 1;
  for (int i = 0; i < channels; ++i) d *= freqs + 1;
  return d;
}

int basis_index(std::span<const int> levels, int freqs) {
  int idx = 0;
  for (int level : levels) idx = idx * (freqs + 1) + level;
  return idx;
}

std::vector<double> discretized_amplitudes(
    const SpectrumModel& s, std::span<const double> omega_grid) {
  std::vector<double> amps(omega_grid.size());
  double norm2 = 0.0;
  for (size_t j = 0; j < omega_grid.size(); ++j) {
    const double x = omega_grid[j] / s.sigma_omega;
    amps[j] = std::exp(-0.25 * x * x);  // sqrt of the Gaussian density
    norm2 += amps[j] * amps[j];
  }
  for (double& a : amps) a /= std::sqrt(norm2);
  return amps;
}

DensityMatrix post_loss_entangled(int channels, double eta,
                                  const SpectrumModel& s,
                                  std::span<const double> omega_grid) {
  check_grid_limits(channels, omega_grid);
  const int freqs = int(omega_grid.size());
  const auto amps = discretized_amplitudes(s, omega_grid);
  VectorXcd psi = entangled_vector(channels, amps, freqs);
  MatrixXcd rho = psi * psi.adjoint();
  const auto ops = channel_kraus(eta, freqs);
  for (int c = 0; c < channels; ++c)
    rho = apply_on_channel(rho, ops, channels, c, freqs);
  return DensityMatrix(rho);
}

DensityMatrix post_loss_unentangled(int channels, double eta,
                                    const SpectrumModel& s,
                                    std::span<const double> omega_grid) {
  check_grid_limits(channels, omega_grid);
  const int freqs = int(omega_grid.size());
  const auto amps = discretized_amplitudes(s, omega_grid);
  VectorXcd one = VectorXcd::Zero(freqs + 1);
  for (int j = 0; j < freqs; ++j) one(j + 1) = amps[j];
  VectorXcd psi = one;
  for (int c = 1; c < channels; ++c) {
    VectorXcd next(psi.size() * (freqs + 1));
    for (Eigen::Index i = 0; i < psi.size(); ++i)
      next.segment(i * (freqs + 1), freqs + 1) = psi(i) * one;
    psi = next;
  }
  MatrixXcd rho = psi * psi.adjoint();
  const auto ops = channel_kraus(eta, freqs);
  for (int c = 0; c < channels; ++c)
    rho = apply_on_channel(rho, ops, channels, c, freqs);
  return DensityMatrix(rho);
}

double entangled_block_weight(const DensityMatrix& rho, int channels,
                              const SpectrumModel& s,
                              std::span<const double> omega_grid) {
  const int freqs = int(omega_grid.size());
  const auto amps = discretized_amplitudes(s, omega_grid);
  VectorXcd psi = entangled_vector(channels, amps, freqs);
  return (psi.adjoint() * rho.matrix() * psi)(0, 0).real();
}

double max_loss_sector_coherence(const DensityMatrix& rho, int channels,
                                 int freqs) {
  const int dim = composite_dim(channels, freqs);
  const int d = freqs + 1;
  const auto fully_occupied = [&](int idx) {
    for (int c = 0; c < channels; ++c) {
      if (idx % d == 0) return false;
      idx /= d;
    }
    return true;
  };
  double worst = 0.0;
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) {
      if (i == j) continue;
      if (fully_occupied(i) && fully_occupied(j)) continue;
      worst = std::max(worst, std::abs(rho.matrix()(i, j)));
    }
  return worst;
}

double sector_weight(const DensityMatrix& rho, int channels, int freqs,
                     std::span<const int> occupied) {
  require(int(occupied.size()) == channels, "sector_weight: pattern size");
  const int dim = composite_dim(channels, freqs);
  const int d = freqs + 1;
  double total = 0.0;
  for (int i = 0; i < dim; ++i) {
    int idx = i;
    bool match = true;
    for (int c = channels - 1; c >= 0; --c) {
      const bool has_photon = (idx % d) != 0;
      if (has_photon != (occupied[c] != 0)) {
        match = false;
        break;
      }
      idx /= d;
    }
    if (match) total += rho.matrix()(i, i).real();
  }
  return total;
}

Eigen::MatrixXcd partial_trace_channel(const DensityMatrix& rho, int channels,
                                       int freqs, int keep) {
  require(keep >= 0 && keep < channels, "partial_trace: bad channel index");
  const int d = freqs + 1;
  const int left = int(std::pow(d, keep));
  const int right = int(std::pow(d, channels - keep - 1));
  MatrixXcd out = MatrixXcd::Zero(d, d);
  for (int l = 0; l < left; ++l)
    for (int r = 0; r < right; ++r)
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
          out(i, j) += rho.matrix()((l * d + i) * right + r,
                                    (l * d + j) * right + r);
  return out;
}

}  // namespace qpos
