#pragma once

#include <Eigen/Dense>
#include <vector>

#include "qcomp/config.hpp"
#include "qcomp/network.hpp"
#include "qcomp/quantizer.hpp"

namespace qcomp {

/// Downlink precoders w_{i,u}(k), one complex N_b vector per
/// (cell, user, subcarrier). Also used for virtual-uplink equalizers, which
/// share the shape.
struct BeamformerSet {
  int n_cells = 0;
  int n_users = 0;
  int n_antennas = 0;
  int subcarriers = 0;
  std::vector<Eigen::VectorXcd> w;  // [link_index]

  static BeamformerSet zero(int n_cells, int n_users, int n_antennas, int subcarriers);

  int links() const { return n_cells * n_users * subcarriers; }
  int index(int cell, int user, int subcarrier) const {
    return link_index(cell, user, subcarrier, n_users, subcarriers);
  }
  Eigen::VectorXcd& at(int cell, int user, int subcarrier) {
    return w[index(cell, user, subcarrier)];
  }
  const Eigen::VectorXcd& at(int cell, int user, int subcarrier) const {
    return w[index(cell, user, subcarrier)];
  }

  /// Per-subcarrier precoder matrices W_i(k) (N_b x N_u) for one cell.
  std::vector<Eigen::MatrixXcd> cell_blocks(int cell) const;
};

using EqualizerSet = BeamformerSet;

/// Achieved SQINRs plus the per-antenna transmit power accounting.
struct SqinrPowerReport {
  std::vector<double> gamma_achieved;  // per link; empty until evaluated
  Eigen::MatrixXd antenna_power_w;     // n_cells x n_antennas
  double p0_w = 0.0;                   // max over (cell, antenna)
  double total_power_w = 0.0;
};

/// Coupling matrix of the beamformer-scaling system, rows/columns indexed by
/// link_index(i,u,k). Diagonal carries the (alpha^2/gamma)|g^H f|^2 signal
/// term; same-subcarrier off-diagonals subtract interference; the alpha*beta
/// terms couple every pair of links across subcarriers, so the matrix is only
/// block-diagonal over k when beta = 0.
Eigen::MatrixXd assemble_sigma(const EqualizerSet& equalizers, const ChannelRealization& channels,
                               const std::vector<double>& sqinr_targets,
                               const QuantizerSpec& spec);

/// Solves Sigma * tau = noise for the scaling coefficients; every entry must
/// come out strictly positive.
Eigen::VectorXd solve_tau(const Eigen::MatrixXd& sigma, double noise_power_w);
Eigen::VectorXd solve_tau(const Eigen::MatrixXd& sigma, const Eigen::VectorXd& noise_per_link);

/// w_{i,u}(k) = sqrt(tau_{i,u}(k)) * f_{i,u}(k).
BeamformerSet build_beamformers(const EqualizerSet& equalizers, const Eigen::VectorXd& tau);

/// Exact analytic downlink SQINR of every link under the AQNM:
/// Gamma = alpha^2 |g^H w|^2 / (interference + quantization + noise).
std::vector<double> evaluate_sqinr(const BeamformerSet& beamformers,
                                   const ChannelRealization& channels, const QuantizerSpec& spec,
                                   double noise_power_w);
std::vector<double> evaluate_sqinr(const BeamformerSet& beamformers,
                                   const ChannelRealization& channels, const QuantizerSpec& spec,
                                   const Eigen::VectorXd& noise_per_link);

/// Per-antenna transmit powers [alpha/K sum_k W_i(k) W_i(k)^H]_{m,m}, their
/// max p0 and network total. gamma_achieved is left empty.
SqinrPowerReport antenna_powers(const BeamformerSet& beamformers, const QuantizerSpec& spec);

}  // namespace qcomp
