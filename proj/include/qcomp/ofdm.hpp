#pragma once

#include <Eigen/Dense>
#include <vector>

#include "qcomp/common.hpp"

namespace qcomp {

/// Normalized DFT operator of size K. Entry (r, c) = exp(-j 2 pi r c / K) / sqrt(K),
/// zero-based; unitary by construction.
struct DftOperator {
  int size = 0;
  Eigen::MatrixXcd matrix;
};

DftOperator build_dft(int size);

/// Per-subcarrier channel blocks G(k), k = 0..K-1, each N_b x N_u in uplink
/// orientation (column u is the channel of user u).
struct FreqChannelBlock {
  std::vector<Eigen::MatrixXcd> block;

  int subcarriers() const { return static_cast<int>(block.size()); }
  int rows() const { return block.empty() ? 0 : static_cast<int>(block[0].rows()); }
  int cols() const { return block.empty() ? 0 : static_cast<int>(block[0].cols()); }
};

/// Synthesizes frequency-domain blocks from L time-domain taps:
/// G(k) = sum_l H_l exp(-j 2 pi k l / K). Requires 1 <= L <= K.
FreqChannelBlock freq_from_taps(const std::vector<Eigen::MatrixXcd>& taps, int subcarriers);

/// Applies the stacked per-antenna inverse DFT to K stacked frequency-domain
/// vectors of length `per_slot` each. Energy preserving.
Eigen::VectorXcd ofdm_modulate(const Eigen::VectorXcd& freq_symbols, int subcarriers,
                               int per_slot);

/// Per-antenna diagonal collapse of a block-diagonal covariance seen through
/// the OFDM (de)modulation operators: for K blocks A(0..K-1), returns
/// Delta_m = (1/K) sum_k [A(k)]_{m,m}. The stacked time-domain diagonal is
/// then I_K (x) Delta, i.e. time invariant.
Eigen::VectorXd time_diag_collapse(const std::vector<Eigen::MatrixXcd>& blocks);

}  // namespace qcomp
