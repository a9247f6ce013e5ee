#include "qcomp/ofdm.hpp"

#include <cmath>

namespace qcomp {

DftOperator build_dft(int size) {
  if (size < 1) {
    throw InvalidDimensionError("build_dft: size must be >= 1, got " + std::to_string(size));
  }
  DftOperator op;
  op.size = size;
  op.matrix.resize(size, size);
  const double scale = 1.0 / std::sqrt(static_cast<double>(size));
  for (int r = 0; r < size; ++r) {
    for (int c = 0; c < size; ++c) {
      // r*c can overflow int for large sizes; reduce mod K first.
      const long long rc = static_cast<long long>(r) * c % size;
      const double phase = -2.0 * M_PI * static_cast<double>(rc) / size;
      op.matrix(r, c) = scale * cxd(std::cos(phase), std::sin(phase));
    }
  }
  return op;
}

FreqChannelBlock freq_from_taps(const std::vector<Eigen::MatrixXcd>& taps, int subcarriers) {
  const int L = static_cast<int>(taps.size());
  if (L < 1) throw InvalidDimensionError("freq_from_taps: need at least one tap");
  if (L > subcarriers) {
    throw DelaySpreadError("freq_from_taps: delay spread " + std::to_string(L) +
                           " exceeds symbol length " + std::to_string(subcarriers));
  }
  const auto rows = taps[0].rows();
  const auto cols = taps[0].cols();
  for (const auto& h : taps) {
    if (h.rows() != rows || h.cols() != cols) {
      throw InvalidDimensionError("freq_from_taps: inconsistent tap dimensions");
    }
  }
  FreqChannelBlock out;
  out.block.resize(subcarriers);
  for (int k = 0; k < subcarriers; ++k) {
    Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(rows, cols);
    for (int l = 0; l < L; ++l) {
      const double phase = -2.0 * M_PI * static_cast<double>(k) * l / subcarriers;
      g += taps[l] * cxd(std::cos(phase), std::sin(phase));
    }
    out.block[k] = std::move(g);
  }
  return out;
}

Eigen::VectorXcd ofdm_modulate(const Eigen::VectorXcd& freq_symbols, int subcarriers,
                               int per_slot) {
  if (subcarriers < 1 || per_slot < 1 ||
      freq_symbols.size() != static_cast<Eigen::Index>(subcarriers) * per_slot) {
    throw InvalidDimensionError("ofdm_modulate: expected length " +
                                std::to_string(static_cast<long long>(subcarriers) * per_slot) +
                                ", got " + std::to_string(freq_symbols.size()));
  }
  Eigen::VectorXcd out(freq_symbols.size());
  const double scale = 1.0 / std::sqrt(static_cast<double>(subcarriers));
  for (int n = 0; n < subcarriers; ++n) {
    Eigen::VectorXcd slot = Eigen::VectorXcd::Zero(per_slot);
    for (int k = 0; k < subcarriers; ++k) {
      const long long nk = static_cast<long long>(n) * k % subcarriers;
      const double phase = 2.0 * M_PI * static_cast<double>(nk) / subcarriers;
      slot += cxd(std::cos(phase), std::sin(phase)) * freq_symbols.segment(k * per_slot, per_slot);
    }
    out.segment(n * per_slot, per_slot) = scale * slot;
  }
  return out;
}

Eigen::VectorXd time_diag_collapse(const std::vector<Eigen::MatrixXcd>& blocks) {
  if (blocks.empty()) throw InvalidDimensionError("time_diag_collapse: no blocks");
  const auto n = blocks[0].rows();
  Eigen::VectorXd delta = Eigen::VectorXd::Zero(n);
  for (const auto& a : blocks) {
    if (a.rows() != n || a.cols() != n) {
      throw InvalidDimensionError("time_diag_collapse: blocks must be square and same size");
    }
    delta += a.diagonal().real();
  }
  return delta / static_cast<double>(blocks.size());
}

}  // namespace qcomp
