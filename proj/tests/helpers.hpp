#pragma once

// Shared test utilities: dense OFDM-operator oracles and hand-built channel
// realizations. The dense path materializes the stacked DFT operators that the
// library never forms, so agreement is an independent check of the collapse
// identities.

#include <Eigen/Dense>
#include <vector>

#include "qcomp/dual.hpp"
#include "qcomp/network.hpp"
#include "qcomp/ofdm.hpp"

namespace qcomp::test {

inline Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    for (Eigen::Index c = 0; c < a.cols(); ++c) {
      out.block(r * b.rows(), c * b.cols(), b.rows(), b.cols()) = a(r, c) * b;
    }
  }
  return out;
}

/// Stacked per-antenna DFT operator W_DFT (x) I_n, materialized.
inline Eigen::MatrixXcd dense_psi(int subcarriers, int n) {
  return kron(build_dft(subcarriers).matrix,
              Eigen::MatrixXcd::Identity(n, n));
}

/// Row-selector slice of the stacked operator for one subcarrier.
inline Eigen::MatrixXcd dense_psi_k(int subcarriers, int n, int k) {
  return dense_psi(subcarriers, n).middleRows(static_cast<Eigen::Index>(k) * n, n);
}

/// Unit-scale multicell channels from i.i.d. taps; direct links have gain 1,
/// cross links are scaled by cross_scale in amplitude.
inline ChannelRealization random_channels(Rng& rng, int n_cells, int n_users, int n_antennas,
                                          int subcarriers, int taps_L,
                                          double cross_scale = 1.0) {
  ChannelRealization ch;
  ch.n_cells = n_cells;
  ch.n_users = n_users;
  ch.n_antennas = n_antennas;
  ch.subcarriers = subcarriers;
  ch.taps_L = taps_L;
  ch.taps.resize(static_cast<std::size_t>(n_cells) * n_cells);
  ch.large_scale.assign(ch.taps.size(), Eigen::VectorXd::Ones(n_users));
  const double scale = 1.0 / std::sqrt(static_cast<double>(taps_L));
  for (int j = 0; j < n_cells; ++j) {
    for (int i = 0; i < n_cells; ++i) {
      auto& pair_taps = ch.taps[static_cast<std::size_t>(ch.pair_index(j, i))];
      const double link_scale = scale * (j == i ? 1.0 : cross_scale);
      pair_taps.resize(static_cast<std::size_t>(taps_L));
      for (auto& h : pair_taps) {
        h.resize(n_antennas, n_users);
        for (int r = 0; r < n_antennas; ++r) {
          for (int c = 0; c < n_users; ++c) h(r, c) = link_scale * rng.cgaussian();
        }
      }
      if (j != i) {
        ch.large_scale[static_cast<std::size_t>(ch.pair_index(j, i))] =
            Eigen::VectorXd::Constant(n_users, cross_scale * cross_scale);
      }
    }
  }
  ch.rebuild_freq();
  return ch;
}

/// Flat (single-tap) realization with explicitly chosen per-pair channels.
inline ChannelRealization flat_channels(int n_cells, int n_users,
                                        const std::vector<Eigen::MatrixXcd>& g_per_pair,
                                        int subcarriers = 1) {
  ChannelRealization ch;
  ch.n_cells = n_cells;
  ch.n_users = n_users;
  ch.n_antennas = static_cast<int>(g_per_pair.at(0).rows());
  ch.subcarriers = subcarriers;
  ch.taps_L = 1;
  ch.taps.resize(g_per_pair.size());
  ch.large_scale.assign(g_per_pair.size(), Eigen::VectorXd::Ones(n_users));
  for (std::size_t p = 0; p < g_per_pair.size(); ++p) ch.taps[p] = {g_per_pair[p]};
  ch.rebuild_freq();
  return ch;
}

/// Virtual-uplink interference-plus-noise matrix built the slow way, straight
/// from the stacked operators: Z = a^2 sum_{(j,v)!=(i,u)} lam g g^H + a^2 D
/// + a b Psi(k) diag(Psi^H (G Lam G^H + I_K x D) Psi) Psi^H(k).
inline Eigen::MatrixXcd dense_Z(int cell, int user, int subcarrier, const DualState& state,
                                const ChannelRealization& ch, double alpha, double beta) {
  const int nc = ch.n_cells, nu = ch.n_users, nb = ch.n_antennas, nk = ch.subcarriers;
  Eigen::MatrixXcd z = Eigen::MatrixXcd::Zero(nb, nb);
  for (int j = 0; j < nc; ++j) {
    for (int v = 0; v < nu; ++v) {
      if (j == cell && v == user) continue;
      const double lam = state.lambda[link_index(j, v, subcarrier, nu, nk)];
      const Eigen::VectorXcd g = ch.g(cell, j, v, subcarrier);
      z += (alpha * alpha * lam) * (g * g.adjoint());
    }
  }
  z += (alpha * alpha) * state.D[cell].asDiagonal().toDenseMatrix().cast<cxd>();

  if (beta > 0.0) {
    // Stacked lambda-weighted covariance plus the noise block, materialized.
    Eigen::MatrixXcd stacked = Eigen::MatrixXcd::Zero(nk * nb, nk * nb);
    for (int k = 0; k < nk; ++k) {
      Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(nb, nb);
      for (int j = 0; j < nc; ++j) {
        for (int v = 0; v < nu; ++v) {
          const double lam = state.lambda[link_index(j, v, k, nu, nk)];
          const Eigen::VectorXcd g = ch.g(cell, j, v, k);
          a += lam * (g * g.adjoint());
        }
      }
      a += state.D[cell].asDiagonal().toDenseMatrix().cast<cxd>();
      stacked.block(k * nb, k * nb, nb, nb) = a;
    }
    const Eigen::MatrixXcd psi = dense_psi(nk, nb);
    const Eigen::MatrixXcd psik = dense_psi_k(nk, nb, subcarrier);
    const Eigen::MatrixXcd inner = psi.adjoint() * stacked * psi;
    z += (alpha * beta) * psik *
         inner.diagonal().asDiagonal().toDenseMatrix() * psik.adjoint();
  }
  return z;
}

}  // namespace qcomp::test
