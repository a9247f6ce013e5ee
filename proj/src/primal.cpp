#include "qcomp/primal.hpp"

#include <cmath>

namespace qcomp {

BeamformerSet BeamformerSet::zero(int n_cells, int n_users, int n_antennas, int subcarriers) {
  BeamformerSet b;
  b.n_cells = n_cells;
  b.n_users = n_users;
  b.n_antennas = n_antennas;
  b.subcarriers = subcarriers;
  b.w.assign(static_cast<std::size_t>(b.links()), Eigen::VectorXcd::Zero(n_antennas));
  return b;
}

std::vector<Eigen::MatrixXcd> BeamformerSet::cell_blocks(int cell) const {
  std::vector<Eigen::MatrixXcd> blocks(subcarriers);
  for (int k = 0; k < subcarriers; ++k) {
    Eigen::MatrixXcd wk(n_antennas, n_users);
    for (int u = 0; u < n_users; ++u) wk.col(u) = at(cell, u, k);
    blocks[k] = std::move(wk);
  }
  return blocks;
}

Eigen::MatrixXd assemble_sigma(const EqualizerSet& f, const ChannelRealization& channels,
                               const std::vector<double>& sqinr_targets,
                               const QuantizerSpec& spec) {
  const int nc = f.n_cells, nu = f.n_users, nk = f.subcarriers, nb = f.n_antennas;
  if (channels.n_cells != nc || channels.n_users != nu || channels.subcarriers != nk ||
      channels.n_antennas != nb) {
    throw InvalidDimensionError("assemble_sigma: equalizers and channels disagree");
  }
  if (static_cast<int>(sqinr_targets.size()) != f.links()) {
    throw InvalidDimensionError("assemble_sigma: wrong number of SQINR targets");
  }
  const double a2 = spec.alpha * spec.alpha;
  const double ab = spec.alpha * spec.beta;
  const int n = f.links();
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(n, n);

  // |f_{j,v,m}(l)|^2, reused across rows.
  std::vector<Eigen::VectorXd> fmag2(static_cast<std::size_t>(n));
  for (int idx = 0; idx < n; ++idx) fmag2[idx] = f.w[idx].cwiseAbs2();

  for (int i = 0; i < nc; ++i) {
    for (int u = 0; u < nu; ++u) {
      for (int k = 0; k < nk; ++k) {
        const int row = f.index(i, u, k);
        for (int j = 0; j < nc; ++j) {
          const Eigen::VectorXcd g = channels.g(j, i, u, k);
          const Eigen::VectorXd gmag2 = g.cwiseAbs2();
          for (int v = 0; v < nu; ++v) {
            // Same-subcarrier signal/interference terms.
            {
              const int col = f.index(j, v, k);
              const double cross = std::norm(g.dot(f.w[col]));  // |g^H f|^2
              sigma(row, col) += (j == i && v == u)
                                     ? a2 / sqinr_targets[row] * cross
                                     : -a2 * cross;
            }
            // Quantization coupling: every subcarrier of (j, v) leaks onto
            // this link through the per-antenna collapse.
            if (ab > 0.0) {
              for (int l = 0; l < nk; ++l) {
                const int col = f.index(j, v, l);
                sigma(row, col) -= ab / nk * gmag2.dot(fmag2[col]);
              }
            }
          }
        }
      }
    }
  }
  return sigma;
}

Eigen::VectorXd solve_tau(const Eigen::MatrixXd& sigma, double noise_power_w) {
  return solve_tau(sigma,
                   Eigen::VectorXd::Constant(sigma.rows(), noise_power_w).eval());
}

Eigen::VectorXd solve_tau(const Eigen::MatrixXd& sigma, const Eigen::VectorXd& noise_per_link) {
  if (sigma.rows() != sigma.cols() || sigma.rows() != noise_per_link.size()) {
    throw InvalidDimensionError("solve_tau: dimension mismatch");
  }
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(sigma);
  const Eigen::VectorXd tau = lu.solve(noise_per_link);
  const double rhs_scale = noise_per_link.norm();
  if (!tau.allFinite() || (sigma * tau - noise_per_link).norm() > 1e-8 * rhs_scale) {
    throw DegenerateDualityError("solve_tau: coupling matrix is singular or ill-conditioned");
  }
  for (Eigen::Index r = 0; r < tau.size(); ++r) {
    if (!(tau[r] > 0.0)) {
      throw InvalidScalingError("solve_tau: nonpositive scaling at link " + std::to_string(r) +
                                " (dual state not at its fixed point)");
    }
  }
  return tau;
}

BeamformerSet build_beamformers(const EqualizerSet& f, const Eigen::VectorXd& tau) {
  if (tau.size() != static_cast<Eigen::Index>(f.w.size())) {
    throw InvalidDimensionError("build_beamformers: tau size mismatch");
  }
  BeamformerSet out = f;
  for (std::size_t idx = 0; idx < out.w.size(); ++idx) {
    out.w[idx] *= std::sqrt(tau[static_cast<Eigen::Index>(idx)]);
  }
  return out;
}

std::vector<double> evaluate_sqinr(const BeamformerSet& W, const ChannelRealization& channels,
                                   const QuantizerSpec& spec, double noise_power_w) {
  return evaluate_sqinr(W, channels, spec,
                        Eigen::VectorXd::Constant(W.links(), noise_power_w).eval());
}

std::vector<double> evaluate_sqinr(const BeamformerSet& W, const ChannelRealization& channels,
                                   const QuantizerSpec& spec,
                                   const Eigen::VectorXd& noise_per_link) {
  const int nc = W.n_cells, nu = W.n_users, nk = W.subcarriers;
  if (channels.n_cells != nc || channels.n_users != nu || channels.subcarriers != nk) {
    throw InvalidDimensionError("evaluate_sqinr: beamformers and channels disagree");
  }
  if (noise_per_link.size() != W.links()) {
    throw InvalidDimensionError("evaluate_sqinr: wrong noise vector length");
  }
  const double a2 = spec.alpha * spec.alpha;

  // Per-antenna quantization noise of each transmitting cell.
  std::vector<Eigen::VectorXd> qdiag(static_cast<std::size_t>(nc));
  for (int j = 0; j < nc; ++j) qdiag[j] = quant_noise_diag(W.cell_blocks(j), spec);

  std::vector<double> gamma(static_cast<std::size_t>(W.links()), 0.0);
  for (int i = 0; i < nc; ++i) {
    for (int u = 0; u < nu; ++u) {
      for (int k = 0; k < nk; ++k) {
        const int idx = W.index(i, u, k);
        double signal = 0.0, interference = 0.0, quant = 0.0;
        for (int j = 0; j < nc; ++j) {
          const Eigen::VectorXcd g = channels.g(j, i, u, k);
          for (int v = 0; v < nu; ++v) {
            const double cross = std::norm(g.dot(W.at(j, v, k)));
            if (j == i && v == u) {
              signal = a2 * cross;
            } else {
              interference += a2 * cross;
            }
          }
          if (!spec.is_infinite()) quant += g.cwiseAbs2().dot(qdiag[j]);
        }
        const double denom = interference + quant + noise_per_link[idx];
        gamma[static_cast<std::size_t>(idx)] = (signal == 0.0) ? 0.0 : signal / denom;
      }
    }
  }
  return gamma;
}

SqinrPowerReport antenna_powers(const BeamformerSet& W, const QuantizerSpec& spec) {
  SqinrPowerReport rep;
  rep.antenna_power_w = Eigen::MatrixXd::Zero(W.n_cells, W.n_antennas);
  for (int i = 0; i < W.n_cells; ++i) {
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(W.n_antennas);
    for (int u = 0; u < W.n_users; ++u) {
      for (int k = 0; k < W.subcarriers; ++k) acc += W.at(i, u, k).cwiseAbs2();
    }
    rep.antenna_power_w.row(i) = (spec.alpha / W.subcarriers) * acc.transpose();
  }
  rep.p0_w = rep.antenna_power_w.maxCoeff();
  rep.total_power_w = rep.antenna_power_w.sum();
  return rep;
}

}  // namespace qcomp
