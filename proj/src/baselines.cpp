#include "qcomp/baselines.hpp"

#include <cmath>

namespace qcomp {

namespace {

// Fills the report of a per-cell result from a full-system evaluation of the
// stitched beamformers.
BaselineResult finish_percell(BaselineResult out, const SystemConfig& config,
                              const ChannelRealization& channels, const QuantizerSpec& spec) {
  const SqinrPowerReport powers = antenna_powers(out.beamformers, spec);
  out.report.p0_w = powers.p0_w;
  out.report.p0_dbm = powers.p0_w > 0 ? watts_to_dbm(powers.p0_w) : -300.0;
  out.report.total_power_w = powers.total_power_w;
  out.report.total_power_dbm =
      powers.total_power_w > 0 ? watts_to_dbm(powers.total_power_w) : -300.0;
  out.report.antenna_power_w = powers.antenna_power_w;
  out.report.converged = out.converged;
  out.report.outer_iterations = out.outer_iterations;
  out.report.sqinr_target = config.sqinr_targets;
  out.report.sqinr_achieved =
      evaluate_sqinr(out.beamformers, channels, spec, config.noise_power_w);
  return out;
}

}  // namespace

std::string algorithm_name(AlgorithmId id) {
  switch (id) {
    case AlgorithmId::kQcompPa: return "qcomp_pa";
    case AlgorithmId::kQcomp: return "qcomp";
    case AlgorithmId::kQpercell: return "qpercell";
    case AlgorithmId::kSocpOracle: return "socp_oracle";
  }
  return "unknown";
}

AlgorithmId algorithm_from_name(const std::string& name) {
  if (name == "qcomp_pa") return AlgorithmId::kQcompPa;
  if (name == "qcomp") return AlgorithmId::kQcomp;
  if (name == "qpercell") return AlgorithmId::kQpercell;
  if (name == "socp_oracle") return AlgorithmId::kSocpOracle;
  throw InvalidParameterError("unknown algorithm '" + name + "'");
}

BaselineResult run_qcomp(const SystemConfig& config, const ChannelRealization& channels,
                         const SolverSettings& settings) {
  SolveResult res = run_minimax_core(
      config, channels, settings,
      Eigen::VectorXd::Constant(config.links(), config.noise_power_w).eval(),
      /*max_d_updates=*/0);
  BaselineResult out;
  out.algorithm = AlgorithmId::kQcomp;
  out.beamformers = std::move(res.beamformers);
  out.report = std::move(res.report);
  out.converged = out.report.converged;
  out.outer_iterations = out.report.outer_iterations;
  return out;
}

BaselineResult run_qpercell(const SystemConfig& config, const ChannelRealization& channels,
                            const SolverSettings& settings) {
  config.validate();
  const QuantizerSpec spec = quant_gain(config.bits);
  const int nc = config.n_cells, nu = config.n_users, nk = config.subcarriers;

  // Per-cell views of the network and of the target vector.
  std::vector<ChannelRealization> cell_channels(static_cast<std::size_t>(nc));
  std::vector<SystemConfig> cell_config(static_cast<std::size_t>(nc));
  for (int i = 0; i < nc; ++i) {
    cell_channels[i] = extract_cell(channels, i);
    SystemConfig cc = config;
    cc.n_cells = 1;
    cc.sqinr_targets.assign(
        config.sqinr_targets.begin() + config.index(i, 0, 0),
        config.sqinr_targets.begin() + config.index(i, 0, 0) + nu * nk);
    cell_config[i] = std::move(cc);
  }

  BeamformerSet W = BeamformerSet::zero(nc, nu, config.n_antennas, nk);
  BaselineResult out;
  out.algorithm = AlgorithmId::kQpercell;

  Eigen::VectorXd prev_cell_p0 = Eigen::VectorXd::Zero(nc);
  bool converged = false;
  int round = 0;
  for (; round < settings.percell_max_rounds && !converged; ++round) {
    // Noise floors per user from the other cells' current solutions.
    std::vector<Eigen::VectorXd> qdiag(static_cast<std::size_t>(nc));
    for (int j = 0; j < nc; ++j) qdiag[j] = quant_noise_diag(W.cell_blocks(j), spec);

    BeamformerSet W_next = BeamformerSet::zero(nc, nu, config.n_antennas, nk);
    Eigen::VectorXd cell_p0(nc);
    for (int i = 0; i < nc; ++i) {
      Eigen::VectorXd noise(nu * nk);
      for (int u = 0; u < nu; ++u) {
        for (int k = 0; k < nk; ++k) {
          double floor = config.noise_power_w;
          for (int j = 0; j < nc; ++j) {
            if (j == i) continue;
            const Eigen::VectorXcd g = channels.g(j, i, u, k);
            for (int v = 0; v < nu; ++v) {
              floor += spec.alpha * spec.alpha * std::norm(g.dot(W.at(j, v, k)));
            }
            if (!spec.is_infinite()) floor += g.cwiseAbs2().dot(qdiag[j]);
          }
          noise[u * nk + k] = floor;
        }
      }
      if (!noise.allFinite()) {
        out.converged = false;
        out.outer_iterations = round;
        out.beamformers = W;
        out.report.stop_reason = "per-cell interference diverged";
        return finish_percell(out, config, channels, spec);
      }
      // Per-cell total-power subproblem (identity virtual noise covariance,
      // no ascent), matching the classic per-cell beamforming/power-control
      // iteration this baseline stands in for.
      SolveResult res = run_minimax_core(cell_config[i], cell_channels[i], settings, noise,
                                         /*max_d_updates=*/0);
      cell_p0[i] = res.report.p0_w;
      for (int u = 0; u < nu; ++u)
        for (int k = 0; k < nk; ++k) W_next.at(i, u, k) = res.beamformers.at(0, u, k);
    }
    W = std::move(W_next);

    double change = 0.0;
    for (int i = 0; i < nc; ++i) {
      change = std::max(change, std::abs(cell_p0[i] - prev_cell_p0[i]) /
                                    std::max(cell_p0[i], 1e-300));
    }
    prev_cell_p0 = cell_p0;
    converged = round > 0 && change <= settings.percell_tol;
  }

  out.converged = converged;
  out.outer_iterations = round;
  out.beamformers = std::move(W);
  out.report.stop_reason = converged ? "interference fixed point" : "round cap (divergent)";
  return finish_percell(out, config, channels, spec);
}

BaselineResult socp_oracle(const SystemConfig& config, const ChannelRealization& channels,
                           SocpObjective objective) {
  SocpResult res = socp_solve(config, channels, objective);
  BaselineResult out;
  out.algorithm = AlgorithmId::kSocpOracle;
  out.beamformers = std::move(res.beamformers);
  out.converged = true;
  out.outer_iterations = res.newton_steps;
  const QuantizerSpec spec = quant_gain(config.bits);
  const SqinrPowerReport powers = antenna_powers(out.beamformers, spec);
  out.report.p0_w = powers.p0_w;
  out.report.p0_dbm = watts_to_dbm(powers.p0_w);
  out.report.total_power_w = powers.total_power_w;
  out.report.total_power_dbm = watts_to_dbm(powers.total_power_w);
  out.report.antenna_power_w = powers.antenna_power_w;
  out.report.converged = true;
  out.report.stop_reason = "barrier gap closed";
  out.report.outer_iterations = res.newton_steps;
  out.report.sqinr_target = config.sqinr_targets;
  out.report.sqinr_achieved =
      evaluate_sqinr(out.beamformers, channels, spec, config.noise_power_w);
  return out;
}

}  // namespace qcomp
