#pragma once

#include <Eigen/Dense>
#include <limits>
#include <string>
#include <vector>

#include "qcomp/config.hpp"
#include "qcomp/network.hpp"
#include "qcomp/primal.hpp"
#include "qcomp/quantizer.hpp"

namespace qcomp {

/// Virtual-uplink dual variables: per-link transmit powers lambda and per-cell
/// diagonal noise covariances D (entries >= 0; the traces share the network
/// budget sum_i tr(D_i) <= N_c * N_b, which the boundedness of the scaled
/// primal objective forces -- a per-cell cap cannot close the duality gap
/// when the cells' peak powers differ).
struct DualState {
  Eigen::VectorXd lambda;          // [link_index]
  std::vector<Eigen::VectorXd> D;  // [cell], length N_b

  static DualState initial(int n_cells, int n_users, int n_antennas, int subcarriers);
};

enum class StepMode {
  kConstant,   // fixed eta
  kSqrtDecay,  // eta / sqrt(n+1)
  kPolyak,     // (upper_bound - f_n) / |ascent direction|^2, scale-free
};

struct SolverSettings {
  double lambda_tol = 1e-9;      // relative fixed-point residual
  int lambda_max_iters = 500;    // sweeps per inner solve
  double d_tol = 1e-5;           // outer stationarity (D and p0 change)
  int d_max_iters = 5000;        // max noise-covariance updates
  double step_size = 0.0;        // constant/sqrt base; <= 0 auto-scales from the first ascent step
  StepMode step_mode = StepMode::kPolyak;
  double polyak_relax = 3.0;     // step scale on the midpoint level target
  double lambda_cap = 0.0;       // divergence guard; <= 0 auto: 1e12 x max gamma/(alpha |g_direct|^2)
  double projection_tol = 1e-10;
  double duality_gap_tol = 2e-3;  // primal-dual gap stop
  bool jacobi_lambda = false;     // default: Gauss-Seidel sweeps in (i, u, k) order
  int percell_max_rounds = 100;   // interference fixed-point rounds (limited coordination)
  double percell_tol = 1e-6;      // relative per-cell p0 change at the fixed point
};

struct SolveReport {
  double p0_w = 0.0;
  double p0_dbm = 0.0;
  double total_power_w = 0.0;
  double total_power_dbm = 0.0;
  double dual_objective = 0.0;  // best lower bound on K*N_c*N_b*p0
  double duality_gap_rel = std::numeric_limits<double>::infinity();
  bool converged = false;
  std::string stop_reason;
  int outer_iterations = 0;
  long long lambda_sweeps = 0;
  std::vector<double> lambda;  // dual powers at the best dual iterate
  std::vector<double> sqinr_target;
  std::vector<double> sqinr_achieved;   // for the returned beamformers
  Eigen::MatrixXd antenna_power_w;      // n_cells x n_antennas
};

struct SolveResult {
  BeamformerSet beamformers;
  DualState dual;
  SolveReport report;
};

/// Virtual-uplink covariance K_{i,k} = D_i + alpha sum_{j,v} lambda_{j,v}(k) g g^H
/// + beta * Delta_lambda, with the beta term the per-antenna collapse of the
/// stacked lambda-weighted channel covariance (time_diag_collapse).
Eigen::MatrixXcd assemble_K(int cell, int subcarrier, const DualState& state,
                            const ChannelRealization& channels, const QuantizerSpec& spec);

/// MMSE equalizer f = Z^{-1} g of the virtual uplink; Z accumulates the
/// other-link interference, the scaled noise covariance and the quantization
/// collapse. Throws SingularSystemError naming (cell, user, subcarrier) when Z
/// is not invertible.
Eigen::VectorXcd mmse_equalizer(int cell, int user, int subcarrier, const DualState& state,
                                const ChannelRealization& channels, const QuantizerSpec& spec);

/// Virtual-uplink SQINR attained by the MMSE equalizer:
/// alpha^2 lambda g^H Z^{-1} g.
double virtual_sqinr(int cell, int user, int subcarrier, const DualState& state,
                     const ChannelRealization& channels, const QuantizerSpec& spec);

/// Iterates lambda <- 1 / (alpha (1 + 1/gamma) g^H K^{-1} g) to its fixed
/// point for the state's (fixed) D. Throws InfeasibleTargetError when any
/// lambda exceeds the divergence cap, NoConvergenceError at the sweep cap.
void lambda_fixed_point(DualState& state, const ChannelRealization& channels,
                        const std::vector<double>& sqinr_targets, const QuantizerSpec& spec,
                        const SolverSettings& settings);

/// Ascent direction for the dual noise covariance: diag(sum_{u,k} w w^H) of
/// the given cell's recovered beamformers.
Eigen::VectorXd subgradient_D(int cell, const BeamformerSet& beamformers);

/// Alternating projections onto { D diagonal : D >= 0, tr(D) <= N_b }:
/// hyperplane shift whenever the trace budget is exceeded, then clamp at zero,
/// repeated until both constraints hold within tol.
Eigen::VectorXd project_feasible_D(Eigen::VectorXd d, double projection_tol = 1e-10);

/// Full minimax solve (per-antenna power objective): inner lambda fixed point,
/// equalizer and beamformer recovery, projected subgradient ascent on the
/// noise covariances, until the primal-dual gap closes.
SolveResult run_qcomp_pa(const SystemConfig& config, const ChannelRealization& channels,
                         const SolverSettings& settings = {});

/// Generalized entry used by the baselines: per-link noise floors (the
/// per-cell decompositions inflate these with inter-cell terms) and an
/// explicit bound on the number of D updates. `max_d_updates = 0` keeps the
/// initial D = I fixed, which turns the solve into total-power minimization.
SolveResult run_minimax_core(const SystemConfig& config, const ChannelRealization& channels,
                             const SolverSettings& settings,
                             const Eigen::VectorXd& noise_per_link, int max_d_updates);

}  // namespace qcomp
