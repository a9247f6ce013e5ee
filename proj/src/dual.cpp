#include "qcomp/dual.hpp"

#include <algorithm>
#include <cmath>

#include "qcomp/ofdm.hpp"

namespace qcomp {

namespace {

// Flattened per-(cell, subcarrier) channel tables. Column (j*N_u + v) of
// gcols[i*K + k] is g_{i,j,v}(k): the channel at BS_i toward virtual user
// (j, v) on subcarrier k.
struct LinkCache {
  int nc = 0, nu = 0, nb = 0, nk = 0;
  double alpha = 1.0, beta = 0.0;
  std::vector<Eigen::MatrixXcd> gcols;
  std::vector<Eigen::MatrixXd> gmag2;

  LinkCache(const ChannelRealization& ch, const QuantizerSpec& spec) {
    nc = ch.n_cells;
    nu = ch.n_users;
    nb = ch.n_antennas;
    nk = ch.subcarriers;
    alpha = spec.alpha;
    beta = spec.beta;
    gcols.resize(static_cast<std::size_t>(nc) * nk);
    gmag2.resize(gcols.size());
    for (int i = 0; i < nc; ++i) {
      for (int k = 0; k < nk; ++k) {
        Eigen::MatrixXcd cols(nb, nc * nu);
        for (int j = 0; j < nc; ++j) {
          cols.middleCols(j * nu, nu) = ch.G(i, j, k);
        }
        gmag2[static_cast<std::size_t>(i) * nk + k] = cols.cwiseAbs2();
        gcols[static_cast<std::size_t>(i) * nk + k] = std::move(cols);
      }
    }
  }

  const Eigen::MatrixXcd& cols(int i, int k) const {
    return gcols[static_cast<std::size_t>(i) * nk + k];
  }
  const Eigen::MatrixXd& mag2(int i, int k) const {
    return gmag2[static_cast<std::size_t>(i) * nk + k];
  }
};

// Working copy of lambda laid out (N_c*N_u) x K, plus the per-cell collapse
// accumulators colLam[i][m] = (1/K) sum_{k,j,v} lambda_{j,v}(k) |g_{i,j,v,m}(k)|^2.
struct LambdaWork {
  Eigen::MatrixXd lam;                  // (nc*nu) x nk
  std::vector<Eigen::VectorXd> collam;  // [cell], length nb

  LambdaWork(const LinkCache& c, const Eigen::VectorXd& flat) {
    lam.resize(c.nc * c.nu, c.nk);
    for (int j = 0; j < c.nc; ++j)
      for (int v = 0; v < c.nu; ++v)
        for (int k = 0; k < c.nk; ++k)
          lam(j * c.nu + v, k) = flat[link_index(j, v, k, c.nu, c.nk)];
    rebuild_collapse(c);
  }

  void rebuild_collapse(const LinkCache& c) {
    collam.assign(static_cast<std::size_t>(c.nc), Eigen::VectorXd::Zero(c.nb));
    for (int i = 0; i < c.nc; ++i) {
      for (int k = 0; k < c.nk; ++k) collam[i] += c.mag2(i, k) * lam.col(k);
      collam[i] /= static_cast<double>(c.nk);
    }
  }

  void apply_delta(const LinkCache& c, int col, int k, double delta) {
    lam(col, k) += delta;
    const double d = delta / c.nk;
    for (int i = 0; i < c.nc; ++i) collam[i] += d * c.mag2(i, k).col(col);
  }

  void write_back(const LinkCache& c, Eigen::VectorXd& flat) const {
    for (int j = 0; j < c.nc; ++j)
      for (int v = 0; v < c.nu; ++v)
        for (int k = 0; k < c.nk; ++k)
          flat[link_index(j, v, k, c.nu, c.nk)] = lam(j * c.nu + v, k);
  }
};

Eigen::MatrixXcd assemble_K_cached(const LinkCache& c, const LambdaWork& work,
                                   const Eigen::VectorXd& d_i, int i, int k) {
  Eigen::MatrixXcd kmat = c.cols(i, k) * (c.alpha * work.lam.col(k)).asDiagonal() *
                          c.cols(i, k).adjoint();
  kmat.diagonal() += (d_i + c.beta * work.collam[i]).cast<cxd>();
  return kmat;
}

Eigen::MatrixXcd build_Z_cached(const LinkCache& c, const LambdaWork& work,
                                const Eigen::VectorXd& d_i, int i, int self_col, int k) {
  const double a2 = c.alpha * c.alpha;
  Eigen::VectorXd lamk = work.lam.col(k);
  lamk[self_col] = 0.0;  // other virtual users only
  Eigen::MatrixXcd z = c.cols(i, k) * (a2 * lamk).asDiagonal() * c.cols(i, k).adjoint();
  z.diagonal() += (c.alpha * d_i + c.alpha * c.beta * work.collam[i]).cast<cxd>();
  return z;
}

// Hermitian solve with a one-shot ridge retry; `what` names the call site in
// the singular-system error.
Eigen::VectorXcd solve_hermitian(Eigen::MatrixXcd a, const Eigen::VectorXcd& rhs,
                                 const std::string& what) {
  Eigen::LLT<Eigen::MatrixXcd> llt(a);
  if (llt.info() == Eigen::Success) {
    Eigen::VectorXcd x = llt.solve(rhs);
    if (x.allFinite()) return x;
  }
  const double ridge = 1e-14 * std::max(1e-300, a.diagonal().real().maxCoeff());
  a.diagonal().array() += ridge;
  llt.compute(a);
  if (llt.info() == Eigen::Success) {
    Eigen::VectorXcd x = llt.solve(rhs);
    if (x.allFinite()) return x;
  }
  throw SingularSystemError(what);
}

double auto_lambda_cap(const LinkCache& c, const std::vector<double>& targets) {
  double cap_scale = 0.0;
  for (int i = 0; i < c.nc; ++i) {
    for (int u = 0; u < c.nu; ++u) {
      for (int k = 0; k < c.nk; ++k) {
        const double g2 = c.mag2(i, k).col(i * c.nu + u).sum();
        if (g2 > 0.0) {
          const double gamma = targets[link_index(i, u, k, c.nu, c.nk)];
          cap_scale = std::max(cap_scale, gamma / (c.alpha * g2));
        }
      }
    }
  }
  if (cap_scale == 0.0) cap_scale = 1.0;
  return 1e12 * cap_scale;
}

// One pass over all links. Gauss-Seidel applies each update immediately in
// (i, u, k) order; Jacobi evaluates the whole sweep from the entry snapshot.
double lambda_sweep(const LinkCache& c, LambdaWork& work, const std::vector<Eigen::VectorXd>& D,
                    const std::vector<double>& targets, double cap, bool jacobi) {
  double max_rel = 0.0;
  auto update_target = [&](int i, int u, int k, double lam_new) {
    const int col = i * c.nu + u;
    if (!(lam_new >= 0.0) || lam_new > cap) {
      throw InfeasibleTargetError(
          "lambda_fixed_point: virtual power diverged at (cell " + std::to_string(i) +
          ", user " + std::to_string(u) + ", subcarrier " + std::to_string(k) +
          "): SQINR target exceeds the quantization/interference ceiling");
    }
    const double old = work.lam(col, k);
    max_rel = std::max(max_rel, std::abs(lam_new - old) / std::max(lam_new, 1e-300));
    return lam_new;
  };

  if (!jacobi) {
    for (int i = 0; i < c.nc; ++i) {
      for (int u = 0; u < c.nu; ++u) {
        const int col = i * c.nu + u;
        for (int k = 0; k < c.nk; ++k) {
          const Eigen::MatrixXcd kmat = assemble_K_cached(c, work, D[i], i, k);
          const Eigen::VectorXcd g = c.cols(i, k).col(col);
          const Eigen::VectorXcd x =
              solve_hermitian(kmat, g, "lambda_fixed_point: singular K matrix");
          const double quad = std::max(g.dot(x).real(), 1e-300);
          const double gamma = targets[link_index(i, u, k, c.nu, c.nk)];
          const double lam_new = 1.0 / (c.alpha * (1.0 + 1.0 / gamma) * quad);
          work.apply_delta(c, col, k, update_target(i, u, k, lam_new) - work.lam(col, k));
        }
      }
    }
  } else {
    Eigen::MatrixXd next = work.lam;
    for (int i = 0; i < c.nc; ++i) {
      for (int k = 0; k < c.nk; ++k) {
        const Eigen::MatrixXcd kmat = assemble_K_cached(c, work, D[i], i, k);
        Eigen::LLT<Eigen::MatrixXcd> llt(kmat);
        if (llt.info() != Eigen::Success) {
          throw SingularSystemError("lambda_fixed_point: singular K matrix");
        }
        for (int u = 0; u < c.nu; ++u) {
          const int col = i * c.nu + u;
          const Eigen::VectorXcd g = c.cols(i, k).col(col);
          const double quad = std::max(g.dot(llt.solve(g)).real(), 1e-300);
          const double gamma = targets[link_index(i, u, k, c.nu, c.nk)];
          next(col, k) = update_target(i, u, k, 1.0 / (c.alpha * (1.0 + 1.0 / gamma) * quad));
        }
      }
    }
    work.lam = next;
    work.rebuild_collapse(c);
  }
  return max_rel;
}

long long lambda_fixed_point_cached(const LinkCache& c, LambdaWork& work,
                                    const std::vector<Eigen::VectorXd>& D,
                                    const std::vector<double>& targets,
                                    const SolverSettings& settings, double tol) {
  const double cap = settings.lambda_cap > 0.0 ? settings.lambda_cap
                                               : auto_lambda_cap(c, targets);
  double residual = std::numeric_limits<double>::infinity();
  for (int sweep = 1; sweep <= settings.lambda_max_iters; ++sweep) {
    residual = lambda_sweep(c, work, D, targets, cap, settings.jacobi_lambda);
    if (residual <= tol) return sweep;
  }
  throw NoConvergenceError("lambda_fixed_point: no convergence after " +
                           std::to_string(settings.lambda_max_iters) +
                           " sweeps (residual " + std::to_string(residual) + ")");
}

void check_state(const DualState& state, const ChannelRealization& ch) {
  const int links = ch.n_cells * ch.n_users * ch.subcarriers;
  if (state.lambda.size() != links || static_cast<int>(state.D.size()) != ch.n_cells) {
    throw InvalidDimensionError("DualState does not match the channel dimensions");
  }
  for (const auto& d : state.D) {
    if (d.size() != ch.n_antennas) {
      throw InvalidDimensionError("DualState noise covariance has wrong size");
    }
  }
}

}  // namespace

DualState DualState::initial(int n_cells, int n_users, int n_antennas, int subcarriers) {
  DualState s;
  s.lambda = Eigen::VectorXd::Zero(n_cells * n_users * subcarriers);
  s.D.assign(static_cast<std::size_t>(n_cells), Eigen::VectorXd::Ones(n_antennas));
  return s;
}

Eigen::MatrixXcd assemble_K(int cell, int subcarrier, const DualState& state,
                            const ChannelRealization& channels, const QuantizerSpec& spec) {
  check_state(state, channels);
  const int nc = channels.n_cells, nu = channels.n_users, nk = channels.subcarriers;

  Eigen::MatrixXcd kmat = state.D[cell].cast<cxd>().asDiagonal();
  for (int j = 0; j < nc; ++j) {
    for (int v = 0; v < nu; ++v) {
      const double lam = state.lambda[link_index(j, v, subcarrier, nu, nk)];
      if (lam != 0.0) {
        const Eigen::VectorXcd g = channels.g(cell, j, v, subcarrier);
        kmat.noalias() += (spec.alpha * lam) * (g * g.adjoint());
      }
    }
  }

  if (spec.beta > 0.0) {
    // Stacked lambda-weighted covariance, collapsed to its per-antenna diagonal.
    std::vector<Eigen::MatrixXcd> blocks(static_cast<std::size_t>(nk));
    for (int k = 0; k < nk; ++k) {
      Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(channels.n_antennas, channels.n_antennas);
      for (int j = 0; j < nc; ++j) {
        Eigen::VectorXd lamjk(nu);
        for (int v = 0; v < nu; ++v) lamjk[v] = state.lambda[link_index(j, v, k, nu, nk)];
        a.noalias() += channels.G(cell, j, k) * lamjk.asDiagonal() *
                       channels.G(cell, j, k).adjoint();
      }
      blocks[static_cast<std::size_t>(k)] = std::move(a);
    }
    kmat.diagonal() += (spec.beta * time_diag_collapse(blocks)).cast<cxd>();
  }
  // Symmetrize away accumulation roundoff.
  kmat = 0.5 * (kmat + kmat.adjoint()).eval();
  return kmat;
}

Eigen::VectorXcd mmse_equalizer(int cell, int user, int subcarrier, const DualState& state,
                                const ChannelRealization& channels, const QuantizerSpec& spec) {
  check_state(state, channels);
  const LinkCache cache(channels, spec);
  const LambdaWork work(cache, state.lambda);
  const Eigen::MatrixXcd z =
      build_Z_cached(cache, work, state.D[cell], cell, cell * cache.nu + user, subcarrier);
  const Eigen::VectorXcd g = channels.g(cell, cell, user, subcarrier);
  const std::string what = "mmse_equalizer: singular system at (cell " + std::to_string(cell) +
                           ", user " + std::to_string(user) + ", subcarrier " +
                           std::to_string(subcarrier) + ")";
  Eigen::VectorXcd f = solve_hermitian(z, g, what);
  if ((z * f - g).norm() > 1e-8 * std::max(g.norm(), 1e-300)) throw SingularSystemError(what);
  return f;
}

double virtual_sqinr(int cell, int user, int subcarrier, const DualState& state,
                     const ChannelRealization& channels, const QuantizerSpec& spec) {
  const Eigen::VectorXcd f = mmse_equalizer(cell, user, subcarrier, state, channels, spec);
  const Eigen::VectorXcd g = channels.g(cell, cell, user, subcarrier);
  const double lam =
      state.lambda[link_index(cell, user, subcarrier, channels.n_users, channels.subcarriers)];
  return spec.alpha * spec.alpha * lam * g.dot(f).real();
}

void lambda_fixed_point(DualState& state, const ChannelRealization& channels,
                        const std::vector<double>& sqinr_targets, const QuantizerSpec& spec,
                        const SolverSettings& settings) {
  check_state(state, channels);
  if (static_cast<int>(sqinr_targets.size()) != state.lambda.size()) {
    throw InvalidDimensionError("lambda_fixed_point: wrong number of SQINR targets");
  }
  const LinkCache cache(channels, spec);
  LambdaWork work(cache, state.lambda);
  lambda_fixed_point_cached(cache, work, state.D, sqinr_targets, settings,
                            settings.lambda_tol);
  work.write_back(cache, state.lambda);
}

Eigen::VectorXd subgradient_D(int cell, const BeamformerSet& beamformers) {
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(beamformers.n_antennas);
  for (int u = 0; u < beamformers.n_users; ++u) {
    for (int k = 0; k < beamformers.subcarriers; ++k) {
      acc += beamformers.at(cell, u, k).cwiseAbs2();
    }
  }
  return acc;
}

Eigen::VectorXd project_feasible_D(Eigen::VectorXd d, double projection_tol) {
  const double budget = static_cast<double>(d.size());
  for (int iter = 0; iter < 100000; ++iter) {
    const double excess = d.sum() - budget;
    if (excess > projection_tol) d.array() -= excess / budget;
    d = d.cwiseMax(0.0);
    if (d.sum() <= budget + projection_tol) break;
  }
  return d;
}

SolveResult run_qcomp_pa(const SystemConfig& config, const ChannelRealization& channels,
                         const SolverSettings& settings) {
  return run_minimax_core(
      config, channels, settings,
      Eigen::VectorXd::Constant(config.links(), config.noise_power_w).eval(),
      settings.d_max_iters);
}

SolveResult run_minimax_core(const SystemConfig& config, const ChannelRealization& channels,
                             const SolverSettings& settings,
                             const Eigen::VectorXd& noise_per_link, int max_d_updates) {
  config.validate();
  if (channels.n_cells != config.n_cells || channels.n_users != config.n_users ||
      channels.n_antennas != config.n_antennas || channels.subcarriers != config.subcarriers) {
    throw InvalidDimensionError("run_minimax_core: config and channels disagree");
  }
  if (noise_per_link.size() != config.links() || !(noise_per_link.minCoeff() > 0.0)) {
    throw InvalidParameterError("run_minimax_core: need a positive noise floor per link");
  }

  const QuantizerSpec spec = quant_gain(config.bits);
  const LinkCache cache(channels, spec);
  DualState state = DualState::initial(config.n_cells, config.n_users, config.n_antennas,
                                       config.subcarriers);
  LambdaWork work(cache, state.lambda);

  const double dual_scale = static_cast<double>(config.subcarriers) * config.n_cells *
                            config.n_antennas;  // K * N_c * N_b

  SolveResult result;
  SolveReport& rep = result.report;
  rep.sqinr_target = config.sqinr_targets;

  double best_p0 = std::numeric_limits<double>::infinity();
  double best_dual = -std::numeric_limits<double>::infinity();
  SqinrPowerReport best_powers;
  double eta0 = settings.step_size;
  double prev_p0 = std::numeric_limits<double>::infinity();
  int stationary_streak = 0;

  // The ascent keeps D strictly positive: an exact zero with beta = 0 makes
  // the virtual noise covariance singular and the fixed-point map loses its
  // contraction (stable oscillation). The floor perturbs the optimum by
  // O(1e-9), far below the gap tolerance.
  constexpr double kDualFloor = 1e-9;
  const auto project_network = [&](Eigen::VectorXd v) {
    return project_feasible_D(std::move(v), settings.projection_tol)
        .cwiseMax(kDualFloor)
        .eval();
  };

  // Backoff state: a too-long ascent step can park D where the fixed point
  // crawls; on an inner failure past the first iterate we restore the last
  // accepted point and retry with half the step.
  Eigen::MatrixXd lam_accepted = work.lam;
  std::vector<Eigen::VectorXd> d_accepted = state.D;
  std::vector<Eigen::VectorXd> last_ascent;
  double last_eta = 0.0;

  for (int n = 0;; ++n) {
    // The recovery enforces the SQINR targets exactly for whatever equalizers
    // come out, so early outer iterations can run the fixed point at reduced
    // accuracy; the final states are polished below.
    const double inner_tol =
        std::max(settings.lambda_tol,
                 std::min(1e-5, 0.01 * (std::isfinite(rep.duality_gap_rel)
                                            ? rep.duality_gap_rel
                                            : 1.0)));
    for (int backoff = 0;; ++backoff) {
      try {
        rep.lambda_sweeps += lambda_fixed_point_cached(cache, work, state.D,
                                                       config.sqinr_targets, settings,
                                                       inner_tol);
        break;
      } catch (const Error&) {
        if (n == 0 || backoff >= 8 || last_ascent.empty()) throw;
        last_eta *= 0.5;
        Eigen::VectorXd stacked(config.n_cells * config.n_antennas);
        for (int i = 0; i < config.n_cells; ++i) {
          stacked.segment(i * config.n_antennas, config.n_antennas) =
              d_accepted[i] + last_eta * last_ascent[i];
        }
        stacked = project_network(std::move(stacked));
        for (int i = 0; i < config.n_cells; ++i) {
          state.D[i] = stacked.segment(i * config.n_antennas, config.n_antennas);
        }
        work.lam = lam_accepted;
        work.rebuild_collapse(cache);
      }
    }
    lam_accepted = work.lam;
    d_accepted = state.D;
    work.write_back(cache, state.lambda);
    ++rep.outer_iterations;

    const double dual_obj = state.lambda.dot(noise_per_link);

    // Equalizers and primal recovery; every iterate is SQINR-feasible.
    EqualizerSet f = BeamformerSet::zero(config.n_cells, config.n_users, config.n_antennas,
                                         config.subcarriers);
    for (int i = 0; i < config.n_cells; ++i) {
      for (int u = 0; u < config.n_users; ++u) {
        const int col = i * config.n_users + u;
        for (int k = 0; k < config.subcarriers; ++k) {
          const Eigen::MatrixXcd z = build_Z_cached(cache, work, state.D[i], i, col, k);
          const Eigen::VectorXcd g = cache.cols(i, k).col(col);
          f.at(i, u, k) = solve_hermitian(
              z, g,
              "run_minimax_core: singular equalizer system at (cell " + std::to_string(i) +
                  ", user " + std::to_string(u) + ", subcarrier " + std::to_string(k) + ")");
        }
      }
    }
    const Eigen::MatrixXd sigma = assemble_sigma(f, channels, config.sqinr_targets, spec);
    const Eigen::VectorXd tau = solve_tau(sigma, noise_per_link);
    BeamformerSet w = build_beamformers(f, tau);
    const SqinrPowerReport powers = antenna_powers(w, spec);

    if (dual_obj > best_dual) {
      best_dual = dual_obj;
      result.dual.lambda = state.lambda;
      result.dual.D = state.D;
    }
    if (powers.p0_w < best_p0) {
      best_p0 = powers.p0_w;
      best_powers = powers;
      result.beamformers = w;
    }

    rep.duality_gap_rel = (dual_scale * best_p0 - best_dual) / best_dual;
    if (rep.duality_gap_rel <= settings.duality_gap_tol) {
      rep.converged = true;
      rep.stop_reason = "duality gap closed";
      break;
    }
    if (n >= max_d_updates) {
      rep.converged = max_d_updates == 0;
      rep.stop_reason = max_d_updates == 0 ? "noise covariance held fixed"
                                           : "noise covariance iteration cap";
      break;
    }

    // Projected ascent on D. The exact supergradient of the dual inner value
    // carries an alpha factor relative to the plain precoder outer products.
    std::vector<Eigen::VectorXd> ascent(static_cast<std::size_t>(config.n_cells));
    double grad_norm2 = 0.0, grad_max = 0.0;
    for (int i = 0; i < config.n_cells; ++i) {
      ascent[i] = spec.alpha * subgradient_D(i, w);
      grad_norm2 += ascent[i].squaredNorm();
      grad_max = std::max(grad_max, ascent[i].maxCoeff());
    }
    double eta = 0.0;
    switch (settings.step_mode) {
      case StepMode::kPolyak: {
        // Level-method target: the optimum lies between the best lower bound
        // and the scaled best primal value; aiming at their midpoint converges
        // faster than the plain upper-bound target.
        const double level = 0.5 * (dual_scale * best_p0 + best_dual);
        eta = grad_norm2 > 0.0
                  ? settings.polyak_relax * std::max(level - dual_obj, 0.0) / grad_norm2
                  : 0.0;
        break;
      }
      case StepMode::kConstant:
      case StepMode::kSqrtDecay: {
        if (eta0 <= 0.0) eta0 = grad_max > 0.0 ? 0.1 / grad_max : 0.0;
        eta = settings.step_mode == StepMode::kConstant ? eta0
                                                        : eta0 / std::sqrt(n + 1.0);
        break;
      }
    }
    if (!(eta > 0.0)) {
      rep.converged = true;
      rep.stop_reason = "ascent step vanished";
      break;
    }

    // Ascent step, then projection of the stacked diagonal onto the network
    // feasible set {d >= 0, tr <= N_c * N_b}: the trace budget couples the
    // cells, which is what lets it concentrate on the binding cell.
    Eigen::VectorXd stacked(config.n_cells * config.n_antennas);
    for (int i = 0; i < config.n_cells; ++i) {
      stacked.segment(i * config.n_antennas, config.n_antennas) = state.D[i] + eta * ascent[i];
    }
    stacked = project_network(std::move(stacked));
    double d_change = 0.0;
    for (int i = 0; i < config.n_cells; ++i) {
      const Eigen::VectorXd d_new = stacked.segment(i * config.n_antennas, config.n_antennas);
      d_change = std::max(d_change, (d_new - state.D[i]).cwiseAbs().maxCoeff());
      state.D[i] = d_new;
    }
    last_ascent = ascent;
    last_eta = eta;
    const double p0_change = std::abs(powers.p0_w - prev_p0) / powers.p0_w;
    prev_p0 = powers.p0_w;
    stationary_streak = (d_change <= settings.d_tol && p0_change <= settings.d_tol)
                            ? stationary_streak + 1
                            : 0;
    if (stationary_streak >= 3) {
      rep.converged = true;
      rep.stop_reason = "stationary iterates";
      break;
    }
  }

  // A D update can have happened after the best dual iterate was recorded;
  // make sure the returned dual state is populated even for zero iterations.
  if (result.dual.lambda.size() == 0) {
    result.dual.lambda = state.lambda;
    result.dual.D = state.D;
  }

  // Polish the returned dual powers to the full fixed-point tolerance; the
  // loop may have run them at the adaptive one. The polished objective is the
  // certified lower bound.
  {
    LambdaWork polish(cache, result.dual.lambda);
    rep.lambda_sweeps += lambda_fixed_point_cached(cache, polish, result.dual.D,
                                                   config.sqinr_targets, settings,
                                                   settings.lambda_tol);
    polish.write_back(cache, result.dual.lambda);
    best_dual = result.dual.lambda.dot(noise_per_link);
    rep.duality_gap_rel = (dual_scale * best_p0 - best_dual) / best_dual;
  }

  rep.p0_w = best_p0;
  rep.p0_dbm = watts_to_dbm(best_p0);
  rep.total_power_w = best_powers.total_power_w;
  rep.total_power_dbm = watts_to_dbm(best_powers.total_power_w);
  rep.dual_objective = best_dual;
  rep.antenna_power_w = best_powers.antenna_power_w;
  rep.lambda.assign(result.dual.lambda.data(),
                    result.dual.lambda.data() + result.dual.lambda.size());
  rep.sqinr_achieved =
      evaluate_sqinr(result.beamformers, channels, spec, noise_per_link);
  return result;
}

}  // namespace qcomp
