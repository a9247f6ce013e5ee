#include "qcomp/socp.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <vector>

namespace qcomp {

namespace {

// Affine Lorentz cone: t(z) = t_lin.z + t_const >= |A z + b|.
struct Lorentz {
  Eigen::VectorXd t_lin;
  double t_const = 0.0;
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
};

// Parabolic region: s(z) = s_lin.z + s_const >= |C z + d|^2.
struct Parab {
  Eigen::VectorXd s_lin;
  double s_const = 0.0;
  Eigen::MatrixXd C;
  Eigen::VectorXd d;
};

struct BarrierProblem {
  int n = 0;
  Eigen::VectorXd cost;
  std::vector<Lorentz> cones;
  std::vector<Parab> parabs;

  double barrier_nu() const { return 2.0 * (cones.size() + parabs.size()); }

  bool strictly_feasible(const Eigen::VectorXd& z) const {
    for (const auto& c : cones) {
      const double t = c.t_lin.dot(z) + c.t_const;
      if (!(t > 0.0)) return false;
      const double u = t * t - (c.A * z + c.b).squaredNorm();
      if (!(u > 0.0)) return false;
    }
    for (const auto& p : parabs) {
      const double v = p.s_lin.dot(z) + p.s_const - (p.C * z + p.d).squaredNorm();
      if (!(v > 0.0)) return false;
    }
    return true;
  }

  double barrier(const Eigen::VectorXd& z) const {
    double sum = 0.0;
    for (const auto& c : cones) {
      const double t = c.t_lin.dot(z) + c.t_const;
      sum -= std::log(t * t - (c.A * z + c.b).squaredNorm());
    }
    for (const auto& p : parabs) {
      sum -= std::log(p.s_lin.dot(z) + p.s_const - (p.C * z + p.d).squaredNorm());
    }
    return sum;
  }

  void barrier_derivatives(const Eigen::VectorXd& z, Eigen::VectorXd& grad,
                           Eigen::MatrixXd& hess) const {
    grad.setZero(n);
    hess.setZero(n, n);
    for (const auto& c : cones) {
      const double t = c.t_lin.dot(z) + c.t_const;
      const Eigen::VectorXd x = c.A * z + c.b;
      const double u = t * t - x.squaredNorm();
      const Eigen::VectorXd du = 2.0 * t * c.t_lin - 2.0 * (c.A.transpose() * x);
      grad -= du / u;
      hess += (du * du.transpose()) / (u * u);
      hess -= (2.0 * (c.t_lin * c.t_lin.transpose()) - 2.0 * (c.A.transpose() * c.A)) / u;
    }
    for (const auto& p : parabs) {
      const Eigen::VectorXd y = p.C * z + p.d;
      const double v = p.s_lin.dot(z) + p.s_const - y.squaredNorm();
      const Eigen::VectorXd dv = p.s_lin - 2.0 * (p.C.transpose() * y);
      grad -= dv / v;
      hess += (dv * dv.transpose()) / (v * v);
      hess += 2.0 * (p.C.transpose() * p.C) / v;
    }
  }
};

// Damped Newton centering of t_obj * cost.z + barrier(z). Sets `centered`
// when the Newton decrement converged (the gap bound nu/t is only valid
// then). `stop_cost_below`, when given, aborts as soon as the objective
// crosses it -- used by the feasibility phase, whose objective is unbounded.
int center(const BarrierProblem& prob, double t_obj, Eigen::VectorXd& z, bool* centered,
           const double* stop_cost_below = nullptr, int max_steps = 80) {
  Eigen::VectorXd grad;
  Eigen::MatrixXd hess;
  if (centered) *centered = false;
  int steps = 0;
  for (; steps < max_steps; ++steps) {
    if (stop_cost_below && prob.cost.dot(z) < *stop_cost_below) return steps;
    prob.barrier_derivatives(z, grad, hess);
    grad += t_obj * prob.cost;
    hess.diagonal().array() += 1e-12 * (1.0 + hess.trace() / prob.n);
    const Eigen::VectorXd delta = Eigen::LDLT<Eigen::MatrixXd>(hess).solve(-grad);
    const double dec2 = -grad.dot(delta);
    // Newton decrement below 1/4 puts us in the certified neighborhood of
    // the central path (the decrement is affine invariant, so this threshold
    // is scale free where an absolute gradient test is not).
    if (!(dec2 > 0.0625)) {
      if (centered) *centered = true;
      break;
    }
    const double phi0 = t_obj * prob.cost.dot(z) + prob.barrier(z);
    double s = 1.0;
    bool moved = false;
    for (int half = 0; half < 60; ++half) {
      const Eigen::VectorXd cand = z + s * delta;
      if (prob.strictly_feasible(cand)) {
        const double phi = t_obj * prob.cost.dot(cand) + prob.barrier(cand);
        if (phi <= phi0 - 0.25 * s * dec2) {
          z = cand;
          moved = true;
          break;
        }
      }
      s *= 0.5;
    }
    if (!moved) {
      // Line search exhausted: numerically centered.
      if (centered) *centered = true;
      break;
    }
  }
  return steps;
}

// Follows the central path until the (certified) gap bound drops below tol.
int follow_path(const BarrierProblem& prob, Eigen::VectorXd& z, double gap_tol,
                const double* early_stop_below = nullptr) {
  const bool debug = std::getenv("QCOMP_SOCP_DEBUG") != nullptr;
  double t_obj = 1.0;
  int total = 0;
  for (int outer = 0; outer < 60; ++outer) {
    bool centered = false;
    const int steps = center(prob, t_obj, z, &centered, early_stop_below);
    total += steps;
    if (debug) {
      std::fprintf(stderr, "socp stage %d: t=%.3e steps=%d centered=%d obj=%.9e\n", outer,
                   t_obj, steps, centered, prob.cost.dot(z));
    }
    if (early_stop_below && prob.cost.dot(z) < *early_stop_below) return total;
    // Near-path iterates carry a small slack over the on-path bound nu/t.
    if (centered &&
        2.0 * prob.barrier_nu() / t_obj <=
            gap_tol * std::max(1.0, std::abs(prob.cost.dot(z)))) {
      return total;
    }
    // Only advance along the path from a centered point.
    if (centered) t_obj *= 10.0;
    if (total > 20000) break;
  }
  throw NoConvergenceError("socp_solve: path following did not certify the gap");
}

}  // namespace

SocpResult socp_solve(const SystemConfig& config, const ChannelRealization& channels,
                      SocpObjective objective, double rel_gap_tol) {
  config.validate();
  const QuantizerSpec spec = quant_gain(config.bits);
  const int nc = config.n_cells, nu = config.n_users, nb = config.n_antennas,
            nk = config.subcarriers;
  const int nlinks = config.links();
  const int nw = nlinks * nb;        // complex precoder coefficients
  const int nreal = 2 * nw;          // real parametrization of the precoders
  const double alpha = spec.alpha, beta = spec.beta;

  // Normalize: channels by the mean direct-link gain, noise to 1. Keeps the
  // Newton systems well conditioned independent of the link budget.
  double sg2 = 0.0;
  for (int i = 0; i < nc; ++i)
    for (int u = 0; u < nu; ++u)
      for (int k = 0; k < nk; ++k) sg2 += channels.g(i, i, u, k).squaredNorm();
  sg2 /= nlinks;
  if (!(sg2 > 0.0)) throw InvalidParameterError("socp_solve: zero direct-link channels");
  const double gscale = 1.0 / std::sqrt(sg2);
  const double sigma_n = std::sqrt(config.noise_power_w);

  // Real index of Re/Im part of precoder coefficient m of link (i,u,k).
  const auto re_of = [&](int link, int m) { return 2 * (link * nb + m); };
  const auto im_of = [&](int link, int m) { return 2 * (link * nb + m) + 1; };

  // ---- SQINR cones, shared by both phases (phase-1 adds the shift var). ----
  // Cone for link (i,u,k):
  //   alpha sqrt(1 + 1/gamma) Re(g~_d^H w(i,u,k))
  //     >= | [ alpha g~_{j,i,u}(k)^H w(j,v,k)  for all (j,v);
  //            sqrt(alpha beta / K) |g~_{j,i,u,m}(k)| w_{j,v,m}(l) for all (j,v,l,m);
  //            1 ] |
  struct ConeBuild {
    Eigen::VectorXd t_lin;
    Eigen::MatrixXd A;
    Eigen::VectorXd b;
  };
  std::vector<ConeBuild> sqinr(static_cast<std::size_t>(nlinks));
  const int quant_rows = beta > 0.0 ? nreal : 0;
  for (int i = 0; i < nc; ++i) {
    for (int u = 0; u < nu; ++u) {
      for (int k = 0; k < nk; ++k) {
        const int row_link = link_index(i, u, k, nu, nk);
        ConeBuild cb;
        cb.t_lin = Eigen::VectorXd::Zero(nreal);
        const double gamma = config.sqinr_targets[row_link];
        const double kappa = alpha * std::sqrt(1.0 + 1.0 / gamma);
        const Eigen::VectorXcd gd = gscale * channels.g(i, i, u, k);
        for (int m = 0; m < nb; ++m) {
          cb.t_lin[re_of(row_link, m)] = kappa * gd[m].real();
          cb.t_lin[im_of(row_link, m)] = kappa * gd[m].imag();
        }
        const int n_rows = 2 * nc * nu + quant_rows + 1;
        cb.A = Eigen::MatrixXd::Zero(n_rows, nreal);
        cb.b = Eigen::VectorXd::Zero(n_rows);
        int r = 0;
        for (int j = 0; j < nc; ++j) {
          const Eigen::VectorXcd gj = gscale * channels.g(j, i, u, k);
          for (int v = 0; v < nu; ++v) {
            const int col_link = link_index(j, v, k, nu, nk);
            for (int m = 0; m < nb; ++m) {
              // Re(g^H w) and Im(g^H w) rows.
              cb.A(r, re_of(col_link, m)) = alpha * gj[m].real();
              cb.A(r, im_of(col_link, m)) = alpha * gj[m].imag();
              cb.A(r + 1, re_of(col_link, m)) = -alpha * gj[m].imag();
              cb.A(r + 1, im_of(col_link, m)) = alpha * gj[m].real();
            }
            r += 2;
          }
        }
        if (beta > 0.0) {
          const double qs = std::sqrt(alpha * beta / nk);
          for (int j = 0; j < nc; ++j) {
            const Eigen::VectorXcd gj = gscale * channels.g(j, i, u, k);
            for (int v = 0; v < nu; ++v) {
              for (int l = 0; l < nk; ++l) {
                const int col_link = link_index(j, v, l, nu, nk);
                for (int m = 0; m < nb; ++m) {
                  const double c = qs * std::abs(gj[m]);
                  cb.A(r, re_of(col_link, m)) = c;
                  cb.A(r + 1, im_of(col_link, m)) = c;
                  r += 2;
                }
              }
            }
          }
        }
        cb.b[r] = 1.0;  // normalized noise
        sqinr[static_cast<std::size_t>(row_link)] = std::move(cb);
      }
    }
  }

  // ---- Phase 1: minimize the cone shift theta; w = 0, theta = 2 is interior.
  Eigen::VectorXd w_seed;
  {
    BarrierProblem p1;
    p1.n = nreal + 1;  // [w_reals..., theta]
    p1.cost = Eigen::VectorXd::Zero(p1.n);
    p1.cost[nreal] = 1.0;
    for (const auto& cb : sqinr) {
      Lorentz lc;
      lc.t_lin = Eigen::VectorXd::Zero(p1.n);
      lc.t_lin.head(nreal) = cb.t_lin;
      lc.t_lin[nreal] = 1.0;  // + theta
      lc.A = Eigen::MatrixXd::Zero(cb.A.rows(), p1.n);
      lc.A.leftCols(nreal) = cb.A;
      lc.b = cb.b;
      p1.cones.push_back(std::move(lc));
    }
    Eigen::VectorXd z1 = Eigen::VectorXd::Zero(p1.n);
    z1[nreal] = 2.0;
    double stop_below = -0.5;
    follow_path(p1, z1, 1e-9, &stop_below);
    if (z1[nreal] > -1e-9) {
      throw InfeasibleTargetError(
          "socp_solve: SQINR targets are infeasible (phase-1 margin " +
          std::to_string(z1[nreal]) + ")");
    }
    // Seed phase 2 from the strictly feasible precoders found.
    w_seed = z1.head(nreal);
  }

  // ---- Phase 2: minimize p0 (or the total power epigraph). ----
  BarrierProblem p2;
  p2.n = nreal + 1;  // [w_reals..., objective]
  p2.cost = Eigen::VectorXd::Zero(p2.n);
  p2.cost[nreal] = 1.0;
  for (const auto& cb : sqinr) {
    Lorentz lc;
    lc.t_lin = Eigen::VectorXd::Zero(p2.n);
    lc.t_lin.head(nreal) = cb.t_lin;
    lc.A = Eigen::MatrixXd::Zero(cb.A.rows(), p2.n);
    lc.A.leftCols(nreal) = cb.A;
    lc.b = cb.b;
    p2.cones.push_back(std::move(lc));
  }
  if (objective == SocpObjective::kMinMaxAntennaPower) {
    // (K/alpha) p0 >= sum_{u,l} |w_{i,u,m}(l)|^2  for every (i, m).
    for (int i = 0; i < nc; ++i) {
      for (int m = 0; m < nb; ++m) {
        Parab pa;
        pa.s_lin = Eigen::VectorXd::Zero(p2.n);
        pa.s_lin[nreal] = nk / alpha;
        pa.C = Eigen::MatrixXd::Zero(2 * nu * nk, p2.n);
        pa.d = Eigen::VectorXd::Zero(2 * nu * nk);
        int r = 0;
        for (int u = 0; u < nu; ++u) {
          for (int l = 0; l < nk; ++l) {
            const int link = link_index(i, u, l, nu, nk);
            pa.C(r++, re_of(link, m)) = 1.0;
            pa.C(r++, im_of(link, m)) = 1.0;
          }
        }
        p2.parabs.push_back(std::move(pa));
      }
    }
  } else {
    Parab pa;
    pa.s_lin = Eigen::VectorXd::Zero(p2.n);
    pa.s_lin[nreal] = nk / alpha;
    pa.C = Eigen::MatrixXd::Zero(nreal, p2.n);
    for (int r = 0; r < nreal; ++r) pa.C(r, r) = 1.0;
    pa.d = Eigen::VectorXd::Zero(nreal);
    p2.parabs.push_back(std::move(pa));
  }

  Eigen::VectorXd z = Eigen::VectorXd::Zero(p2.n);
  z.head(nreal) = w_seed;
  // Strictly feasible objective seed: double the implied power plus slack.
  double max_quad = 0.0;
  for (const auto& pa : p2.parabs) {
    const double q = (pa.C * z + pa.d).squaredNorm() / pa.s_lin[nreal];
    max_quad = std::max(max_quad, q);
  }
  z[nreal] = 2.0 * max_quad + 1.0;

  SocpResult result;
  result.newton_steps = follow_path(p2, z, rel_gap_tol);

  result.beamformers = BeamformerSet::zero(nc, nu, nb, nk);
  const double wscale = sigma_n / std::sqrt(sg2);  // undo normalization
  for (int link = 0; link < nlinks; ++link) {
    Eigen::VectorXcd w(nb);
    for (int m = 0; m < nb; ++m) {
      w[m] = cxd(z[re_of(link, m)], z[im_of(link, m)]) * wscale;
    }
    result.beamformers.w[static_cast<std::size_t>(link)] = std::move(w);
  }
  result.objective_w = z[nreal] * config.noise_power_w / sg2;
  return result;
}

}  // namespace qcomp
