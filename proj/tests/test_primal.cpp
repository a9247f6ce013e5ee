#include <doctest.h>

#include "helpers.hpp"
#include "qcomp/dual.hpp"
#include "qcomp/ofdm.hpp"
#include "qcomp/primal.hpp"

using namespace qcomp;

namespace {

EqualizerSet random_field(Rng& rng, int nc, int nu, int nb, int nk) {
  EqualizerSet f = BeamformerSet::zero(nc, nu, nb, nk);
  for (auto& v : f.w) {
    for (int m = 0; m < nb; ++m) v[m] = rng.cgaussian();
  }
  return f;
}

// Literal evaluation of the coupling-matrix entries with materialized stacked
// operators; the beta terms reduce to collapse sums only through the operator
// algebra, so this route is independent of the implementation.
Eigen::MatrixXd dense_sigma(const EqualizerSet& f, const ChannelRealization& ch,
                            const std::vector<double>& targets, double alpha, double beta) {
  const int nc = f.n_cells, nu = f.n_users, nb = f.n_antennas, nk = f.subcarriers;
  const int n = f.links();
  const Eigen::MatrixXcd psi = test::dense_psi(nk, nb);
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < nc; ++i) {
    for (int u = 0; u < nu; ++u) {
      for (int k = 0; k < nk; ++k) {
        const int row = link_index(i, u, k, nu, nk);
        for (int j = 0; j < nc; ++j) {
          // Stacked single-column channel: support only on block k.
          Eigen::VectorXcd gstack = Eigen::VectorXcd::Zero(nk * nb);
          gstack.segment(k * nb, nb) = ch.g(j, i, u, k);
          const Eigen::MatrixXcd inner =
              (psi.adjoint() * (gstack * gstack.adjoint()) * psi).diagonal().asDiagonal();
          for (int v = 0; v < nu; ++v) {
            for (int l = 0; l < nk; ++l) {
              const int col = link_index(j, v, l, nu, nk);
              const Eigen::MatrixXcd psil = test::dense_psi_k(nk, nb, l);
              const Eigen::VectorXcd fv = f.w[static_cast<std::size_t>(col)];
              double entry =
                  -alpha * beta * (fv.adjoint() * psil * inner * psil.adjoint() * fv)(0).real();
              if (l == k) {
                const double cross = std::norm(ch.g(j, i, u, k).dot(fv));
                entry += (j == i && v == u) ? alpha * alpha / targets[row] * cross
                                            : -alpha * alpha * cross;
              }
              sigma(row, col) += entry;
            }
          }
        }
      }
    }
  }
  return sigma;
}

}  // namespace

TEST_CASE("assemble_sigma: scalar ideal-converter case") {
  Rng rng(3);
  const ChannelRealization ch = test::random_channels(rng, 1, 1, 3, 1, 1);
  EqualizerSet f = random_field(rng, 1, 1, 3, 1);
  const double gamma = 1.7;
  const Eigen::MatrixXd sigma =
      assemble_sigma(f, ch, {gamma}, quant_gain(QuantizerSpec::kInfiniteBits));
  REQUIRE(sigma.rows() == 1);
  const double expected = std::norm(ch.g(0, 0, 0, 0).dot(f.w[0])) / gamma;
  CHECK(sigma(0, 0) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("assemble_sigma: no cross-subcarrier coupling for ideal converters") {
  Rng rng(5);
  const ChannelRealization ch = test::random_channels(rng, 2, 1, 3, 4, 2);
  EqualizerSet f = random_field(rng, 2, 1, 3, 4);
  const std::vector<double> targets(8, 1.0);
  const Eigen::MatrixXd sigma =
      assemble_sigma(f, ch, targets, quant_gain(QuantizerSpec::kInfiniteBits));
  for (int r = 0; r < 8; ++r) {
    for (int c = 0; c < 8; ++c) {
      if (r % 4 != c % 4) CHECK(sigma(r, c) == 0.0);  // different subcarriers
    }
  }
}

TEST_CASE("assemble_sigma: matches the literal stacked-operator evaluation") {
  Rng rng(7);
  const ChannelRealization ch = test::random_channels(rng, 2, 1, 2, 2, 2);
  EqualizerSet f = random_field(rng, 2, 1, 2, 2);
  const std::vector<double> targets(4, 1.3);
  const QuantizerSpec spec = quant_gain(2);
  const Eigen::MatrixXd fast = assemble_sigma(f, ch, targets, spec);
  const Eigen::MatrixXd slow = dense_sigma(f, ch, targets, spec.alpha, spec.beta);
  CHECK((fast - slow).cwiseAbs().maxCoeff() <= 1e-10 * slow.cwiseAbs().maxCoeff());
}

TEST_CASE("assemble_sigma: continuous at-vanishing distortion") {
  Rng rng(9);
  const ChannelRealization ch = test::random_channels(rng, 1, 2, 2, 2, 1);
  EqualizerSet f = random_field(rng, 1, 2, 2, 2);
  const std::vector<double> targets(4, 0.9);
  QuantizerSpec tiny;  // hand-crafted: beta -> 0 limit
  tiny.bits = 5;
  tiny.beta = 1e-10;
  tiny.alpha = 1.0 - tiny.beta;
  const Eigen::MatrixXd with_tiny = assemble_sigma(f, ch, targets, tiny);
  const Eigen::MatrixXd ideal =
      assemble_sigma(f, ch, targets, quant_gain(QuantizerSpec::kInfiniteBits));
  CHECK((with_tiny - ideal).cwiseAbs().maxCoeff() <=
        1e-8 * ideal.cwiseAbs().maxCoeff());
}

TEST_CASE("solve_tau: scalar inversion and residual guarantee") {
  Eigen::MatrixXd sigma(1, 1);
  sigma << 4.0;
  const Eigen::VectorXd tau = solve_tau(sigma, 2.0);
  CHECK(tau[0] == doctest::Approx(0.5));

  Rng rng(11);
  Eigen::MatrixXd m(6, 6);
  for (int r = 0; r < 6; ++r)
    for (int c = 0; c < 6; ++c) m(r, c) = rng.gaussian() * 0.1;
  m += 6.0 * Eigen::MatrixXd::Identity(6, 6);
  const Eigen::VectorXd t6 = solve_tau(m, 0.3);
  CHECK((m * t6 - Eigen::VectorXd::Constant(6, 0.3)).norm() <= 1e-8 * 0.3 * std::sqrt(6.0));
}

TEST_CASE("solve_tau: singular and sign failures are typed") {
  CHECK_THROWS_AS(solve_tau(Eigen::MatrixXd::Zero(2, 2), 1.0), DegenerateDualityError);
  Eigen::MatrixXd neg(1, 1);
  neg << -2.0;
  CHECK_THROWS_AS(solve_tau(neg, 1.0), InvalidScalingError);
}

TEST_CASE("build_beamformers: scaling and direction") {
  Rng rng(13);
  EqualizerSet f = random_field(rng, 1, 1, 4, 2);
  Eigen::VectorXd tau(2);
  tau << 1.0, 4.0;
  const BeamformerSet w = build_beamformers(f, tau);
  CHECK((w.w[0] - f.w[0]).cwiseAbs().maxCoeff() == 0.0);
  CHECK(w.w[1].norm() == doctest::Approx(2.0 * f.w[1].norm()).epsilon(1e-12));
  const Eigen::VectorXcd dir_w = w.w[1] / w.w[1].norm();
  const Eigen::VectorXcd dir_f = f.w[1] / f.w[1].norm();
  CHECK((dir_w - dir_f).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("evaluate_sqinr: silent network and the single-user reduction") {
  Rng rng(17);
  const ChannelRealization ch = test::random_channels(rng, 1, 1, 3, 1, 1);
  BeamformerSet w = BeamformerSet::zero(1, 1, 3, 1);
  const QuantizerSpec ideal = quant_gain(QuantizerSpec::kInfiniteBits);
  CHECK(evaluate_sqinr(w, ch, ideal, 1.0)[0] == 0.0);

  for (int m = 0; m < 3; ++m) w.w[0][m] = rng.cgaussian();
  const double sigma2 = 0.8;
  const double expected = std::norm(ch.g(0, 0, 0, 0).dot(w.w[0])) / sigma2;
  CHECK(evaluate_sqinr(w, ch, ideal, sigma2)[0] == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("evaluate_sqinr: matches a Monte-Carlo link simulation through the quantizer") {
  Rng rng(19);
  const int nb = 4, nk = 2;
  const ChannelRealization ch = test::random_channels(rng, 1, 1, nb, nk, 2);
  const QuantizerSpec spec = quant_gain(2);

  // Drive the oracle at a converged operating point; the white-noise
  // covariance model assumes the balanced per-antenna powers such solutions
  // have.
  SystemConfig config;
  config.n_cells = config.n_users = 1;
  config.n_antennas = nb;
  config.subcarriers = nk;
  config.bits = 2;
  config.noise_power_w = 1.0;
  config.set_uniform_target(db_to_linear(0.0));
  const BeamformerSet w = run_qcomp_pa(config, ch).beamformers;

  const double sigma2 = config.noise_power_w;
  const std::vector<double> analytic = evaluate_sqinr(w, ch, spec, sigma2);

  // Simulate: precode unit symbols, modulate, quantize (variance matched per
  // antenna), demodulate through the channel, and regress out the linear part.
  Eigen::VectorXd power = Eigen::VectorXd::Zero(nb);
  for (const auto& wk : w.cell_blocks(0)) power += wk.rowwise().squaredNorm();
  power /= nk;

  const int draws = 100000;
  std::vector<cxd> response(static_cast<std::size_t>(nk), cxd(0, 0));
  std::vector<double> sym_power(static_cast<std::size_t>(nk), 0.0);
  std::vector<std::vector<cxd>> rx(static_cast<std::size_t>(nk));
  std::vector<std::vector<cxd>> tx(static_cast<std::size_t>(nk));
  for (int d = 0; d < draws; ++d) {
    Eigen::VectorXcd u(nk * nb);
    Eigen::VectorXcd s(nk);
    for (int k = 0; k < nk; ++k) {
      s[k] = rng.cgaussian();
      u.segment(k * nb, nb) = w.at(0, 0, k) * s[k];
    }
    Eigen::VectorXcd x = ofdm_modulate(u, nk, nb);
    for (int n = 0; n < nk; ++n) {
      for (int m = 0; m < nb; ++m) {
        const cxd xs = x[n * nb + m];
        x[n * nb + m] = cxd(quantize_component(xs.real(), spec, 0.5 * power[m]),
                            quantize_component(xs.imag(), spec, 0.5 * power[m]));
      }
    }
    // Back to the subcarrier domain and through the channel.
    const Eigen::MatrixXcd dft = build_dft(nk).matrix;
    for (int k = 0; k < nk; ++k) {
      Eigen::VectorXcd xk = Eigen::VectorXcd::Zero(nb);
      for (int n = 0; n < nk; ++n) xk += dft(k, n) * x.segment(n * nb, nb);
      const cxd y = ch.g(0, 0, 0, k).dot(xk);
      response[k] += y * std::conj(s[k]);
      sym_power[k] += std::norm(s[k]);
      rx[k].push_back(y);
      tx[k].push_back(s[k]);
    }
  }
  for (int k = 0; k < nk; ++k) {
    const cxd a = response[k] / sym_power[k];
    double resid = 0.0;
    for (std::size_t d = 0; d < rx[k].size(); ++d) resid += std::norm(rx[k][d] - a * tx[k][d]);
    resid /= static_cast<double>(rx[k].size());
    const double empirical = std::norm(a) / (resid + sigma2);
    CHECK(empirical == doctest::Approx(analytic[static_cast<std::size_t>(k)]).epsilon(0.05));
  }
}

TEST_CASE("antenna_powers: direct substitution and the trace identity") {
  const QuantizerSpec spec = quant_gain(3);
  BeamformerSet w = BeamformerSet::zero(1, 1, 3, 1);
  w.w[0][0] = cxd(2.0, 0.0);  // sqrt(p) e_1 with p = 4
  const SqinrPowerReport rep = antenna_powers(w, spec);
  CHECK(rep.antenna_power_w(0, 0) == doctest::Approx(spec.alpha * 4.0));
  CHECK(rep.antenna_power_w(0, 1) == 0.0);
  CHECK(rep.p0_w == doctest::Approx(spec.alpha * 4.0));

  Rng rng(23);
  BeamformerSet big = BeamformerSet::zero(2, 2, 4, 4);
  double norm2 = 0.0;
  for (auto& v : big.w) {
    for (int m = 0; m < 4; ++m) v[m] = rng.cgaussian();
    norm2 += v.squaredNorm();
  }
  const SqinrPowerReport rep2 = antenna_powers(big, spec);
  CHECK(rep2.total_power_w == doctest::Approx(spec.alpha / 4.0 * norm2).epsilon(1e-12));
  CHECK(rep2.p0_w == doctest::Approx(rep2.antenna_power_w.maxCoeff()));
}

TEST_CASE("antenna_powers: matches the simulated converter output covariance") {
  Rng rng(29);
  const int nb = 3, nk = 4;
  const QuantizerSpec spec = quant_gain(3);
  BeamformerSet w = BeamformerSet::zero(1, 2, nb, nk);
  for (auto& v : w.w)
    for (int m = 0; m < nb; ++m) v[m] = rng.cgaussian();
  const SqinrPowerReport rep = antenna_powers(w, spec);

  Eigen::VectorXd power = Eigen::VectorXd::Zero(nb);
  for (const auto& wk : w.cell_blocks(0)) power += wk.rowwise().squaredNorm();
  power /= nk;

  Eigen::VectorXd acc = Eigen::VectorXd::Zero(nb);
  const int draws = 100000;
  const auto blocks = w.cell_blocks(0);
  for (int d = 0; d < draws; ++d) {
    Eigen::VectorXcd u(nk * nb);
    for (int k = 0; k < nk; ++k) {
      Eigen::VectorXcd s(2);
      s << rng.cgaussian(), rng.cgaussian();
      u.segment(k * nb, nb) = blocks[static_cast<std::size_t>(k)] * s;
    }
    const Eigen::VectorXcd x = ofdm_modulate(u, nk, nb);
    for (int n = 0; n < nk; ++n) {
      for (int m = 0; m < nb; ++m) {
        const cxd xs = x[n * nb + m];
        const cxd xq = cxd(quantize_component(xs.real(), spec, 0.5 * power[m]),
                           quantize_component(xs.imag(), spec, 0.5 * power[m]));
        acc[m] += std::norm(xq);
      }
    }
  }
  acc /= static_cast<double>(draws * nk);
  for (int m = 0; m < nb; ++m) {
    CHECK(acc[m] == doctest::Approx(rep.antenna_power_w(0, m)).epsilon(0.03));
  }
}

TEST_CASE("recovery: converged dual state reproduces the targets exactly") {
  Rng rng(31);
  const ChannelRealization ch = test::random_channels(rng, 2, 2, 3, 2, 2);
  SystemConfig config;
  config.n_cells = 2;
  config.n_users = 2;
  config.n_antennas = 3;
  config.subcarriers = 2;
  config.bits = 3;
  config.noise_power_w = 1.3;
  config.set_uniform_target(db_to_linear(-1.0));

  const QuantizerSpec spec = quant_gain(config.bits);
  DualState state = DualState::initial(2, 2, 3, 2);
  lambda_fixed_point(state, ch, config.sqinr_targets, spec, SolverSettings{});
  EqualizerSet f = BeamformerSet::zero(2, 2, 3, 2);
  for (int i = 0; i < 2; ++i)
    for (int u = 0; u < 2; ++u)
      for (int k = 0; k < 2; ++k) f.at(i, u, k) = mmse_equalizer(i, u, k, state, ch, spec);
  const Eigen::VectorXd tau =
      solve_tau(assemble_sigma(f, ch, config.sqinr_targets, spec), config.noise_power_w);
  const BeamformerSet w = build_beamformers(f, tau);
  const std::vector<double> achieved = evaluate_sqinr(w, ch, spec, config.noise_power_w);
  for (std::size_t l = 0; l < achieved.size(); ++l) {
    CHECK(achieved[l] == doctest::Approx(config.sqinr_targets[l]).epsilon(1e-6));
  }
}
