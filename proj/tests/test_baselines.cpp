#include <doctest.h>

#include "helpers.hpp"
#include "qcomp/baselines.hpp"

using namespace qcomp;

namespace {

SystemConfig make_config(int nc, int nu, int nb, int nk, int bits, double gamma_db,
                         double noise = 1.0) {
  SystemConfig c;
  c.n_cells = nc;
  c.n_users = nu;
  c.n_antennas = nb;
  c.subcarriers = nk;
  c.bits = bits;
  c.noise_power_w = noise;
  c.set_uniform_target(db_to_linear(gamma_db));
  return c;
}

}  // namespace

TEST_CASE("socp_oracle: closed-form two-antenna optimum") {
  // Single user, one subcarrier, ideal converters: the minimax optimum puts
  // equal magnitude on both antennas with channel-aligned phases, so
  // p0 = gamma sigma^2 / (|g_1| + |g_2|)^2.
  Eigen::MatrixXcd g(2, 1);
  g << cxd(1.2, -0.4), cxd(0.3, 0.9);
  const ChannelRealization ch = test::flat_channels(1, 1, {g});
  const SystemConfig config =
      make_config(1, 1, 2, 1, QuantizerSpec::kInfiniteBits, 0.0, 0.7);
  const BaselineResult oracle = socp_oracle(config, ch);
  const double mag = g.col(0).cwiseAbs().sum();
  CHECK(oracle.report.p0_w == doctest::Approx(0.7 / (mag * mag)).epsilon(1e-4));
  // And the achieved SQINR sits at (or microscopically above) the target.
  CHECK(oracle.report.sqinr_achieved[0] >= 1.0 - 1e-6);
  CHECK(oracle.report.sqinr_achieved[0] <= 1.0 + 1e-3);
}

TEST_CASE("q-comp: total power matches the conic reference") {
  Rng rng(3);
  const ChannelRealization ch = test::random_channels(rng, 2, 1, 4, 2, 2);
  const SystemConfig config =
      make_config(2, 1, 4, 2, QuantizerSpec::kInfiniteBits, 2.0);
  const BaselineResult qc = run_qcomp(config, ch);
  const SocpResult conic = socp_solve(config, ch, SocpObjective::kTotalPower);
  CHECK(qc.report.total_power_w == doctest::Approx(conic.objective_w).epsilon(5e-3));
}

TEST_CASE("baseline ordering: totals favor q-comp, peaks favor the per-antenna solver") {
  Rng rng(5);
  for (int trial = 0; trial < 4; ++trial) {
    const ChannelRealization ch = test::random_channels(rng, 2, 2, 4, 2, 2);
    // Unit-gain cross channels make these heavily interference limited; keep
    // the coarse-converter targets low enough to stay clear of the ceiling.
    const SystemConfig config =
        make_config(2, 2, 4, 2, trial < 2 ? 3 : 1, trial < 2 ? 0.0 : -6.0);
    SolverSettings settings;
    settings.lambda_max_iters = 5000;
    const BaselineResult qc = run_qcomp(config, ch, settings);
    const SolveResult pa = run_qcomp_pa(config, ch, settings);
    CHECK(qc.report.total_power_w <= pa.report.total_power_w * (1 + 1e-6));
    CHECK(pa.report.p0_w <= qc.report.p0_w * (1 + 1e-6));
  }
}

TEST_CASE("q-comp-pa agrees with the conic solve across resolutions") {
  Rng rng(7);
  for (int bits : {1, 3, QuantizerSpec::kInfiniteBits}) {
    // Neighbor-cell links at -10 dB keep the one-bit ceiling comfortably away.
    const ChannelRealization ch = test::random_channels(rng, 2, 1, 3, 2, 2, 0.3);
    const SystemConfig config = make_config(2, 1, 3, 2, bits, bits == 1 ? -2.0 : 1.0);
    SolverSettings settings;
    settings.duality_gap_tol = 5e-4;
    settings.d_max_iters = 30000;
    settings.lambda_max_iters = 5000;
    const SolveResult pa = run_qcomp_pa(config, ch, settings);
    const BaselineResult oracle = socp_oracle(config, ch);
    CHECK(pa.report.p0_w ==
          doctest::Approx(oracle.report.p0_w).epsilon(5e-3));
  }
}

TEST_CASE("feasibility verdicts agree between the fixed point and the conic program") {
  Eigen::MatrixXcd g(2, 1);
  g << cxd(0.9, 0.1), cxd(-0.5, 0.6);
  const ChannelRealization ch = test::flat_channels(1, 1, {g});
  const QuantizerSpec one_bit = quant_gain(1);
  // Far above the single-user ceiling N_b K alpha/beta.
  const double gamma = 4.0 * one_bit.alpha / one_bit.beta;
  SystemConfig config = make_config(1, 1, 2, 1, 1, linear_to_db(gamma));
  SolverSettings settings;
  settings.lambda_max_iters = 100000;
  CHECK_THROWS_AS(run_qcomp_pa(config, ch, settings), InfeasibleTargetError);
  CHECK_THROWS_AS(socp_oracle(config, ch), InfeasibleTargetError);
}

TEST_CASE("q-percell: single cell coincides with the full solver") {
  Rng rng(11);
  const ChannelRealization ch = test::random_channels(rng, 1, 2, 4, 2, 2);
  const SystemConfig config = make_config(1, 2, 4, 2, 3, 1.0);
  const BaselineResult pc = run_qpercell(config, ch);
  const SolveResult pa = run_qcomp_pa(config, ch);
  CHECK(pc.converged);
  CHECK(pc.report.p0_w == doctest::Approx(pa.report.p0_w).epsilon(1e-9));
}

TEST_CASE("q-percell: limited coordination never beats the joint minimax") {
  Rng rng(13);
  for (int trial = 0; trial < 3; ++trial) {
    const ChannelRealization ch = test::random_channels(rng, 2, 1, 4, 2, 2);
    const SystemConfig config = make_config(2, 1, 4, 2, 3, 1.0);
    const BaselineResult pc = run_qpercell(config, ch);
    if (!pc.converged) continue;
    const SolveResult pa = run_qcomp_pa(config, ch);
    CHECK(pc.report.p0_w >= pa.report.p0_w * (1 - 1e-6));
    for (std::size_t l = 0; l < pc.report.sqinr_achieved.size(); ++l) {
      CHECK(pc.report.sqinr_achieved[l] >= config.sqinr_targets[l] * (1 - 1e-3));
    }
  }
}

TEST_CASE("q-percell: strong cross-cell coupling raises the divergence flag") {
  // Two single-antenna cells with near-unity cross gains: each per-cell solve
  // answers the other's interference with more power.
  Eigen::MatrixXcd direct(1, 1), cross(1, 1);
  direct << cxd(1.0, 0.0);
  cross << cxd(0.97, 0.0);
  const ChannelRealization ch = test::flat_channels(2, 1, {direct, cross, cross, direct});
  const QuantizerSpec one_bit = quant_gain(1);
  // Below the isolated-cell ceiling but far above what the coupled network
  // can support.
  const double gamma = 0.85 * one_bit.alpha / one_bit.beta;
  const SystemConfig config = make_config(2, 1, 1, 1, 1, linear_to_db(gamma));
  SolverSettings settings;
  settings.percell_max_rounds = 40;
  const BaselineResult pc = run_qpercell(config, ch, settings);
  CHECK_FALSE(pc.converged);
}

TEST_CASE("holding the noise covariances fixed reproduces q-comp exactly") {
  Rng rng(17);
  const ChannelRealization ch = test::random_channels(rng, 2, 1, 3, 2, 1);
  const SystemConfig config = make_config(2, 1, 3, 2, 2, 0.0);
  SolverSettings settings;
  settings.d_max_iters = 0;
  const SolveResult frozen = run_qcomp_pa(config, ch, settings);
  const BaselineResult qc = run_qcomp(config, ch);
  CHECK(frozen.report.p0_w == doctest::Approx(qc.report.p0_w).epsilon(1e-12));
  CHECK(frozen.report.total_power_w ==
        doctest::Approx(qc.report.total_power_w).epsilon(1e-12));
}
