// qcomp command line: single solves, gamma sweeps, PAPR tables and the
// built-in validation suite.

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>

#include "qcomp/baselines.hpp"
#include "qcomp/metrics.hpp"
#include "qcomp/ofdm.hpp"
#include "qcomp/report.hpp"
#include "qcomp/sweep.hpp"

namespace {

using namespace qcomp;

struct InstanceFlags {
  std::string scenario = "wideband";
  int antennas = 8;
  int cells = 3;
  int users = 2;
  int subcarriers = 16;
  std::string bits = "3";
  double gamma_db = 0.0;
  std::uint64_t seed = 1;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--scenario", scenario, "wideband or narrowband")
        ->check(CLI::IsMember({"wideband", "narrowband"}));
    cmd->add_option("--antennas", antennas, "BS antennas N_b");
    cmd->add_option("--cells", cells, "cells N_c");
    cmd->add_option("--users", users, "users per cell N_u");
    cmd->add_option("--subcarriers", subcarriers, "subcarriers K");
    cmd->add_option("--bits", bits, "converter resolution: 1..5 or inf");
    cmd->add_option("--gamma-db", gamma_db, "target SQINR in dB (all users)");
    cmd->add_option("--seed", seed, "RNG seed");
  }

  ScenarioParams params() const {
    ScenarioParams p = scenario_params(scenario_from_name(scenario));
    if (scenario == "narrowband" && subcarriers < p.delay_spread_taps) {
      p.delay_spread_taps = 1;
    }
    return p;
  }

  SystemConfig config(const ScenarioParams& p) const {
    SystemConfig c;
    c.n_cells = cells;
    c.n_users = users;
    c.n_antennas = antennas;
    c.subcarriers = subcarriers;
    c.bits = bits_from_label(bits);
    c.noise_power_w = dbm_to_watts(noise_power_dbm(p.bandwidth_hz, p.noise_figure_db));
    c.set_uniform_target(db_to_linear(gamma_db));
    return c;
  }
};

void apply_env_overrides(std::uint64_t* seed, int* threads) {
  if (const char* s = std::getenv("QCOMP_SEED")) {
    if (seed) *seed = std::strtoull(s, nullptr, 10);
  }
  if (const char* s = std::getenv("QCOMP_THREADS")) {
    if (threads) *threads = std::atoi(s);
  }
}

BaselineResult run_algorithm(AlgorithmId alg, const SystemConfig& config,
                             const ChannelRealization& channels,
                             const SolverSettings& settings) {
  switch (alg) {
    case AlgorithmId::kQcompPa: {
      SolveResult r = run_qcomp_pa(config, channels, settings);
      BaselineResult out;
      out.algorithm = AlgorithmId::kQcompPa;
      out.beamformers = std::move(r.beamformers);
      out.report = std::move(r.report);
      out.converged = out.report.converged;
      out.outer_iterations = out.report.outer_iterations;
      return out;
    }
    case AlgorithmId::kQcomp:
      return run_qcomp(config, channels, settings);
    case AlgorithmId::kQpercell:
      return run_qpercell(config, channels, settings);
    case AlgorithmId::kSocpOracle:
      return socp_oracle(config, channels);
  }
  throw InvalidParameterError("unhandled algorithm");
}

int cmd_solve(const InstanceFlags& inst, const std::string& algorithm, const std::string& out,
              const std::string& channels_out, const std::string& channels_in) {
  const ScenarioParams params = inst.params();
  const SystemConfig config = inst.config(params);
  ChannelRealization channels;
  if (!channels_in.empty()) {
    channels = load_channels_json_file(channels_in);
  } else {
    const Geometry geo = place_network(inst.cells, inst.users, params, inst.seed);
    channels = draw_channels(geo, params, inst.subcarriers, inst.antennas, inst.seed);
  }
  if (!channels_out.empty()) save_channels_json_file(channels, channels_out);

  const BaselineResult result =
      run_algorithm(algorithm_from_name(algorithm), config, channels, SolverSettings{});
  const nlohmann::ordered_json j = baseline_to_json(result, config.n_users, config.subcarriers);
  if (out.empty()) {
    std::cout << j.dump(1) << "\n";
  } else {
    std::ofstream f(out, std::ios::binary);
    f << j.dump(1) << "\n";
  }
  return 0;
}

int cmd_papr(const InstanceFlags& inst, const std::vector<std::string>& algorithms, int draws) {
  const ScenarioParams params = inst.params();
  const SystemConfig config = inst.config(params);
  const Geometry geo = place_network(inst.cells, inst.users, params, inst.seed);
  const ChannelRealization channels =
      draw_channels(geo, params, inst.subcarriers, inst.antennas, inst.seed);
  const QuantizerSpec spec = quant_gain(config.bits);

  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (const auto& name : algorithms) {
    const BaselineResult result =
        run_algorithm(algorithm_from_name(name), config, channels, SolverSettings{});
    const PaprResult papr =
        compute_papr(result.beamformers, spec, draws, Rng::derive(inst.seed, 0x70617072));
    nlohmann::ordered_json e;
    e["algorithm"] = name;
    e["papr_db"] = papr.papr_db;
    e["p0_dbm"] = result.report.p0_dbm;
    e["converged"] = result.converged;
    if (papr.excluded_antennas > 0) e["excluded_antennas"] = papr.excluded_antennas;
    out.push_back(std::move(e));
  }
  std::cout << out.dump(1) << "\n";
  return 0;
}

int cmd_validate();

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qcomp: duality-based coordinated multicell beamforming for quantized "
               "MIMO-OFDM downlinks"};
  app.require_subcommand(1);

  // solve
  auto* solve = app.add_subcommand("solve", "solve one instance, emit a JSON report");
  InstanceFlags solve_inst;
  solve_inst.add_to(solve);
  std::string solve_algorithm = "qcomp_pa";
  std::string solve_out, channels_out, channels_in;
  solve->add_option("--algorithm", solve_algorithm,
                    "qcomp_pa | qcomp | qpercell | socp_oracle");
  solve->add_option("--out", solve_out, "write the JSON report here instead of stdout");
  solve->add_option("--save-channels", channels_out, "export the channel realization (JSON)");
  solve->add_option("--load-channels", channels_in, "use a previously exported realization");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "run a sweep described by a JSON config");
  std::string sweep_config, sweep_out_dir = "sweep_out";
  std::uint64_t sweep_seed = 0;
  bool sweep_seed_set = false;
  int sweep_threads = 0;
  sweep->add_option("--config", sweep_config, "sweep config JSON")->required();
  sweep->add_option("--out-dir", sweep_out_dir, "output directory");
  sweep->add_option("--seed", sweep_seed, "override the config seed")
      ->each([&](const std::string&) { sweep_seed_set = true; });
  sweep->add_option("--threads", sweep_threads, "worker threads (0 = config value)");

  // papr
  auto* papr = app.add_subcommand("papr", "PAPR comparison on one instance");
  InstanceFlags papr_inst;
  papr_inst.add_to(papr);
  std::vector<std::string> papr_algorithms = {"qcomp_pa", "qcomp"};
  int papr_draws = 512;
  papr->add_option("--algorithms", papr_algorithms, "algorithms to compare")->delimiter(',');
  papr->add_option("--draws", papr_draws, "OFDM symbol draws");

  // validate
  app.add_subcommand("validate", "run the built-in oracle and Monte-Carlo checks");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) {
      apply_env_overrides(&solve_inst.seed, nullptr);
      return cmd_solve(solve_inst, solve_algorithm, solve_out, channels_out, channels_in);
    }
    if (sweep->parsed()) {
      std::ifstream f(sweep_config);
      if (!f) throw Error("cannot open config " + sweep_config);
      nlohmann::json j;
      f >> j;
      SweepSpec spec = sweep_spec_from_json(j);
      if (sweep_seed_set) spec.seed = sweep_seed;
      if (sweep_threads > 0) spec.threads = sweep_threads;
      apply_env_overrides(&spec.seed, &spec.threads);
      const SweepOutput out = run_sweep(spec);
      write_sweep_outputs(out, spec, sweep_out_dir);
      int infeasible_points = 0;
      for (const auto& a : out.aggregates) infeasible_points += a.all_infeasible ? 1 : 0;
      std::cout << "wrote " << out.records.size() << " records to " << sweep_out_dir
                << "/sweep.csv";
      if (infeasible_points > 0) {
        std::cout << " (" << infeasible_points << " sweep points fully infeasible)";
      }
      std::cout << "\n";
      return 0;
    }
    if (papr->parsed()) {
      apply_env_overrides(&papr_inst.seed, nullptr);
      return cmd_papr(papr_inst, papr_algorithms, papr_draws);
    }
    return cmd_validate();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

namespace {

// --- validate: quick self-checks against independent routes ---------------

bool check(const std::string& name, bool ok) {
  std::cout << (ok ? "PASS" : "FAIL") << "  " << name << "\n";
  return ok;
}

int cmd_validate() {
  bool all = true;
  {
    const QuantizerSpec q1 = quant_gain(1);
    all &= check("quantizer: 1-bit distortion matches 1 - 2/pi",
                 std::abs(q1.beta - (1.0 - 2.0 / M_PI)) < 1e-9);
    double prev = 1.0;
    bool mono = true;
    for (int b = 1; b <= 5; ++b) {
      const double beta = quant_gain(b).beta;
      mono &= beta < prev;
      prev = beta;
    }
    all &= check("quantizer: distortion strictly decreases with resolution", mono);
  }
  {
    // Bussgang gain of the simulated quantizer.
    const QuantizerSpec q3 = quant_gain(3);
    Rng rng(7);
    double num = 0.0, den = 0.0;
    for (int s = 0; s < 200000; ++s) {
      const cxd x = rng.cgaussian();
      const cxd xq = cxd(quantize_component(x.real(), q3, 0.5),
                         quantize_component(x.imag(), q3, 0.5));
      num += (xq * std::conj(x)).real();
      den += std::norm(x);
    }
    all &= check("quantizer: empirical Bussgang gain matches alpha (3-bit)",
                 std::abs(num / den - q3.alpha) < 0.01 * q3.alpha);
  }
  {
    // Parseval between taps and subcarrier blocks.
    Rng rng(11);
    std::vector<Eigen::MatrixXcd> taps(3, Eigen::MatrixXcd(4, 2));
    double tap_energy = 0.0;
    for (auto& h : taps) {
      for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 2; ++c) h(r, c) = rng.cgaussian();
      tap_energy += h.squaredNorm();
    }
    const FreqChannelBlock fb = freq_from_taps(taps, 8);
    double freq_energy = 0.0;
    for (const auto& g : fb.block) freq_energy += g.squaredNorm();
    all &= check("ofdm: tap/subcarrier energy identity",
                 std::abs(freq_energy - 8.0 * tap_energy) < 1e-9 * freq_energy);
  }
  {
    // Small end-to-end solve: constraint activity and duality gap.
    SystemConfig config;
    config.n_cells = 2;
    config.n_users = 1;
    config.n_antennas = 4;
    config.subcarriers = 2;
    config.bits = 3;
    config.noise_power_w = 1.0;
    config.set_uniform_target(db_to_linear(3.0));
    ScenarioParams params = ScenarioParams::wideband();
    params.delay_spread_taps = 2;
    const Geometry geo = place_network(2, 1, params, 19);
    const ChannelRealization channels = draw_channels(geo, params, 2, 4, 19);
    const SolveResult res = run_qcomp_pa(config, channels);
    bool active = true;
    for (std::size_t l = 0; l < res.report.sqinr_achieved.size(); ++l) {
      const double ratio = res.report.sqinr_achieved[l] / config.sqinr_targets[l];
      active &= ratio > 1.0 - 1e-4 && ratio < 1.0 + 1e-2;
    }
    all &= check("solver: SQINR constraints active at the solution", active);
    all &= check("solver: primal-dual gap closed to 1e-2",
                 res.report.duality_gap_rel < 1e-2);
    const BaselineResult oracle = socp_oracle(config, channels);
    all &= check("solver: agrees with the conic solve within 0.5%",
                 std::abs(oracle.report.p0_w - res.report.p0_w) < 5e-3 * oracle.report.p0_w);
  }
  std::cout << (all ? "all checks passed" : "CHECKS FAILED") << "\n";
  return all ? 0 : 1;
}

}  // namespace
