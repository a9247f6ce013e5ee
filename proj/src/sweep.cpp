#include "qcomp/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include "qcomp/report.hpp"

namespace qcomp {

std::string scenario_name(Scenario s) {
  return s == Scenario::kWideband ? "wideband" : "narrowband";
}

Scenario scenario_from_name(const std::string& name) {
  if (name == "wideband") return Scenario::kWideband;
  if (name == "narrowband") return Scenario::kNarrowband;
  throw InvalidParameterError("unknown scenario '" + name + "'");
}

ScenarioParams scenario_params(Scenario s) {
  return s == Scenario::kWideband ? ScenarioParams::wideband() : ScenarioParams::narrowband();
}

void SweepSpec::validate() const {
  if (trials < 1) throw InvalidParameterError("SweepSpec: trials must be >= 1");
  if (gamma_db_list.empty()) throw InvalidParameterError("SweepSpec: gamma list is empty");
  if (bits_list.empty()) throw InvalidParameterError("SweepSpec: bits list is empty");
  if (algorithms.empty()) throw InvalidParameterError("SweepSpec: no algorithms requested");
  if (threads < 1) throw InvalidParameterError("SweepSpec: threads must be >= 1");
  params.validate();
}

namespace {

StepMode step_mode_from_name(const std::string& s) {
  if (s == "polyak") return StepMode::kPolyak;
  if (s == "constant") return StepMode::kConstant;
  if (s == "sqrt_decay") return StepMode::kSqrtDecay;
  throw InvalidParameterError("unknown step mode '" + s + "'");
}

void reject_unknown(const nlohmann::json& j, const std::set<std::string>& allowed,
                    const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key())) {
      throw InvalidParameterError("unknown key '" + it.key() + "' in " + where);
    }
  }
}

SolverSettings settings_from_json(const nlohmann::json& j) {
  reject_unknown(j,
                 {"lambda_tol", "lambda_max_iters", "d_tol", "d_max_iters", "step_size",
                  "step_mode", "polyak_relax", "lambda_cap", "projection_tol",
                  "duality_gap_tol", "jacobi_lambda", "percell_max_rounds", "percell_tol"},
                 "settings");
  SolverSettings s;
  if (j.contains("lambda_tol")) s.lambda_tol = j["lambda_tol"].get<double>();
  if (j.contains("lambda_max_iters")) s.lambda_max_iters = j["lambda_max_iters"].get<int>();
  if (j.contains("d_tol")) s.d_tol = j["d_tol"].get<double>();
  if (j.contains("d_max_iters")) s.d_max_iters = j["d_max_iters"].get<int>();
  if (j.contains("step_size")) s.step_size = j["step_size"].get<double>();
  if (j.contains("step_mode")) s.step_mode = step_mode_from_name(j["step_mode"].get<std::string>());
  if (j.contains("polyak_relax")) s.polyak_relax = j["polyak_relax"].get<double>();
  if (j.contains("lambda_cap")) s.lambda_cap = j["lambda_cap"].get<double>();
  if (j.contains("projection_tol")) s.projection_tol = j["projection_tol"].get<double>();
  if (j.contains("duality_gap_tol")) s.duality_gap_tol = j["duality_gap_tol"].get<double>();
  if (j.contains("jacobi_lambda")) s.jacobi_lambda = j["jacobi_lambda"].get<bool>();
  if (j.contains("percell_max_rounds")) s.percell_max_rounds = j["percell_max_rounds"].get<int>();
  if (j.contains("percell_tol")) s.percell_tol = j["percell_tol"].get<double>();
  return s;
}

void params_patch_from_json(const nlohmann::json& j, ScenarioParams& p) {
  reject_unknown(j,
                 {"carrier_frequency_hz", "bandwidth_hz", "bs_spacing_m",
                  "min_bs_user_distance_m", "pathloss_intercept_db", "pathloss_exponent",
                  "shadowing_std_db", "noise_figure_db", "antenna_gain_db",
                  "delay_spread_taps", "tap_power_mode"},
                 "scenario_params");
  if (j.contains("carrier_frequency_hz")) p.carrier_frequency_hz = j["carrier_frequency_hz"].get<double>();
  if (j.contains("bandwidth_hz")) p.bandwidth_hz = j["bandwidth_hz"].get<double>();
  if (j.contains("bs_spacing_m")) p.bs_spacing_m = j["bs_spacing_m"].get<double>();
  if (j.contains("min_bs_user_distance_m")) p.min_bs_user_distance_m = j["min_bs_user_distance_m"].get<double>();
  if (j.contains("pathloss_intercept_db")) p.pathloss_intercept_db = j["pathloss_intercept_db"].get<double>();
  if (j.contains("pathloss_exponent")) p.pathloss_exponent = j["pathloss_exponent"].get<double>();
  if (j.contains("shadowing_std_db")) p.shadowing_std_db = j["shadowing_std_db"].get<double>();
  if (j.contains("noise_figure_db")) p.noise_figure_db = j["noise_figure_db"].get<double>();
  if (j.contains("antenna_gain_db")) p.antenna_gain_db = j["antenna_gain_db"].get<double>();
  if (j.contains("delay_spread_taps")) p.delay_spread_taps = j["delay_spread_taps"].get<int>();
  if (j.contains("tap_power_mode")) {
    const auto mode = j["tap_power_mode"].get<std::string>();
    if (mode == "normalized") {
      p.tap_power_mode = ScenarioParams::TapPowerMode::normalized;
    } else if (mode == "unit_per_tap") {
      p.tap_power_mode = ScenarioParams::TapPowerMode::unit_per_tap;
    } else {
      throw InvalidParameterError("unknown tap_power_mode '" + mode + "'");
    }
  }
}

int bits_from_json(const nlohmann::json& v) {
  if (v.is_string()) return bits_from_label(v.get<std::string>());
  return v.get<int>();
}

std::string format_double(double v) {
  if (!std::isfinite(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

SweepSpec sweep_spec_from_json(const nlohmann::json& j) {
  reject_unknown(j,
                 {"scenario", "n_antennas", "n_cells", "n_users", "subcarriers", "bits",
                  "gamma_db", "trials", "seed", "algorithms", "settings", "scenario_params",
                  "papr_draws", "papr_mode", "emit_trial_json", "threads"},
                 "sweep config");
  SweepSpec spec;
  if (j.contains("scenario")) spec.scenario = scenario_from_name(j["scenario"].get<std::string>());
  spec.params = scenario_params(spec.scenario);
  if (j.contains("n_antennas")) spec.n_antennas = j["n_antennas"].get<int>();
  if (j.contains("n_cells")) spec.n_cells = j["n_cells"].get<int>();
  if (j.contains("n_users")) spec.n_users = j["n_users"].get<int>();
  if (j.contains("subcarriers")) spec.subcarriers = j["subcarriers"].get<int>();
  if (j.contains("bits")) {
    spec.bits_list.clear();
    for (const auto& v : j["bits"]) spec.bits_list.push_back(bits_from_json(v));
  }
  if (j.contains("gamma_db")) spec.gamma_db_list = j["gamma_db"].get<std::vector<double>>();
  if (j.contains("trials")) spec.trials = j["trials"].get<int>();
  if (j.contains("seed")) spec.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("algorithms")) {
    spec.algorithms.clear();
    for (const auto& v : j["algorithms"]) {
      spec.algorithms.push_back(algorithm_from_name(v.get<std::string>()));
    }
  }
  if (j.contains("settings")) spec.settings = settings_from_json(j["settings"]);
  if (j.contains("scenario_params")) params_patch_from_json(j["scenario_params"], spec.params);
  if (j.contains("papr_draws")) spec.papr_draws = j["papr_draws"].get<int>();
  if (j.contains("papr_mode")) {
    const auto mode = j["papr_mode"].get<std::string>();
    if (mode == "quantized") {
      spec.papr_mode = PaprMode::kQuantized;
    } else if (mode == "prequantization") {
      spec.papr_mode = PaprMode::kPreQuantization;
    } else {
      throw InvalidParameterError("unknown papr_mode '" + mode + "'");
    }
  }
  if (j.contains("emit_trial_json")) spec.emit_trial_json = j["emit_trial_json"].get<bool>();
  if (j.contains("threads")) spec.threads = j["threads"].get<int>();
  spec.validate();
  return spec;
}

bool MetricRecord::operator==(const MetricRecord& o) const {
  return scenario == o.scenario && algorithm == o.algorithm && bits == o.bits &&
         gamma_db == o.gamma_db && trial == o.trial &&
         format_double(p0_dbm) == format_double(o.p0_dbm) &&
         format_double(total_dbm) == format_double(o.total_dbm) &&
         format_double(papr_db) == format_double(o.papr_db) && converged == o.converged;
}

std::uint64_t trial_seed(std::uint64_t sweep_seed, int gamma_index, int trial) {
  return Rng::derive(sweep_seed, static_cast<std::uint64_t>(gamma_index),
                     static_cast<std::uint64_t>(trial), 0x747269616cULL);
}

namespace {

struct TrialJob {
  int gamma_index = 0;
  int trial = 0;
};

bool record_key_less(const MetricRecord& a, const MetricRecord& b) {
  const auto key = [](const MetricRecord& r) {
    return std::tie(r.scenario, r.algorithm, r.bits, r.gamma_db, r.trial);
  };
  return key(a) < key(b);
}

}  // namespace

SweepOutput run_sweep(const SweepSpec& spec) {
  spec.validate();
  const double noise_w =
      dbm_to_watts(noise_power_dbm(spec.params.bandwidth_hz, spec.params.noise_figure_db));

  std::vector<TrialJob> jobs;
  for (int gi = 0; gi < static_cast<int>(spec.gamma_db_list.size()); ++gi) {
    for (int t = 0; t < spec.trials; ++t) jobs.push_back({gi, t});
  }

  // Records and reports slotted per job so the worker schedule cannot change
  // the output.
  const int runs_per_job = static_cast<int>(spec.bits_list.size() * spec.algorithms.size());
  std::vector<std::vector<MetricRecord>> job_records(jobs.size());
  std::vector<std::vector<std::pair<std::string, nlohmann::ordered_json>>> job_reports(
      jobs.size());

  std::atomic<std::size_t> next_job{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto worker = [&]() {
    for (;;) {
      const std::size_t jid = next_job.fetch_add(1);
      if (jid >= jobs.size()) return;
      try {
        const TrialJob job = jobs[jid];
        const double gamma_db = spec.gamma_db_list[static_cast<std::size_t>(job.gamma_index)];
        const std::uint64_t tseed = trial_seed(spec.seed, job.gamma_index, job.trial);
        const Geometry geo = place_network(spec.n_cells, spec.n_users, spec.params, tseed);
        const ChannelRealization channels =
            draw_channels(geo, spec.params, spec.subcarriers, spec.n_antennas, tseed);

        job_records[jid].reserve(static_cast<std::size_t>(runs_per_job));
        for (int bi = 0; bi < static_cast<int>(spec.bits_list.size()); ++bi) {
          const int bits = spec.bits_list[static_cast<std::size_t>(bi)];
          SystemConfig config;
          config.n_cells = spec.n_cells;
          config.n_users = spec.n_users;
          config.n_antennas = spec.n_antennas;
          config.subcarriers = spec.subcarriers;
          config.bits = bits;
          config.noise_power_w = noise_w;
          config.set_uniform_target(db_to_linear(gamma_db));

          for (int ai = 0; ai < static_cast<int>(spec.algorithms.size()); ++ai) {
            const AlgorithmId alg = spec.algorithms[static_cast<std::size_t>(ai)];
            MetricRecord rec;
            rec.scenario = scenario_name(spec.scenario);
            rec.algorithm = algorithm_name(alg);
            rec.bits = bits;
            rec.gamma_db = gamma_db;
            rec.trial = job.trial;

            BaselineResult result;
            bool solved = true;
            try {
              switch (alg) {
                case AlgorithmId::kQcompPa: {
                  SolveResult r = run_qcomp_pa(config, channels, spec.settings);
                  result.algorithm = AlgorithmId::kQcompPa;
                  result.beamformers = std::move(r.beamformers);
                  result.report = std::move(r.report);
                  result.converged = result.report.converged;
                  result.outer_iterations = result.report.outer_iterations;
                  break;
                }
                case AlgorithmId::kQcomp:
                  result = run_qcomp(config, channels, spec.settings);
                  break;
                case AlgorithmId::kQpercell:
                  result = run_qpercell(config, channels, spec.settings);
                  break;
                case AlgorithmId::kSocpOracle:
                  result = socp_oracle(config, channels);
                  break;
              }
            } catch (const InfeasibleTargetError&) {
              solved = false;
            } catch (const NoConvergenceError&) {
              solved = false;
            }

            if (solved) {
              rec.converged = result.converged;
              rec.p0_dbm = result.report.p0_dbm;
              rec.total_dbm = result.report.total_power_dbm;
              const auto& pw = result.report.antenna_power_w;
              rec.antenna_powers_dbm.reserve(static_cast<std::size_t>(pw.size()));
              for (Eigen::Index i = 0; i < pw.rows(); ++i) {
                for (Eigen::Index m = 0; m < pw.cols(); ++m) {
                  rec.antenna_powers_dbm.push_back(pw(i, m) > 0 ? watts_to_dbm(pw(i, m))
                                                                : -300.0);
                }
              }
              const QuantizerSpec qspec = quant_gain(bits);
              rec.papr_db = compute_papr(result.beamformers, qspec, spec.papr_draws,
                                         Rng::derive(tseed, 0x70617072, ai, bi), spec.papr_mode)
                                .papr_db;
              if (spec.emit_trial_json) {
                std::ostringstream name;
                name << "trial_" << rec.scenario << "_" << rec.algorithm << "_b"
                     << bits_label(bits) << "_g" << format_double(gamma_db) << "_t" << job.trial
                     << ".json";
                job_reports[jid].emplace_back(
                    name.str(), baseline_to_json(result, spec.n_users, spec.subcarriers));
              }
            } else {
              rec.converged = false;
              rec.p0_dbm = rec.total_dbm = rec.papr_db =
                  std::numeric_limits<double>::quiet_NaN();
            }
            job_records[jid].push_back(std::move(rec));
          }
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  const int n_threads = std::max(1, std::min<int>(spec.threads, static_cast<int>(jobs.size())));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  SweepOutput out;
  for (std::size_t jid = 0; jid < jobs.size(); ++jid) {
    for (auto& r : job_records[jid]) out.records.push_back(std::move(r));
    for (auto& r : job_reports[jid]) out.trial_reports.push_back(std::move(r));
  }
  std::sort(out.records.begin(), out.records.end(), record_key_less);

  // Aggregates per (algorithm, bits, gamma) over converged trials.
  for (const AlgorithmId alg : spec.algorithms) {
    for (const int bits : spec.bits_list) {
      for (const double gamma_db : spec.gamma_db_list) {
        SweepAggregate agg;
        agg.scenario = scenario_name(spec.scenario);
        agg.algorithm = algorithm_name(alg);
        agg.bits = bits;
        agg.gamma_db = gamma_db;
        std::vector<double> p0s, paprs;
        for (const auto& r : out.records) {
          if (r.algorithm != agg.algorithm || r.bits != bits || r.gamma_db != gamma_db) continue;
          ++agg.total_trials;
          if (r.converged && std::isfinite(r.p0_dbm)) {
            ++agg.converged_trials;
            p0s.push_back(r.p0_dbm);
            paprs.push_back(r.papr_db);
          }
        }
        if (!p0s.empty()) {
          agg.mean_p0_dbm = std::accumulate(p0s.begin(), p0s.end(), 0.0) / p0s.size();
          agg.mean_papr_db = std::accumulate(paprs.begin(), paprs.end(), 0.0) / paprs.size();
          std::sort(p0s.begin(), p0s.end());
          agg.median_p0_dbm = p0s[p0s.size() / 2];
        } else {
          agg.all_infeasible = true;
        }
        out.aggregates.push_back(std::move(agg));
      }
    }
  }
  return out;
}

std::string metrics_to_csv(const std::vector<MetricRecord>& records) {
  std::ostringstream os;
  os << "scenario,algorithm,bits,gamma_db,trial,p0_dbm,total_dbm,papr_db,converged\n";
  for (const auto& r : records) {
    os << r.scenario << ',' << r.algorithm << ',' << bits_label(r.bits) << ','
       << format_double(r.gamma_db) << ',' << r.trial << ',' << format_double(r.p0_dbm) << ','
       << format_double(r.total_dbm) << ',' << format_double(r.papr_db) << ','
       << (r.converged ? 1 : 0) << '\n';
  }
  return os.str();
}

std::vector<MetricRecord> metrics_from_csv(const std::string& csv) {
  std::istringstream is(csv);
  std::string line;
  if (!std::getline(is, line) ||
      line != "scenario,algorithm,bits,gamma_db,trial,p0_dbm,total_dbm,papr_db,converged") {
    throw InvalidParameterError("metrics_from_csv: missing or wrong header");
  }
  std::vector<MetricRecord> records;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (cells.size() != 9) throw InvalidParameterError("metrics_from_csv: bad row: " + line);
    MetricRecord r;
    r.scenario = cells[0];
    r.algorithm = cells[1];
    r.bits = bits_from_label(cells[2]);
    r.gamma_db = std::stod(cells[3]);
    r.trial = std::stoi(cells[4]);
    r.p0_dbm = cells[5] == "nan" ? std::numeric_limits<double>::quiet_NaN() : std::stod(cells[5]);
    r.total_dbm = cells[6] == "nan" ? std::numeric_limits<double>::quiet_NaN() : std::stod(cells[6]);
    r.papr_db = cells[7] == "nan" ? std::numeric_limits<double>::quiet_NaN() : std::stod(cells[7]);
    r.converged = cells[8] == "1";
    records.push_back(std::move(r));
  }
  return records;
}

void write_sweep_outputs(const SweepOutput& out, const SweepSpec& spec,
                         const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  {
    std::ofstream f(out_dir + "/sweep.csv", std::ios::binary);
    f << metrics_to_csv(out.records);
  }
  {
    nlohmann::ordered_json aggs = nlohmann::ordered_json::array();
    for (const auto& a : out.aggregates) {
      nlohmann::ordered_json j;
      j["scenario"] = a.scenario;
      j["algorithm"] = a.algorithm;
      j["bits"] = bits_label(a.bits);
      j["gamma_db"] = a.gamma_db;
      j["converged_trials"] = a.converged_trials;
      j["total_trials"] = a.total_trials;
      j["all_infeasible"] = a.all_infeasible;
      if (!a.all_infeasible) {
        j["mean_p0_dbm"] = a.mean_p0_dbm;
        j["median_p0_dbm"] = a.median_p0_dbm;
        j["mean_papr_db"] = a.mean_papr_db;
      }
      aggs.push_back(std::move(j));
    }
    std::ofstream f(out_dir + "/aggregates.json", std::ios::binary);
    f << aggs.dump(1) << "\n";
  }
  // gamma -> mean p0 curves, one file per (algorithm, bits).
  for (const AlgorithmId alg : spec.algorithms) {
    for (const int bits : spec.bits_list) {
      std::ostringstream name;
      name << out_dir << "/p0_vs_gamma_" << algorithm_name(alg) << "_b" << bits_label(bits)
           << ".dat";
      std::ofstream f(name.str(), std::ios::binary);
      for (const auto& a : out.aggregates) {
        if (a.algorithm != algorithm_name(alg) || a.bits != bits || a.all_infeasible) continue;
        f << format_double(a.gamma_db) << ' ' << format_double(a.mean_p0_dbm) << '\n';
      }
    }
  }
  // Pooled antenna-power CDFs, one file per (algorithm, bits, gamma).
  for (const AlgorithmId alg : spec.algorithms) {
    for (const int bits : spec.bits_list) {
      for (const double gamma_db : spec.gamma_db_list) {
        std::vector<double> pooled;
        for (const auto& r : out.records) {
          if (r.algorithm != algorithm_name(alg) || r.bits != bits || r.gamma_db != gamma_db ||
              !r.converged) {
            continue;
          }
          pooled.insert(pooled.end(), r.antenna_powers_dbm.begin(),
                        r.antenna_powers_dbm.end());
        }
        if (pooled.empty()) continue;
        std::ostringstream name;
        name << out_dir << "/antenna_cdf_" << algorithm_name(alg) << "_b" << bits_label(bits)
             << "_g" << format_double(gamma_db) << ".dat";
        std::ofstream f(name.str(), std::ios::binary);
        for (const auto& [value, fraction] : empirical_cdf(pooled)) {
          f << format_double(value) << ' ' << format_double(fraction) << '\n';
        }
      }
    }
  }
  for (const auto& [name, json] : out.trial_reports) {
    std::ofstream f(out_dir + "/" + name, std::ios::binary);
    f << json.dump(1) << "\n";
  }
}

}  // namespace qcomp
