#pragma once

#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "qcomp/baselines.hpp"
#include "qcomp/metrics.hpp"
#include "qcomp/network.hpp"

namespace qcomp {

enum class Scenario { kWideband, kNarrowband };

std::string scenario_name(Scenario s);
Scenario scenario_from_name(const std::string& name);
ScenarioParams scenario_params(Scenario s);

/// One experiment: a gamma sweep over Monte-Carlo channel draws, each trial
/// run through the requested algorithms at every converter resolution.
struct SweepSpec {
  Scenario scenario = Scenario::kWideband;
  int n_antennas = 8;
  int n_cells = 3;
  int n_users = 2;
  int subcarriers = 16;
  std::vector<int> bits_list = {3};
  std::vector<double> gamma_db_list = {0.0};
  int trials = 1;
  std::uint64_t seed = 1;
  std::vector<AlgorithmId> algorithms = {AlgorithmId::kQcompPa, AlgorithmId::kQcomp};
  SolverSettings settings;
  ScenarioParams params = ScenarioParams::wideband();
  int papr_draws = 256;
  PaprMode papr_mode = PaprMode::kQuantized;
  bool emit_trial_json = false;
  int threads = 1;

  void validate() const;
};

/// Parses the JSON config shape documented in the README; unknown keys are an
/// error.
SweepSpec sweep_spec_from_json(const nlohmann::json& j);

struct MetricRecord {
  std::string scenario;
  std::string algorithm;
  int bits = QuantizerSpec::kInfiniteBits;
  double gamma_db = 0.0;
  int trial = 0;
  double p0_dbm = 0.0;
  double total_dbm = 0.0;
  double papr_db = 0.0;
  bool converged = false;
  std::vector<double> antenna_powers_dbm;  // not part of the CSV row

  bool operator==(const MetricRecord& o) const;
};

struct SweepAggregate {
  std::string scenario;
  std::string algorithm;
  int bits = QuantizerSpec::kInfiniteBits;
  double gamma_db = 0.0;
  int converged_trials = 0;
  int total_trials = 0;
  double mean_p0_dbm = 0.0;    // over converged trials
  double median_p0_dbm = 0.0;  // over converged trials
  double mean_papr_db = 0.0;
  bool all_infeasible = false;
};

struct SweepOutput {
  std::vector<MetricRecord> records;  // sorted by keys
  std::vector<SweepAggregate> aggregates;
  std::vector<std::pair<std::string, nlohmann::ordered_json>> trial_reports;
};

/// Documented splittable seeding: the per-trial stream is
/// Rng::derive(sweep_seed, gamma_index, trial). Channels are shared by all
/// algorithms and resolutions within a trial.
std::uint64_t trial_seed(std::uint64_t sweep_seed, int gamma_index, int trial);

SweepOutput run_sweep(const SweepSpec& spec);

/// CSV with the fixed header
/// scenario,algorithm,bits,gamma_db,trial,p0_dbm,total_dbm,papr_db,converged.
std::string metrics_to_csv(const std::vector<MetricRecord>& records);
std::vector<MetricRecord> metrics_from_csv(const std::string& csv);

/// Writes sweep.csv, aggregates.json, the plot-ready .dat files and any
/// per-trial reports under out_dir (created if missing).
void write_sweep_outputs(const SweepOutput& out, const SweepSpec& spec,
                         const std::string& out_dir);

}  // namespace qcomp
