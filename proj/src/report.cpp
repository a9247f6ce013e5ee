#include "qcomp/report.hpp"

namespace qcomp {

std::string bits_label(int bits) {
  return bits == QuantizerSpec::kInfiniteBits ? "inf" : std::to_string(bits);
}

int bits_from_label(const std::string& label) {
  if (label == "inf" || label == "infinite") return QuantizerSpec::kInfiniteBits;
  try {
    return std::stoi(label);
  } catch (const std::exception&) {
    throw InvalidParameterError("unparseable converter resolution '" + label + "'");
  }
}

nlohmann::ordered_json report_to_json(const SolveReport& rep, int n_users, int subcarriers) {
  nlohmann::ordered_json j;
  j["p0_dbm"] = rep.p0_dbm;
  j["p0_watts"] = rep.p0_w;
  j["total_power_dbm"] = rep.total_power_dbm;
  j["total_power_watts"] = rep.total_power_w;
  j["dual_objective"] = rep.dual_objective;
  j["duality_gap_rel"] = rep.duality_gap_rel;
  j["converged"] = rep.converged;
  j["stop_reason"] = rep.stop_reason;
  j["outer_iterations"] = rep.outer_iterations;
  j["lambda_sweeps"] = rep.lambda_sweeps;

  nlohmann::ordered_json links = nlohmann::ordered_json::array();
  const int n_links = static_cast<int>(rep.sqinr_target.size());
  for (int idx = 0; idx < n_links; ++idx) {
    nlohmann::ordered_json e;
    const int k = idx % subcarriers;
    const int u = (idx / subcarriers) % n_users;
    const int i = idx / (subcarriers * n_users);
    e["cell"] = i;
    e["user"] = u;
    e["subcarrier"] = k;
    e["gamma_target"] = rep.sqinr_target[static_cast<std::size_t>(idx)];
    if (idx < static_cast<int>(rep.sqinr_achieved.size())) {
      e["gamma_achieved"] = rep.sqinr_achieved[static_cast<std::size_t>(idx)];
    }
    if (idx < static_cast<int>(rep.lambda.size())) {
      e["lambda"] = rep.lambda[static_cast<std::size_t>(idx)];
    }
    links.push_back(std::move(e));
  }
  j["links"] = std::move(links);

  nlohmann::ordered_json powers = nlohmann::ordered_json::array();
  for (Eigen::Index i = 0; i < rep.antenna_power_w.rows(); ++i) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (Eigen::Index m = 0; m < rep.antenna_power_w.cols(); ++m) {
      row.push_back(rep.antenna_power_w(i, m));
    }
    powers.push_back(std::move(row));
  }
  j["antenna_power_watts"] = std::move(powers);
  return j;
}

nlohmann::ordered_json baseline_to_json(const BaselineResult& res, int n_users,
                                        int subcarriers) {
  nlohmann::ordered_json j;
  j["algorithm"] = algorithm_name(res.algorithm);
  j["converged"] = res.converged;
  j["outer_iterations"] = res.outer_iterations;
  j["report"] = report_to_json(res.report, n_users, subcarriers);
  return j;
}

}  // namespace qcomp
