#pragma once

#include <nlohmann/json.hpp>
#include <string>

#include "qcomp/baselines.hpp"
#include "qcomp/dual.hpp"

namespace qcomp {

nlohmann::ordered_json report_to_json(const SolveReport& report, int n_users, int subcarriers);

nlohmann::ordered_json baseline_to_json(const BaselineResult& result, int n_users,
                                        int subcarriers);

/// Human-readable resolution label: "1".."5" or "inf".
std::string bits_label(int bits);
int bits_from_label(const std::string& label);

}  // namespace qcomp
