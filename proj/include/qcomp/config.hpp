#pragma once

#include <vector>

#include "qcomp/common.hpp"
#include "qcomp/quantizer.hpp"

namespace qcomp {

/// Network dimensions, converter resolution, noise power and SQINR targets for
/// one solve. Targets are linear (not dB), indexed per (cell, user, subcarrier).
struct SystemConfig {
  int n_cells = 1;       // N_c
  int n_users = 1;       // N_u per cell
  int n_antennas = 1;    // N_b per BS
  int subcarriers = 1;   // K
  int bits = QuantizerSpec::kInfiniteBits;
  double noise_power_w = 1.0;  // sigma^2
  std::vector<double> sqinr_targets;

  int links() const { return n_cells * n_users * subcarriers; }
  int index(int cell, int user, int subcarrier) const {
    return link_index(cell, user, subcarrier, n_users, subcarriers);
  }

  void set_uniform_target(double gamma_linear) {
    sqinr_targets.assign(static_cast<std::size_t>(links()), gamma_linear);
  }

  void validate() const {
    if (n_cells < 1 || n_users < 1 || n_antennas < 1 || subcarriers < 1) {
      throw InvalidDimensionError("SystemConfig: all dimensions must be positive");
    }
    if (!(noise_power_w > 0.0)) {
      throw InvalidParameterError("SystemConfig: noise power must be positive");
    }
    if (static_cast<int>(sqinr_targets.size()) != links()) {
      throw InvalidDimensionError("SystemConfig: expected " + std::to_string(links()) +
                                  " SQINR targets, got " + std::to_string(sqinr_targets.size()));
    }
    for (double g : sqinr_targets) {
      if (!(g > 0.0)) throw InvalidParameterError("SystemConfig: SQINR targets must be positive");
    }
  }
};

}  // namespace qcomp
