#pragma once

#include "qcomp/config.hpp"
#include "qcomp/network.hpp"
#include "qcomp/primal.hpp"

namespace qcomp {

enum class SocpObjective {
  kMinMaxAntennaPower,  // minimize p0 = max per-antenna power
  kTotalPower,          // minimize the network total transmit power
};

struct SocpResult {
  BeamformerSet beamformers;
  double objective_w = 0.0;  // optimal p0 or total power, watts
  int newton_steps = 0;
};

/// Solves the downlink power problem directly as a second-order-cone program
/// with a primal log-barrier path-following method (damped Newton centering).
/// The SQINR constraints become Lorentz cones via the rotation that makes the
/// desired-signal inner product real; per-antenna (or total-power) limits
/// become parabolic constraints in the epigraph variable. Runs a phase-1
/// feasibility program first and throws InfeasibleTargetError when no strictly
/// feasible point exists. Intended for small verification instances.
SocpResult socp_solve(const SystemConfig& config, const ChannelRealization& channels,
                      SocpObjective objective, double rel_gap_tol = 1e-8);

}  // namespace qcomp
