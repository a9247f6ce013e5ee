#pragma once

#include <string>

#include "qcomp/dual.hpp"
#include "qcomp/socp.hpp"

namespace qcomp {

enum class AlgorithmId { kQcompPa, kQcomp, kQpercell, kSocpOracle };

std::string algorithm_name(AlgorithmId id);
AlgorithmId algorithm_from_name(const std::string& name);

struct BaselineResult {
  AlgorithmId algorithm = AlgorithmId::kQcomp;
  BeamformerSet beamformers;
  SolveReport report;
  bool converged = false;
  int outer_iterations = 0;
};

/// Total-power minimization with full coordination: the same dual pipeline
/// with the virtual noise covariances held at identity (no ascent).
BaselineResult run_qcomp(const SystemConfig& config, const ChannelRealization& channels,
                         const SolverSettings& settings = {});

/// Limited coordination: each cell minimizes its own total transmit power
/// treating inter-cell interference (and cross-cell quantization noise) as a
/// fixed per-user noise floor; cells then exchange solutions and the floors
/// are re-estimated until the solutions stop moving. Diverges at high targets;
/// the result is flagged rather than thrown.
BaselineResult run_qpercell(const SystemConfig& config, const ChannelRealization& channels,
                            const SolverSettings& settings = {});

/// Independent convex-program check: solves the primal directly as an SOCP by
/// a self-contained barrier method. Small instances only.
BaselineResult socp_oracle(const SystemConfig& config, const ChannelRealization& channels,
                           SocpObjective objective = SocpObjective::kMinMaxAntennaPower);

}  // namespace qcomp
