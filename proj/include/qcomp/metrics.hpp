#pragma once

#include <utility>
#include <vector>

#include "qcomp/primal.hpp"
#include "qcomp/quantizer.hpp"

namespace qcomp {

enum class PaprMode {
  kQuantized,        // PAPR of the converter output (default)
  kPreQuantization,  // PAPR of the ideal time-domain waveform
};

struct PaprResult {
  double papr_db = 0.0;
  int excluded_antennas = 0;  // zero-power antennas skipped (with their cells)
};

/// Monte-Carlo PAPR of the transmit waveform: draw unit symbols per
/// subcarrier, precode, OFDM-modulate, (optionally) quantize, and take the
/// per-antenna peak-to-average ratio per OFDM symbol; the result averages the
/// dB values across antennas, cells and draws. For K = 1 the peak is taken
/// over frames of 256 consecutive symbols instead (a single narrowband sample
/// has no envelope variation to measure).
PaprResult compute_papr(const BeamformerSet& beamformers, const QuantizerSpec& spec,
                        int symbol_draws, std::uint64_t seed,
                        PaprMode mode = PaprMode::kQuantized);

/// PAPR in dB of one deterministic stack of frequency-domain antenna symbols
/// (length K*N_b); building block of the Monte-Carlo estimator, exposed for
/// direct use on crafted inputs.
double papr_db_of_freq_symbols(const Eigen::VectorXcd& freq_symbols, int subcarriers,
                               int n_antennas, const QuantizerSpec& spec,
                               PaprMode mode = PaprMode::kQuantized);

/// Sorted (value, cumulative fraction) pairs; fractions end at 1.
std::vector<std::pair<double, double>> empirical_cdf(const std::vector<double>& samples);

}  // namespace qcomp
