#include "qcomp/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "qcomp/ofdm.hpp"

namespace qcomp {

namespace {
constexpr std::uint64_t kPaprStream = 0x70617072;
constexpr int kNarrowbandFrame = 256;

// Peak-to-average of one antenna's time samples; false when the antenna is
// silent over the window.
bool papr_of_samples(const Eigen::VectorXcd& samples, double* papr) {
  const double mean = samples.squaredNorm() / static_cast<double>(samples.size());
  if (!(mean > 0.0)) return false;
  double peak = 0.0;
  for (Eigen::Index n = 0; n < samples.size(); ++n) peak = std::max(peak, std::norm(samples[n]));
  *papr = peak / mean;
  return true;
}

}  // namespace

double papr_db_of_freq_symbols(const Eigen::VectorXcd& freq_symbols, int subcarriers,
                               int n_antennas, const QuantizerSpec& spec, PaprMode mode) {
  Eigen::VectorXcd x = ofdm_modulate(freq_symbols, subcarriers, n_antennas);
  double acc = 0.0;
  int counted = 0;
  for (int m = 0; m < n_antennas; ++m) {
    Eigen::VectorXcd samples(subcarriers);
    for (int n = 0; n < subcarriers; ++n) samples[n] = x[n * n_antennas + m];
    if (mode == PaprMode::kQuantized && !spec.is_infinite()) {
      const double power = samples.squaredNorm() / subcarriers;
      if (power > 0.0) samples = quantize(samples, spec, 0.5 * power);
    }
    double papr = 0.0;
    if (papr_of_samples(samples, &papr)) {
      acc += linear_to_db(papr);
      ++counted;
    }
  }
  if (counted == 0) throw InvalidParameterError("papr: all antennas are silent");
  return acc / counted;
}

PaprResult compute_papr(const BeamformerSet& W, const QuantizerSpec& spec, int symbol_draws,
                        std::uint64_t seed, PaprMode mode) {
  if (symbol_draws < 100) {
    throw InvalidParameterError("compute_papr: need at least 100 symbol draws");
  }
  const int nc = W.n_cells, nu = W.n_users, nb = W.n_antennas, nk = W.subcarriers;
  Rng rng(Rng::derive(seed, kPaprStream));

  // Analytic per-antenna signal power; fixed across time by the collapse.
  std::vector<Eigen::VectorXd> power(static_cast<std::size_t>(nc));
  std::vector<std::vector<Eigen::MatrixXcd>> blocks(static_cast<std::size_t>(nc));
  PaprResult result;
  for (int i = 0; i < nc; ++i) {
    blocks[i] = W.cell_blocks(i);
    Eigen::VectorXd p = Eigen::VectorXd::Zero(nb);
    for (const auto& wk : blocks[i]) p += wk.rowwise().squaredNorm();
    power[i] = p / static_cast<double>(nk);
    for (int m = 0; m < nb; ++m) {
      if (!(power[i][m] > 0.0)) ++result.excluded_antennas;
    }
  }

  const bool quantized = mode == PaprMode::kQuantized && !spec.is_infinite();
  double acc = 0.0;
  long counted = 0;

  if (nk > 1) {
    for (int draw = 0; draw < symbol_draws; ++draw) {
      for (int i = 0; i < nc; ++i) {
        Eigen::VectorXcd u(nk * nb);
        for (int k = 0; k < nk; ++k) {
          Eigen::VectorXcd s(nu);
          for (int v = 0; v < nu; ++v) s[v] = rng.cgaussian();
          u.segment(k * nb, nb) = blocks[i][static_cast<std::size_t>(k)] * s;
        }
        const Eigen::VectorXcd x = ofdm_modulate(u, nk, nb);
        for (int m = 0; m < nb; ++m) {
          if (!(power[i][m] > 0.0)) continue;
          Eigen::VectorXcd samples(nk);
          for (int n = 0; n < nk; ++n) samples[n] = x[n * nb + m];
          if (quantized) samples = quantize(samples, spec, 0.5 * power[i][m]);
          double papr = 0.0;
          if (papr_of_samples(samples, &papr)) {
            acc += linear_to_db(papr);
            ++counted;
          }
        }
      }
    }
  } else {
    // Narrowband: peak over a frame of consecutive symbols per antenna.
    const int frame = std::min(kNarrowbandFrame, symbol_draws);
    const int n_frames = symbol_draws / frame;
    for (int fidx = 0; fidx < n_frames; ++fidx) {
      for (int i = 0; i < nc; ++i) {
        Eigen::MatrixXcd x(nb, frame);
        for (int n = 0; n < frame; ++n) {
          Eigen::VectorXcd s(nu);
          for (int v = 0; v < nu; ++v) s[v] = rng.cgaussian();
          x.col(n) = blocks[i][0] * s;
        }
        for (int m = 0; m < nb; ++m) {
          if (!(power[i][m] > 0.0)) continue;
          Eigen::VectorXcd samples = x.row(m).transpose();
          if (quantized) samples = quantize(samples, spec, 0.5 * power[i][m]);
          double papr = 0.0;
          if (papr_of_samples(samples, &papr)) {
            acc += linear_to_db(papr);
            ++counted;
          }
        }
      }
    }
  }

  if (counted == 0) throw InvalidParameterError("compute_papr: no active antennas");
  result.papr_db = acc / static_cast<double>(counted);
  return result;
}

std::vector<std::pair<double, double>> empirical_cdf(const std::vector<double>& samples) {
  if (samples.empty()) throw InvalidParameterError("empirical_cdf: no samples");
  std::vector<double> sorted = samples;
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::pair<double, double>> cdf;
  cdf.reserve(sorted.size());
  const double n = static_cast<double>(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    cdf.emplace_back(sorted[i], static_cast<double>(i + 1) / n);
  }
  return cdf;
}

}  // namespace qcomp
