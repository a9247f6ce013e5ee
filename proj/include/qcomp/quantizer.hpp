#pragma once

#include <Eigen/Dense>
#include <vector>

#include "qcomp/common.hpp"

namespace qcomp {

/// Scalar MMSE (Lloyd-Max) quantizer for a unit-variance real Gaussian,
/// plus the AQNM gain pair: beta is the normalized distortion, alpha = 1 - beta.
/// `bits == kInfiniteBits` models ideal converters (alpha = 1, beta = 0, no levels).
struct QuantizerSpec {
  static constexpr int kInfiniteBits = -1;

  int bits = kInfiniteBits;
  double alpha = 1.0;
  double beta = 0.0;
  std::vector<double> levels;      // 2^bits reproduction points, sorted, symmetric about 0
  std::vector<double> thresholds;  // 2^bits - 1 decision boundaries, sorted

  bool is_infinite() const { return bits == kInfiniteBits; }
};

/// Designs (and caches) the quantizer for the given resolution.
/// Supported: bits in {1,2,3,4,5} or QuantizerSpec::kInfiniteBits.
QuantizerSpec quant_gain(int bits);

/// Element-wise quantization of a complex vector. Real and imaginary parts are
/// quantized independently; `input_variance` is the variance of each real and
/// imaginary component (callers holding a complex power P pass P/2). Infinite
/// resolution returns the input unchanged. An exactly-zero component maps to 0.
Eigen::VectorXcd quantize(const Eigen::VectorXcd& x, const QuantizerSpec& spec,
                          double input_variance);

/// Scalar convenience used by the vector overload and the Monte-Carlo harnesses.
double quantize_component(double v, const QuantizerSpec& spec, double input_variance);

/// Per-antenna diagonal of the quantization-noise covariance for one cell's
/// per-subcarrier precoders W(0..K-1): Delta_q = alpha*beta * (1/K) sum_k diag(W(k) W(k)^H).
/// The full stacked covariance is I_K (x) Delta_q.
Eigen::VectorXd quant_noise_diag(const std::vector<Eigen::MatrixXcd>& precoders,
                                 const QuantizerSpec& spec);

}  // namespace qcomp
