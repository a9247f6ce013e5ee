#include "qcomp/quantizer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <mutex>

namespace qcomp {

namespace {

double norm_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI); }
double norm_cdf(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

double norm_quantile(double p) {
  double lo = -12.0, hi = 12.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (norm_cdf(mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Lloyd-Max design for a unit-variance Gaussian source: levels are conditional
// means of their cells, thresholds are midpoints; iterate to a fixed point.
QuantizerSpec design(int bits) {
  QuantizerSpec spec;
  spec.bits = bits;
  const int n = 1 << bits;
  std::vector<double> c(n);
  for (int i = 0; i < n; ++i) c[i] = norm_quantile((i + 0.5) / n);

  std::vector<double> t(n - 1), p(n), m(n);
  const double inf = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < 500000; ++iter) {
    for (int i = 0; i + 1 < n; ++i) t[i] = 0.5 * (c[i] + c[i + 1]);
    double delta = 0.0;
    for (int i = 0; i < n; ++i) {
      const double a = (i == 0) ? -inf : t[i - 1];
      const double b = (i == n - 1) ? inf : t[i];
      const double pa = (i == 0) ? 0.0 : norm_pdf(a);
      const double pb = (i == n - 1) ? 0.0 : norm_pdf(b);
      p[i] = ((i == n - 1) ? 1.0 : norm_cdf(b)) - ((i == 0) ? 0.0 : norm_cdf(a));
      m[i] = pa - pb;
      const double next = (p[i] > 1e-300) ? m[i] / p[i] : c[i];
      delta = std::max(delta, std::abs(next - c[i]));
      c[i] = next;
    }
    if (delta < 1e-13) break;
  }

  // Enforce the symmetry the source guarantees; kills accumulated drift.
  for (int i = 0; i < n / 2; ++i) {
    const double v = 0.5 * (c[n - 1 - i] - c[i]);
    c[i] = -v;
    c[n - 1 - i] = v;
  }
  for (int i = 0; i + 1 < n; ++i) t[i] = 0.5 * (c[i] + c[i + 1]);

  double second_moment = 0.0;
  for (int i = 0; i < n; ++i) {
    const double a = (i == 0) ? 0.0 : norm_cdf(t[i - 1]);
    const double b = (i == n - 1) ? 1.0 : norm_cdf(t[i]);
    second_moment += (b - a) * c[i] * c[i];
  }
  spec.beta = 1.0 - second_moment;
  spec.alpha = 1.0 - spec.beta;
  spec.levels = std::move(c);
  spec.thresholds = std::move(t);
  return spec;
}

}  // namespace

QuantizerSpec quant_gain(int bits) {
  if (bits == QuantizerSpec::kInfiniteBits) {
    return QuantizerSpec{};
  }
  if (bits < 1 || bits > 5) {
    throw UnsupportedResolutionError("quant_gain: unsupported resolution " +
                                     std::to_string(bits) + " bits (supported: 1..5, infinite)");
  }
  static std::array<QuantizerSpec, 6> cache;
  static std::array<std::once_flag, 6> once;
  std::call_once(once[bits], [bits] { cache[bits] = design(bits); });
  return cache[bits];
}

double quantize_component(double v, const QuantizerSpec& spec, double input_variance) {
  if (spec.is_infinite()) return v;
  if (v == 0.0) return 0.0;
  const double scale = std::sqrt(input_variance);
  const double u = v / scale;
  const auto it = std::upper_bound(spec.thresholds.begin(), spec.thresholds.end(), u);
  const auto cell = static_cast<std::size_t>(it - spec.thresholds.begin());
  return spec.levels[cell] * scale;
}

Eigen::VectorXcd quantize(const Eigen::VectorXcd& x, const QuantizerSpec& spec,
                          double input_variance) {
  if (!(input_variance > 0.0)) {
    throw InvalidParameterError("quantize: input_variance must be positive");
  }
  if (spec.is_infinite()) return x;
  Eigen::VectorXcd out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    out[i] = cxd(quantize_component(x[i].real(), spec, input_variance),
                 quantize_component(x[i].imag(), spec, input_variance));
  }
  return out;
}

Eigen::VectorXd quant_noise_diag(const std::vector<Eigen::MatrixXcd>& precoders,
                                 const QuantizerSpec& spec) {
  if (precoders.empty()) throw InvalidDimensionError("quant_noise_diag: no precoder blocks");
  const auto nb = precoders[0].rows();
  Eigen::VectorXd delta = Eigen::VectorXd::Zero(nb);
  for (const auto& w : precoders) {
    if (w.rows() != nb) throw InvalidDimensionError("quant_noise_diag: inconsistent dimensions");
    delta += w.rowwise().squaredNorm();
  }
  return (spec.alpha * spec.beta / static_cast<double>(precoders.size())) * delta;
}

}  // namespace qcomp
