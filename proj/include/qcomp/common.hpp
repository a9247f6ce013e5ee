#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace qcomp {

using cxd = std::complex<double>;

// ---------------------------------------------------------------------------
// Error taxonomy. Every failure surfaced by the library derives from Error so
// callers can catch broadly; specific types carry the contract violated.
// ---------------------------------------------------------------------------

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidDimensionError : Error { using Error::Error; };
struct InvalidParameterError : Error { using Error::Error; };
struct UnsupportedResolutionError : Error { using Error::Error; };
struct DelaySpreadError : Error { using Error::Error; };
struct InfeasibleGeometryError : Error { using Error::Error; };

/// SQINR targets exceed what the quantization ceiling admits; the virtual
/// uplink powers diverge.
struct InfeasibleTargetError : Error { using Error::Error; };
struct NoConvergenceError : Error { using Error::Error; };
struct SingularSystemError : Error { using Error::Error; };
struct DegenerateDualityError : Error { using Error::Error; };
struct InvalidScalingError : Error { using Error::Error; };

// ---------------------------------------------------------------------------
// dB / power helpers
// ---------------------------------------------------------------------------

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }
inline double watts_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }
inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

/// Flat index for (cell, user, subcarrier) tensors; subcarrier fastest.
inline int link_index(int cell, int user, int subcarrier, int n_users, int n_subcarriers) {
  return (cell * n_users + user) * n_subcarriers + subcarrier;
}

// ---------------------------------------------------------------------------
// Deterministic RNG.
//
// splitmix64 core with Box-Muller Gaussians. We do not use <random>
// distributions: their output is implementation-defined, and the sweep
// contract requires byte-identical results for equal seeds. Substreams are
// derived with `derive`, which hashes the parent seed together with up to
// three stream tags; this is the documented splittable scheme used for
// per-trial and per-link streams.
// ---------------------------------------------------------------------------

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal.
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  /// Circularly symmetric complex normal with E|x|^2 = 1.
  cxd cgaussian() {
    const double re = gaussian();
    const double im = gaussian();
    return cxd(re * M_SQRT1_2, im * M_SQRT1_2);
  }

  static std::uint64_t derive(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                              std::uint64_t c = 0) {
    Rng h(seed);
    std::uint64_t s = h.next_u64() ^ (a * 0x9e3779b97f4a7c15ULL);
    Rng h2(s);
    s = h2.next_u64() ^ (b * 0xbf58476d1ce4e5b9ULL);
    Rng h3(s);
    return h3.next_u64() ^ (c * 0x94d049bb133111ebULL);
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace qcomp
