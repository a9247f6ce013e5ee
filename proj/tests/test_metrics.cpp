#include <doctest.h>

#include "helpers.hpp"
#include "qcomp/metrics.hpp"

using namespace qcomp;

TEST_CASE("papr of crafted frequency-domain inputs") {
  const QuantizerSpec ideal = quant_gain(QuantizerSpec::kInfiniteBits);
  const int K = 8, nb = 2;

  // A single occupied subcarrier has a constant-envelope time signal.
  Eigen::VectorXcd impulse = Eigen::VectorXcd::Zero(K * nb);
  impulse[3 * nb] = cxd(0.7, -0.2);
  CHECK(papr_db_of_freq_symbols(impulse, K, nb, ideal) == doctest::Approx(0.0).epsilon(1e-10));

  // All-ones on one antenna concentrates the energy in one time sample.
  Eigen::VectorXcd ones = Eigen::VectorXcd::Zero(K * nb);
  for (int k = 0; k < K; ++k) ones[k * nb] = cxd(1.0, 0.0);
  CHECK(papr_db_of_freq_symbols(ones, K, nb, ideal) ==
        doctest::Approx(10.0 * std::log10(static_cast<double>(K))).epsilon(1e-10));
}

TEST_CASE("compute_papr: deterministic, and silent antennas are excluded") {
  BeamformerSet w = BeamformerSet::zero(1, 1, 3, 4);
  for (int k = 0; k < 4; ++k) {
    w.at(0, 0, k)[0] = cxd(1.0, 0.0);
    w.at(0, 0, k)[1] = cxd(0.0, 0.5);
    // antenna 2 stays silent
  }
  const QuantizerSpec spec = quant_gain(3);
  const PaprResult a = compute_papr(w, spec, 400, 42);
  const PaprResult b = compute_papr(w, spec, 400, 42);
  CHECK(a.papr_db == b.papr_db);
  CHECK(a.excluded_antennas == 1);
  CHECK(a.papr_db > 0.0);

  const PaprResult other_seed = compute_papr(w, spec, 400, 43);
  CHECK(a.papr_db != other_seed.papr_db);
}

TEST_CASE("compute_papr: narrowband frames and the draw floor") {
  BeamformerSet w = BeamformerSet::zero(1, 1, 2, 1);
  w.at(0, 0, 0) << cxd(1.0, 0.0), cxd(0.4, 0.3);
  const QuantizerSpec spec = quant_gain(QuantizerSpec::kInfiniteBits);
  CHECK_THROWS_AS(compute_papr(w, spec, 50, 1), InvalidParameterError);
  const PaprResult r = compute_papr(w, spec, 2048, 1);
  // Peak over a 256-symbol Gaussian frame sits well above the mean.
  CHECK(r.papr_db > 3.0);
}

TEST_CASE("compute_papr: quantization clips the peaks") {
  Rng rng(7);
  BeamformerSet w = BeamformerSet::zero(1, 2, 4, 8);
  for (auto& v : w.w)
    for (int m = 0; m < 4; ++m) v[m] = rng.cgaussian();
  const double coarse = compute_papr(w, quant_gain(1), 400, 9).papr_db;
  const double ideal =
      compute_papr(w, quant_gain(QuantizerSpec::kInfiniteBits), 400, 9).papr_db;
  CHECK(coarse < ideal);
  const double pre = compute_papr(w, quant_gain(1), 400, 9, PaprMode::kPreQuantization).papr_db;
  CHECK(pre == doctest::Approx(ideal).epsilon(1e-12));
}

TEST_CASE("empirical_cdf: basics") {
  CHECK_THROWS_AS(empirical_cdf({}), InvalidParameterError);

  const auto single = empirical_cdf({2.5});
  REQUIRE(single.size() == 1);
  CHECK(single[0].first == 2.5);
  CHECK(single[0].second == 1.0);

  const auto three = empirical_cdf({3.0, 1.0, 2.0});
  CHECK(three[0] == std::pair<double, double>{1.0, 1.0 / 3.0});
  CHECK(three[1] == std::pair<double, double>{2.0, 2.0 / 3.0});
  CHECK(three[2] == std::pair<double, double>{3.0, 1.0});
}

TEST_CASE("empirical_cdf: fractions are monotone and end at one") {
  Rng rng(11);
  std::vector<double> samples;
  for (int i = 0; i < 257; ++i) samples.push_back(rng.gaussian());
  const auto cdf = empirical_cdf(samples);
  for (std::size_t i = 1; i < cdf.size(); ++i) {
    CHECK(cdf[i].first >= cdf[i - 1].first);
    CHECK(cdf[i].second > cdf[i - 1].second);
  }
  CHECK(cdf.back().second == 1.0);
}
