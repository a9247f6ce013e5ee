#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>
#include <vector>

#include "qcomp/common.hpp"
#include "qcomp/ofdm.hpp"

namespace qcomp {

/// Large-scale propagation and layout parameters for one deployment scenario.
struct ScenarioParams {
  double carrier_frequency_hz = 24e9;
  double bandwidth_hz = 100e6;
  double bs_spacing_m = 200.0;
  double min_bs_user_distance_m = 50.0;
  double pathloss_intercept_db = 72.0;
  double pathloss_exponent = 2.92;
  double shadowing_std_db = 8.7;  // lognormal shadowing standard deviation, dB
  double noise_figure_db = 5.0;
  double antenna_gain_db = 15.0;
  int delay_spread_taps = 3;  // L

  /// How the large-scale gain is split across taps. `normalized` divides the
  /// total power equally over L taps so sum_l E|H_l|^2 matches the link
  /// budget; `unit_per_tap` gives every tap the full gain (total L x gain).
  enum class TapPowerMode { normalized, unit_per_tap };
  TapPowerMode tap_power_mode = TapPowerMode::normalized;

  static ScenarioParams wideband();
  static ScenarioParams narrowband();

  void validate() const;
};

struct Geometry {
  std::vector<Eigen::Vector2d> bs;                  // one per cell
  std::vector<std::vector<Eigen::Vector2d>> users;  // [cell][user]
};

/// Places BSs on a square grid (row length ceil(sqrt(N_c)), adjacent spacing =
/// bs_spacing) and drops each user uniformly in its serving BS's square cell,
/// rejecting positions closer than min_bs_user_distance to any BS.
Geometry place_network(int n_cells, int n_users, const ScenarioParams& params,
                       std::uint64_t seed);

/// Link gain in dB: antenna_gain - (intercept + 10*exponent*log10(d) + shadow_draw).
/// Distances below 1 m are clamped to 1 m; `clamped`, when given, reports it.
double large_scale_gain_db(double distance_m, const ScenarioParams& params,
                           double shadow_draw_db, bool* clamped = nullptr);

/// Thermal noise power over `bandwidth_hz` with the given noise figure, in dBm
/// (-174 dBm/Hz spectral density).
double noise_power_dbm(double bandwidth_hz, double noise_figure_db);

/// One multicell channel draw: Rayleigh taps per (BS j, cell i) pair scaled by
/// per-user large-scale gains, plus the derived per-subcarrier blocks.
struct ChannelRealization {
  int n_cells = 0;
  int n_users = 0;
  int n_antennas = 0;
  int subcarriers = 0;
  int taps_L = 0;
  std::uint64_t seed = 0;

  // Indexed by pair_index(j, i): channel between BS_j and the users of cell i.
  std::vector<std::vector<Eigen::MatrixXcd>> taps;  // [pair][l], N_b x N_u
  std::vector<FreqChannelBlock> freq;               // [pair]
  std::vector<Eigen::VectorXd> large_scale;         // [pair], per-user linear gain

  int pair_index(int bs, int cell) const { return bs * n_cells + cell; }
  const Eigen::MatrixXcd& G(int bs, int cell, int subcarrier) const {
    return freq[pair_index(bs, cell)].block[subcarrier];
  }
  /// Uplink-orientation channel column g_{bs,cell,user}(k).
  Eigen::VectorXcd g(int bs, int cell, int user, int subcarrier) const {
    return G(bs, cell, subcarrier).col(user);
  }

  /// Re-derives all frequency blocks from taps (used after deserialization).
  void rebuild_freq();
};

ChannelRealization draw_channels(const Geometry& geometry, const ScenarioParams& params,
                                 int subcarriers, int n_antennas, std::uint64_t seed);

/// Extracts the single-cell sub-network seen by cell `i` (its own BS and users).
ChannelRealization extract_cell(const ChannelRealization& channels, int cell);

// JSON fixture format: dimensions, seed, taps and large-scale gains, complex
// entries as [re, im]. Round-trips bit-exactly through the decimal encoding.
void save_channels_json(const ChannelRealization& channels, std::ostream& os);
ChannelRealization load_channels_json(std::istream& is);
void save_channels_json_file(const ChannelRealization& channels, const std::string& path);
ChannelRealization load_channels_json_file(const std::string& path);

}  // namespace qcomp
