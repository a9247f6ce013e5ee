#include "qcomp/network.hpp"

#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

namespace qcomp {

namespace {
// Substream tags for Rng::derive.
constexpr std::uint64_t kUserDropStream = 0x75736572;
constexpr std::uint64_t kShadowStream = 0x73686164;
constexpr std::uint64_t kTapStream = 0x74617073;
}  // namespace

ScenarioParams ScenarioParams::wideband() { return ScenarioParams{}; }

ScenarioParams ScenarioParams::narrowband() {
  ScenarioParams p;
  p.carrier_frequency_hz = 2.4e9;
  p.bandwidth_hz = 10e6;
  p.bs_spacing_m = 2000.0;
  p.min_bs_user_distance_m = 100.0;
  p.delay_spread_taps = 1;
  return p;
}

void ScenarioParams::validate() const {
  if (!(carrier_frequency_hz > 0) || !(bandwidth_hz > 0) || !(bs_spacing_m > 0) ||
      !(min_bs_user_distance_m > 0) || !(pathloss_intercept_db > 0) ||
      !(shadowing_std_db >= 0) || !(noise_figure_db >= 0) || !(antenna_gain_db >= 0)) {
    throw InvalidParameterError("ScenarioParams: fields must be positive");
  }
  if (delay_spread_taps < 1) throw InvalidParameterError("ScenarioParams: L must be >= 1");
  if (pathloss_exponent < 2.0) {
    throw InvalidParameterError("ScenarioParams: pathloss exponent must be >= 2");
  }
}

Geometry place_network(int n_cells, int n_users, const ScenarioParams& params,
                       std::uint64_t seed) {
  if (n_cells < 1 || n_users < 1) {
    throw InvalidDimensionError("place_network: need at least one cell and one user");
  }
  const double s = params.bs_spacing_m;
  // A user must fit inside its half-spacing square at min distance from the
  // serving BS; the square's farthest corner is at s/sqrt(2).
  if (params.min_bs_user_distance_m >= s * M_SQRT1_2) {
    throw InfeasibleGeometryError("place_network: min BS-user distance " +
                                  std::to_string(params.min_bs_user_distance_m) +
                                  " m cannot be met inside a " + std::to_string(s) +
                                  " m cell");
  }

  Geometry geo;
  const int row_len = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n_cells))));
  geo.bs.reserve(n_cells);
  for (int c = 0; c < n_cells; ++c) {
    geo.bs.emplace_back(s * (c % row_len), s * (c / row_len));
  }

  geo.users.resize(n_cells);
  for (int c = 0; c < n_cells; ++c) {
    Rng rng(Rng::derive(seed, kUserDropStream, static_cast<std::uint64_t>(c)));
    geo.users[c].reserve(n_users);
    for (int u = 0; u < n_users; ++u) {
      bool placed = false;
      for (int attempt = 0; attempt < 20000 && !placed; ++attempt) {
        Eigen::Vector2d pos(geo.bs[c].x() + rng.uniform(-0.5 * s, 0.5 * s),
                            geo.bs[c].y() + rng.uniform(-0.5 * s, 0.5 * s));
        bool ok = true;
        for (const auto& b : geo.bs) {
          if ((pos - b).norm() < params.min_bs_user_distance_m) {
            ok = false;
            break;
          }
        }
        if (ok) {
          geo.users[c].push_back(pos);
          placed = true;
        }
      }
      if (!placed) {
        throw InfeasibleGeometryError("place_network: could not place user " +
                                      std::to_string(u) + " in cell " + std::to_string(c));
      }
    }
  }
  return geo;
}

double large_scale_gain_db(double distance_m, const ScenarioParams& params,
                           double shadow_draw_db, bool* clamped) {
  if (clamped) *clamped = distance_m < 1.0;
  const double d = std::max(distance_m, 1.0);
  const double loss = params.pathloss_intercept_db +
                      10.0 * params.pathloss_exponent * std::log10(d) + shadow_draw_db;
  return params.antenna_gain_db - loss;
}

double noise_power_dbm(double bandwidth_hz, double noise_figure_db) {
  if (!(bandwidth_hz > 0)) throw InvalidParameterError("noise_power_dbm: bandwidth must be > 0");
  return -174.0 + 10.0 * std::log10(bandwidth_hz) + noise_figure_db;
}

void ChannelRealization::rebuild_freq() {
  freq.resize(taps.size());
  for (std::size_t p = 0; p < taps.size(); ++p) {
    freq[p] = freq_from_taps(taps[p], subcarriers);
  }
}

ChannelRealization draw_channels(const Geometry& geometry, const ScenarioParams& params,
                                 int subcarriers, int n_antennas, std::uint64_t seed) {
  const int L = params.delay_spread_taps;
  if (subcarriers < L) {
    throw DelaySpreadError("draw_channels: K = " + std::to_string(subcarriers) +
                           " is smaller than the delay spread L = " + std::to_string(L));
  }
  ChannelRealization ch;
  ch.n_cells = static_cast<int>(geometry.bs.size());
  ch.n_users = geometry.users.empty() ? 0 : static_cast<int>(geometry.users[0].size());
  ch.n_antennas = n_antennas;
  ch.subcarriers = subcarriers;
  ch.taps_L = L;
  ch.seed = seed;
  ch.taps.resize(static_cast<std::size_t>(ch.n_cells) * ch.n_cells);
  ch.large_scale.resize(ch.taps.size());

  for (int j = 0; j < ch.n_cells; ++j) {
    for (int i = 0; i < ch.n_cells; ++i) {
      const int pair = ch.pair_index(j, i);
      Rng shadow_rng(Rng::derive(seed, kShadowStream, static_cast<std::uint64_t>(pair)));
      Rng tap_rng(Rng::derive(seed, kTapStream, static_cast<std::uint64_t>(pair)));

      Eigen::VectorXd gains(ch.n_users);
      for (int u = 0; u < ch.n_users; ++u) {
        const double d = (geometry.users[i][u] - geometry.bs[j]).norm();
        const double shadow = params.shadowing_std_db * shadow_rng.gaussian();
        gains[u] = db_to_linear(large_scale_gain_db(d, params, shadow));
      }
      ch.large_scale[pair] = gains;

      const double tap_split =
          params.tap_power_mode == ScenarioParams::TapPowerMode::normalized
              ? 1.0 / static_cast<double>(L)
              : 1.0;
      std::vector<Eigen::MatrixXcd> taps(L);
      for (int l = 0; l < L; ++l) {
        Eigen::MatrixXcd h(n_antennas, ch.n_users);
        for (int u = 0; u < ch.n_users; ++u) {
          const double scale = std::sqrt(gains[u] * tap_split);
          for (int m = 0; m < n_antennas; ++m) h(m, u) = scale * tap_rng.cgaussian();
        }
        taps[l] = std::move(h);
      }
      ch.taps[pair] = std::move(taps);
    }
  }
  ch.rebuild_freq();
  return ch;
}

ChannelRealization extract_cell(const ChannelRealization& channels, int cell) {
  ChannelRealization out;
  out.n_cells = 1;
  out.n_users = channels.n_users;
  out.n_antennas = channels.n_antennas;
  out.subcarriers = channels.subcarriers;
  out.taps_L = channels.taps_L;
  out.seed = channels.seed;
  const int pair = channels.pair_index(cell, cell);
  out.taps = {channels.taps[pair]};
  out.large_scale = {channels.large_scale[pair]};
  out.rebuild_freq();
  return out;
}

namespace {

nlohmann::json matrix_to_json(const Eigen::MatrixXcd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      row.push_back({m(r, c).real(), m(r, c).imag()});
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXcd matrix_from_json(const nlohmann::json& rows) {
  const auto nr = rows.size();
  const auto nc = nr ? rows[0].size() : 0;
  Eigen::MatrixXcd m(nr, nc);
  for (std::size_t r = 0; r < nr; ++r) {
    for (std::size_t c = 0; c < nc; ++c) {
      m(r, c) = cxd(rows[r][c][0].get<double>(), rows[r][c][1].get<double>());
    }
  }
  return m;
}

}  // namespace

void save_channels_json(const ChannelRealization& ch, std::ostream& os) {
  nlohmann::json j;
  j["n_cells"] = ch.n_cells;
  j["n_users"] = ch.n_users;
  j["n_antennas"] = ch.n_antennas;
  j["subcarriers"] = ch.subcarriers;
  j["taps_L"] = ch.taps_L;
  j["seed"] = ch.seed;
  nlohmann::json pairs = nlohmann::json::array();
  for (std::size_t p = 0; p < ch.taps.size(); ++p) {
    nlohmann::json entry;
    entry["bs"] = static_cast<int>(p) / ch.n_cells;
    entry["cell"] = static_cast<int>(p) % ch.n_cells;
    entry["large_scale_gain"] = std::vector<double>(
        ch.large_scale[p].data(), ch.large_scale[p].data() + ch.large_scale[p].size());
    nlohmann::json taps = nlohmann::json::array();
    for (const auto& h : ch.taps[p]) taps.push_back(matrix_to_json(h));
    entry["taps"] = std::move(taps);
    pairs.push_back(std::move(entry));
  }
  j["links"] = std::move(pairs);
  os << j.dump(1);
}

ChannelRealization load_channels_json(std::istream& is) {
  nlohmann::json j;
  is >> j;
  ChannelRealization ch;
  ch.n_cells = j.at("n_cells").get<int>();
  ch.n_users = j.at("n_users").get<int>();
  ch.n_antennas = j.at("n_antennas").get<int>();
  ch.subcarriers = j.at("subcarriers").get<int>();
  ch.taps_L = j.at("taps_L").get<int>();
  ch.seed = j.at("seed").get<std::uint64_t>();
  ch.taps.resize(static_cast<std::size_t>(ch.n_cells) * ch.n_cells);
  ch.large_scale.resize(ch.taps.size());
  for (const auto& entry : j.at("links")) {
    const int pair = ch.pair_index(entry.at("bs").get<int>(), entry.at("cell").get<int>());
    const auto gains = entry.at("large_scale_gain").get<std::vector<double>>();
    ch.large_scale[pair] =
        Eigen::Map<const Eigen::VectorXd>(gains.data(), static_cast<Eigen::Index>(gains.size()));
    std::vector<Eigen::MatrixXcd> taps;
    for (const auto& t : entry.at("taps")) taps.push_back(matrix_from_json(t));
    ch.taps[pair] = std::move(taps);
  }
  ch.rebuild_freq();
  return ch;
}

void save_channels_json_file(const ChannelRealization& ch, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw Error("cannot open " + path + " for writing");
  save_channels_json(ch, f);
}

ChannelRealization load_channels_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error("cannot open " + path);
  return load_channels_json(f);
}

}  // namespace qcomp
