#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cran/delay_model.hpp"

namespace cran {

enum class Direction : int { Uplink = 0, Downlink = 1 };
inline constexpr std::array<Direction, 2> kDirections{Direction::Uplink,
                                                      Direction::Downlink};
inline constexpr int dir_index(Direction q) { return static_cast<int>(q); }
const char* to_string(Direction q);

class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

double dbm_to_watt(double dbm);
double watt_to_dbm(double watt);

// Scenario description as read from a config file. Zero-valued subcarrier
// counts are derived from the bandwidths.
struct ScenarioConfig {
  int num_rrh = 2;
  int num_slices = 2;
  int users_per_slice_per_rrh = 1;
  int k1 = 0;
  int k2 = 0;
  double subcarrier_bw_hz = 625e3;
  double access_bw_hz = 5e6;
  double fronthaul_bw_hz = 10e6;
  double p_rrh_dl_dbm = 43.0;
  double p_rrh_ul_dbm = 43.0;
  double p_bbu_dl_dbm = 47.0;
  double p_user_ul_dbm = 18.0;
  int l1 = 2;
  int l2 = 2;
  double alpha = 3.0;
  double beta = 3.0;
  double noise_psd_dbm_hz = -174.0;
  double area_km2 = 10.0;
  double rrh_bbu_distance_m = 1000.0;
  double min_user_distance_m = 10.0;
  double r_rsv_ul_bps = 0.0;  // per slice
  double r_rsv_dl_bps = 0.0;  // per slice
  double d_total_max_s = 1e-3;
  double theta = 11.0;
  double delta = 1e-3;
  double eta = 1.0;
  // Explicit tactile pairs; empty means "pair automatically".
  std::vector<std::pair<int, int>> pairs;
  bool auto_pairs = true;
};

struct UserInfo {
  int rrh = 0;
  int slice = 0;
};

struct NetworkInstance {
  int num_rrh = 0;
  int num_slices = 0;
  int users_per_slice_per_rrh = 0;
  int num_users = 0;
  int k1 = 0;
  int k2 = 0;
  double w_s = 0.0;
  double w_ac = 0.0;
  double w_fh = 0.0;
  double p_rrh_dl = 0.0;  // W
  double p_rrh_ul = 0.0;
  double p_bbu_dl = 0.0;
  double p_user_ul = 0.0;
  int l1 = 0;
  int l2 = 0;
  double alpha = 0.0;
  double beta = 0.0;
  double noise_psd = 0.0;  // W/Hz
  double area_km2 = 0.0;
  double d_rrh_bbu = 0.0;
  double min_user_distance = 0.0;
  // r_rsv[q][s], bits/s
  std::array<std::vector<double>, 2> r_rsv;
  double d_total_max = 0.0;
  QosThresholds qos;
  std::vector<UserInfo> users;
  std::vector<std::pair<int, int>> pairs;

  double noise_power() const { return noise_psd * w_s; }
  int user_index(int rrh, int slice, int k) const {
    return (rrh * num_slices + slice) * users_per_slice_per_rrh + k;
  }
  std::vector<int> user_rrh() const;
  std::vector<int> users_of_rrh(int rrh) const;
};

NetworkInstance build_network(const ScenarioConfig& config);

struct Position {
  double x = 0.0;
  double y = 0.0;
};

// Linear power gains for one Monte-Carlo trial.
struct ChannelRealization {
  int num_users = 0;
  int num_rrh = 0;
  int k1 = 0;
  int k2 = 0;
  double noise_power = 0.0;
  std::uint64_t seed = 0;
  std::vector<Position> user_pos;
  std::vector<Position> rrh_pos;
  // [q][user][rrh][k1]
  std::vector<double> access;
  // [q][rrh][k2]
  std::vector<double> fronthaul;

  double access_gain(Direction q, int user, int rrh, int k) const {
    return access[((static_cast<std::size_t>(dir_index(q)) * num_users + user) *
                       num_rrh + rrh) * k1 + k];
  }
  double fronthaul_gain(Direction q, int rrh, int k) const {
    return fronthaul[(static_cast<std::size_t>(dir_index(q)) * num_rrh + rrh) *
                         k2 + k];
  }
  double& access_gain(Direction q, int user, int rrh, int k) {
    return access[((static_cast<std::size_t>(dir_index(q)) * num_users + user) *
                       num_rrh + rrh) * k1 + k];
  }
  double& fronthaul_gain(Direction q, int rrh, int k) {
    return fronthaul[(static_cast<std::size_t>(dir_index(q)) * num_rrh + rrh) *
                         k2 + k];
  }
};

// RRHs sit on a circle of radius d_rrh_bbu around the BBU; users are uniform
// over the coverage disc, each inside its serving RRH's Voronoi cell.
ChannelRealization sample_channels(const NetworkInstance& net,
                                   std::uint64_t seed);

// splitmix64 finalizer, used to derive independent stream seeds.
std::uint64_t mix_seed(std::uint64_t x);
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

// Unit-mean exponential draw from a 64-bit word.
double exponential_from_bits(std::uint64_t bits);
double uniform_from_bits(std::uint64_t bits);

}  // namespace cran
