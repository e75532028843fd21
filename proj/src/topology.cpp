#include "cran/topology.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

namespace cran {

const char* to_string(Direction q) {
  return q == Direction::Uplink ? "UL" : "DL";
}

double dbm_to_watt(double dbm) {
  if (!std::isfinite(dbm)) throw ValidationError("dBm value must be finite");
  return std::pow(10.0, (dbm - 30.0) / 10.0);
}

double watt_to_dbm(double watt) {
  if (!(watt > 0.0) || !std::isfinite(watt))
    throw ValidationError("power in watts must be positive and finite");
  return 10.0 * std::log10(watt) + 30.0;
}

std::vector<int> NetworkInstance::user_rrh() const {
  std::vector<int> out(users.size());
  for (std::size_t i = 0; i < users.size(); ++i) out[i] = users[i].rrh;
  return out;
}

std::vector<int> NetworkInstance::users_of_rrh(int rrh) const {
  std::vector<int> out;
  for (int i = 0; i < num_users; ++i)
    if (users[i].rrh == rrh) out.push_back(i);
  return out;
}

namespace {

int derive_count(int given, double band, double sub, const char* what) {
  if (given < 0) throw ValidationError(std::string(what) + " must be >= 0");
  if (given > 0) return given;
  const int n = static_cast<int>(std::floor(band / sub + 1e-9));
  if (n < 1) throw ValidationError(std::string(what) + ": band narrower than one subcarrier");
  return n;
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw ValidationError(msg);
}

}  // namespace

NetworkInstance build_network(const ScenarioConfig& c) {
  require(c.num_rrh >= 1, "network needs at least one RRH");
  require(c.num_slices >= 1, "network needs at least one slice");
  require(c.users_per_slice_per_rrh >= 1, "users_per_slice_per_rrh must be >= 1");
  require(c.subcarrier_bw_hz > 0 && c.access_bw_hz > 0 && c.fronthaul_bw_hz > 0,
          "bandwidths must be positive");
  require(c.l1 >= 1 && c.l2 >= 1, "NOMA caps must be >= 1");
  require(c.l1 <= 2 && c.l2 <= 2, "NOMA cap exceeds supported SIC depth");
  require(c.alpha > 0 && c.beta > 0, "path-loss exponents must be positive");
  require(c.area_km2 > 0, "coverage area must be positive");
  require(c.rrh_bbu_distance_m > 0, "RRH-BBU distance must be positive");
  require(c.min_user_distance_m > 0, "minimum user distance must be positive");
  require(c.r_rsv_ul_bps >= 0 && c.r_rsv_dl_bps >= 0, "reserved rates must be >= 0");
  require(c.d_total_max_s > 0, "D_total_max must be positive");

  NetworkInstance n;
  n.num_rrh = c.num_rrh;
  n.num_slices = c.num_slices;
  n.users_per_slice_per_rrh = c.users_per_slice_per_rrh;
  n.num_users = c.num_rrh * c.num_slices * c.users_per_slice_per_rrh;
  n.w_s = c.subcarrier_bw_hz;
  n.w_ac = c.access_bw_hz;
  n.w_fh = c.fronthaul_bw_hz;
  n.k1 = derive_count(c.k1, c.access_bw_hz, c.subcarrier_bw_hz, "K1");
  n.k2 = derive_count(c.k2, c.fronthaul_bw_hz, c.subcarrier_bw_hz, "K2");
  require(n.k1 * n.w_s <= n.w_ac * (1.0 + 1e-12), "K1*W_S exceeds W_AC");
  require(n.k2 * n.w_s <= n.w_fh * (1.0 + 1e-12), "K2*W_S exceeds W_FH");
  n.p_rrh_dl = dbm_to_watt(c.p_rrh_dl_dbm);
  n.p_rrh_ul = dbm_to_watt(c.p_rrh_ul_dbm);
  n.p_bbu_dl = dbm_to_watt(c.p_bbu_dl_dbm);
  n.p_user_ul = dbm_to_watt(c.p_user_ul_dbm);
  n.l1 = c.l1;
  n.l2 = c.l2;
  n.alpha = c.alpha;
  n.beta = c.beta;
  n.noise_psd = dbm_to_watt(c.noise_psd_dbm_hz);
  n.area_km2 = c.area_km2;
  n.d_rrh_bbu = c.rrh_bbu_distance_m;
  n.min_user_distance = c.min_user_distance_m;
  n.r_rsv[dir_index(Direction::Uplink)].assign(c.num_slices, c.r_rsv_ul_bps);
  n.r_rsv[dir_index(Direction::Downlink)].assign(c.num_slices, c.r_rsv_dl_bps);
  n.d_total_max = c.d_total_max_s;
  n.qos = QosThresholds::uniform(n.num_rrh, n.num_users, c.theta, c.delta, c.eta);

  n.users.resize(n.num_users);
  for (int j = 0; j < n.num_rrh; ++j)
    for (int s = 0; s < n.num_slices; ++s)
      for (int k = 0; k < n.users_per_slice_per_rrh; ++k)
        n.users[n.user_index(j, s, k)] = UserInfo{j, s};

  if (c.auto_pairs && c.pairs.empty()) {
    // Interleave RRHs so that partners sit in different cells when J >= 2.
    // With an odd population the last user stays unpaired.
    std::vector<int> order;
    for (int s = 0; s < n.num_slices; ++s)
      for (int k = 0; k < n.users_per_slice_per_rrh; ++k)
        for (int j = 0; j < n.num_rrh; ++j) order.push_back(n.user_index(j, s, k));
    for (std::size_t m = 0; m + 1 < order.size(); m += 2)
      n.pairs.emplace_back(order[m], order[m + 1]);
  } else {
    require(!c.pairs.empty(), "empty pair list");
    std::vector<int> seen(n.num_users, 0);
    for (auto [a, b] : c.pairs) {
      require(a >= 0 && a < n.num_users && b >= 0 && b < n.num_users && a != b,
              "pair references an invalid user");
      ++seen[a];
      ++seen[b];
    }
    for (int i = 0; i < n.num_users; ++i)
      require(seen[i] == 1, "every user must belong to exactly one pair");
    n.pairs = c.pairs;
  }
  return n;
}

std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  return mix_seed(mix_seed(a) ^ (b + 0x632be59bd9b4e019ULL));
}

double uniform_from_bits(std::uint64_t bits) {
  // Open interval (0, 1).
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

double exponential_from_bits(std::uint64_t bits) {
  return -std::log(uniform_from_bits(bits));
}

namespace {

constexpr std::uint64_t kPositionStream = 1;
constexpr std::uint64_t kAccessStream = 2;
constexpr std::uint64_t kFronthaulStream = 3;

double distance(Position a, Position b) { return std::hypot(a.x - b.x, a.y - b.y); }

}  // namespace

ChannelRealization sample_channels(const NetworkInstance& net, std::uint64_t seed) {
  ChannelRealization ch;
  ch.num_users = net.num_users;
  ch.num_rrh = net.num_rrh;
  ch.k1 = net.k1;
  ch.k2 = net.k2;
  ch.noise_power = net.noise_power();
  ch.seed = seed;

  ch.rrh_pos.resize(net.num_rrh);
  for (int j = 0; j < net.num_rrh; ++j) {
    const double phi = 2.0 * std::numbers::pi * j / net.num_rrh;
    ch.rrh_pos[j] = {net.d_rrh_bbu * std::cos(phi), net.d_rrh_bbu * std::sin(phi)};
  }

  const double radius = std::sqrt(net.area_km2 * 1e6 / std::numbers::pi);
  ch.user_pos.resize(net.num_users);
  for (int i = 0; i < net.num_users; ++i) {
    std::mt19937_64 eng(mix_seed(mix_seed(seed, kPositionStream), i));
    const int home = net.users[i].rrh;
    for (;;) {
      const double r = radius * std::sqrt(uniform_from_bits(eng()));
      const double phi = 2.0 * std::numbers::pi * uniform_from_bits(eng());
      const Position p{r * std::cos(phi), r * std::sin(phi)};
      int nearest = 0;
      for (int j = 1; j < net.num_rrh; ++j)
        if (distance(p, ch.rrh_pos[j]) < distance(p, ch.rrh_pos[nearest])) nearest = j;
      if (nearest == home) {
        ch.user_pos[i] = p;
        break;
      }
    }
  }

  ch.access.assign(2ull * net.num_users * net.num_rrh * net.k1, 0.0);
  ch.fronthaul.assign(2ull * net.num_rrh * net.k2, 0.0);
  for (Direction q : kDirections) {
    for (int i = 0; i < net.num_users; ++i) {
      for (int j = 0; j < net.num_rrh; ++j) {
        const double d =
            std::max(distance(ch.user_pos[i], ch.rrh_pos[j]), net.min_user_distance);
        const double path = std::pow(d, -net.alpha);
        std::uint64_t s = mix_seed(seed, kAccessStream);
        s = mix_seed(s, dir_index(q));
        s = mix_seed(s, i);
        std::mt19937_64 eng(mix_seed(s, j));
        for (int k = 0; k < net.k1; ++k)
          ch.access_gain(q, i, j, k) = exponential_from_bits(eng()) * path;
      }
    }
    for (int j = 0; j < net.num_rrh; ++j) {
      const double d = std::max(distance(ch.rrh_pos[j], Position{}), net.min_user_distance);
      const double path = std::pow(d, -net.beta);
      std::uint64_t s = mix_seed(mix_seed(seed, kFronthaulStream), dir_index(q));
      std::mt19937_64 eng(mix_seed(s, j));
      for (int k = 0; k < net.k2; ++k)
        ch.fronthaul_gain(q, j, k) = exponential_from_bits(eng()) * path;
    }
  }
  return ch;
}

}  // namespace cran
