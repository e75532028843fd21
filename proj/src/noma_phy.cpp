#include "cran/noma_phy.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace cran {

Allocation Allocation::empty(const NetworkInstance& net) {
  Allocation a;
  a.num_users = net.num_users;
  a.num_rrh = net.num_rrh;
  a.k1 = net.k1;
  a.k2 = net.k2;
  const std::size_t na = 2ull * net.num_users * net.k1;
  const std::size_t nf = 2ull * net.num_rrh * net.k2;
  a.access_power.assign(na, 0.0);
  a.access_assign.assign(na, 0.0);
  a.fronthaul_power.assign(nf, 0.0);
  a.fronthaul_assign.assign(nf, 0.0);
  a.delay = DelayBudget::thirds(net.num_rrh, net.num_users, net.d_total_max);
  return a;
}

bool Allocation::is_binary() const {
  auto bin = [](double v) { return v == 0.0 || v == 1.0; };
  return std::all_of(access_assign.begin(), access_assign.end(), bin) &&
         std::all_of(fronthaul_assign.begin(), fronthaul_assign.end(), bin);
}

std::vector<double> Allocation::effective_powers() const {
  std::vector<double> out;
  out.reserve(access_power.size() + fronthaul_power.size());
  for (std::size_t l = 0; l < access_power.size(); ++l)
    out.push_back(access_assign[l] * access_power[l]);
  for (std::size_t l = 0; l < fronthaul_power.size(); ++l)
    out.push_back(fronthaul_assign[l] * fronthaul_power[l]);
  return out;
}

std::vector<int> sic_order(std::span<const UserGain> gains) {
  std::vector<UserGain> sorted(gains.begin(), gains.end());
  std::sort(sorted.begin(), sorted.end(), [](const UserGain& a, const UserGain& b) {
    return decoded_before(a.gain, a.user, b.gain, b.user);
  });
  std::vector<int> out;
  out.reserve(sorted.size());
  for (const auto& g : sorted) out.push_back(g.user);
  return out;
}

double access_denominator(const Allocation& a, const ChannelRealization& ch,
                          const NetworkInstance& net, Direction q, int i, int k) {
  const int j = net.users[i].rrh;
  const double h_i = ch.access_gain(q, i, j, k);
  double intra = 0.0;
  double inter = 0.0;
  for (int u = 0; u < net.num_users; ++u) {
    if (u == i) continue;
    const double w = a.tau(q, u, k) * a.p_access(q, u, k);
    if (w == 0.0) continue;
    const int f = net.users[u].rrh;
    if (f == j) {
      if (decoded_before(ch.access_gain(q, u, j, k), u, h_i, i)) intra += w * h_i;
    } else {
      inter += w * ch.access_gain(q, i, f, k);
    }
  }
  return ch.noise_power + intra + inter;
}

double access_sinr(const Allocation& a, const ChannelRealization& ch,
                   const NetworkInstance& net, Direction q, int i, int k) {
  const double h_i = ch.access_gain(q, i, net.users[i].rrh, k);
  return a.p_access(q, i, k) * h_i / access_denominator(a, ch, net, q, i, k);
}

double fronthaul_denominator(const Allocation& a, const ChannelRealization& ch,
                             Direction q, int j, int k) {
  const double h_j = ch.fronthaul_gain(q, j, k);
  double intra = 0.0;
  for (int f = 0; f < a.num_rrh; ++f) {
    if (f == j) continue;
    if (decoded_before(ch.fronthaul_gain(q, f, k), f, h_j, j))
      intra += a.x(q, f, k) * a.p_fronthaul(q, f, k) * h_j;
  }
  return ch.noise_power + intra;
}

double fronthaul_sinr(const Allocation& a, const ChannelRealization& ch, Direction q,
                      int j, int k) {
  return a.p_fronthaul(q, j, k) * ch.fronthaul_gain(q, j, k) /
         fronthaul_denominator(a, ch, q, j, k);
}

double link_rate(double sinr, double subcarrier_bw_hz) {
  return subcarrier_bw_hz * std::log2(1.0 + sinr);
}

RateReport aggregate_rates(const Allocation& a, const ChannelRealization& ch,
                           const NetworkInstance& net) {
  RateReport r;
  r.access.assign(a.access_power.size(), 0.0);
  r.fronthaul.assign(a.fronthaul_power.size(), 0.0);
  for (Direction q : kDirections) {
    const int qi = dir_index(q);
    r.rrh_total[qi].assign(net.num_rrh, 0.0);
    r.slice_total[qi].assign(net.num_slices, 0.0);
    r.user_total[qi].assign(net.num_users, 0.0);
    for (int i = 0; i < net.num_users; ++i) {
      for (int k = 0; k < net.k1; ++k) {
        const double rate = link_rate(access_sinr(a, ch, net, q, i, k), net.w_s);
        r.access[a.access_index(q, i, k)] = rate;
        const double w = a.tau(q, i, k) * rate;
        r.rrh_total[qi][net.users[i].rrh] += w;
        r.slice_total[qi][net.users[i].slice] += w;
        r.user_total[qi][i] += w;
        r.access_total[qi] += w;
      }
    }
    for (int j = 0; j < net.num_rrh; ++j) {
      for (int k = 0; k < net.k2; ++k) {
        const double rate = link_rate(fronthaul_sinr(a, ch, q, j, k), net.w_s);
        r.fronthaul[a.fronthaul_index(q, j, k)] = rate;
        r.bbu_total[qi] += a.x(q, j, k) * rate;
      }
    }
  }
  return r;
}

SegmentRates segment_rates(const RateReport& rates, const NetworkInstance& net) {
  SegmentRates s;
  s.rrh_ul = rates.rrh_total[dir_index(Direction::Uplink)];
  s.bbu_ul = rates.bbu_total[dir_index(Direction::Uplink)];
  s.user_dl = rates.user_total[dir_index(Direction::Downlink)];
  s.user_rrh = net.user_rrh();
  return s;
}

double direction_power(const Allocation& a, Direction q) {
  double sum = 0.0;
  for (int i = 0; i < a.num_users; ++i)
    for (int k = 0; k < a.k1; ++k) sum += a.tau(q, i, k) * a.p_access(q, i, k);
  for (int j = 0; j < a.num_rrh; ++j)
    for (int k = 0; k < a.k2; ++k) sum += a.x(q, j, k) * a.p_fronthaul(q, j, k);
  return sum;
}

double total_power(const Allocation& a) {
  return direction_power(a, Direction::Uplink) + direction_power(a, Direction::Downlink);
}

const char* to_string(ConstraintId id) {
  static constexpr const char* names[] = {"C1",  "C2",  "C3",  "C4",  "C5",
                                          "C6",  "C7",  "C8",  "C9",  "C10",
                                          "C11", "C12", "C13", "C14", "C15"};
  return names[static_cast<int>(id)];
}

double ResidualReport::max_normalized_for(ConstraintId id) const {
  double m = -std::numeric_limits<double>::infinity();
  for (const auto& e : entries)
    if (e.id == id) m = std::max(m, e.normalized());
  return m;
}

namespace {

constexpr double kAssigned = 0.5;

double positive_or_one(double v) { return v > 0.0 ? v : 1.0; }

}  // namespace

ResidualReport check_constraints(const Allocation& a, const ChannelRealization& ch,
                                 const NetworkInstance& net, const RateFloors& floors,
                                 bool include_delay_chain) {
  ResidualReport rep;
  auto add = [&rep](ConstraintId id, std::string where, double residual, double scale) {
    rep.entries.push_back({id, std::move(where), residual, scale});
  };
  const RateReport rates = aggregate_rates(a, ch, net);

  for (Direction q : kDirections) {
    const int qi = dir_index(q);
    // C1 and C4, per RRH and access subcarrier.
    for (int j = 0; j < net.num_rrh; ++j) {
      const auto members = net.users_of_rrh(j);
      for (int k = 0; k < net.k1; ++k) {
        double count = 0.0;
        std::vector<UserGain> active;
        for (int u : members) {
          count += a.tau(q, u, k);
          if (a.tau(q, u, k) > kAssigned) active.push_back({u, ch.access_gain(q, u, j, k)});
        }
        add(ConstraintId::C1, fmt::format("j={};k={};{}", j, k, to_string(q)),
            count - net.l1, net.l1);
        const auto order = sic_order(active);
        for (std::size_t m = 0; m < order.size(); ++m) {
          for (std::size_t n = m + 1; n < order.size(); ++n) {
            const int strong = order[m];
            const int weak = order[n];
            if (a.p_access(q, weak, k) <= 0.0) continue;
            const double lhs = ch.access_gain(q, strong, j, k) /
                               access_denominator(a, ch, net, q, strong, k);
            const double rhs = ch.access_gain(q, weak, j, k) /
                               access_denominator(a, ch, net, q, weak, k);
            add(ConstraintId::C4, fmt::format("j={};k={};{};i={};m={}", j, k, to_string(q), strong, weak),
                rhs - lhs, lhs);
          }
        }
      }
    }
    // C5 and C8, per fronthaul subcarrier.
    for (int k = 0; k < net.k2; ++k) {
      double count = 0.0;
      std::vector<UserGain> active;
      for (int j = 0; j < net.num_rrh; ++j) {
        count += a.x(q, j, k);
        if (a.x(q, j, k) > kAssigned) active.push_back({j, ch.fronthaul_gain(q, j, k)});
      }
      add(ConstraintId::C5, fmt::format("k={};{}", k, to_string(q)), count - net.l2, net.l2);
      const auto order = sic_order(active);
      for (std::size_t m = 0; m < order.size(); ++m) {
        for (std::size_t n = m + 1; n < order.size(); ++n) {
          const int strong = order[m];
          const int weak = order[n];
          if (a.p_fronthaul(q, weak, k) <= 0.0) continue;
          const double lhs =
              ch.fronthaul_gain(q, strong, k) / fronthaul_denominator(a, ch, q, strong, k);
          const double rhs =
              ch.fronthaul_gain(q, weak, k) / fronthaul_denominator(a, ch, q, weak, k);
          add(ConstraintId::C8, fmt::format("k={};{};j={};j'={}", k, to_string(q), strong, weak),
              rhs - lhs, lhs);
        }
      }
    }
    // C15, per slice.
    for (int s = 0; s < net.num_slices; ++s) {
      const double rsv = net.r_rsv[qi][s];
      add(ConstraintId::C15, fmt::format("s={};{}", s, to_string(q)),
          rsv - rates.slice_total[qi][s], positive_or_one(rsv));
    }
  }

  const Direction ul = Direction::Uplink;
  const Direction dl = Direction::Downlink;
  // Power caps.
  for (int j = 0; j < net.num_rrh; ++j) {
    double dl_sum = 0.0;
    for (int i : net.users_of_rrh(j))
      for (int k = 0; k < net.k1; ++k) dl_sum += a.tau(dl, i, k) * a.p_access(dl, i, k);
    add(ConstraintId::C2, fmt::format("j={}", j), dl_sum - net.p_rrh_dl, net.p_rrh_dl);
  }
  for (int i = 0; i < net.num_users; ++i) {
    double ul_sum = 0.0;
    for (int k = 0; k < net.k1; ++k) ul_sum += a.tau(ul, i, k) * a.p_access(ul, i, k);
    add(ConstraintId::C3, fmt::format("i={}", i), ul_sum - net.p_user_ul, net.p_user_ul);
  }
  double bbu_sum = 0.0;
  for (int j = 0; j < net.num_rrh; ++j) {
    double fh_sum = 0.0;
    for (int k = 0; k < net.k2; ++k) {
      fh_sum += a.x(ul, j, k) * a.p_fronthaul(ul, j, k);
      bbu_sum += a.x(dl, j, k) * a.p_fronthaul(dl, j, k);
    }
    add(ConstraintId::C6, fmt::format("j={}", j), fh_sum - net.p_rrh_ul, net.p_rrh_ul);
  }
  add(ConstraintId::C7, "bbu", bbu_sum - net.p_bbu_dl, net.p_bbu_dl);

  // Delay chain and queue floors.
  if (include_delay_chain) {
    for (int i = 0; i < net.num_users; ++i) {
      const double chain = a.delay.rrh_ul[net.users[i].rrh] + a.delay.bbu + a.delay.user_dl[i];
      add(ConstraintId::C9, fmt::format("i={}", i), chain - a.delay.total_max, a.delay.total_max);
    }
  }
  const int uq = dir_index(ul);
  const int dq = dir_index(dl);
  for (int j = 0; j < net.num_rrh; ++j)
    add(ConstraintId::C10, fmt::format("j={}", j), floors.rrh_ul[j] - rates.rrh_total[uq][j],
        positive_or_one(floors.rrh_ul[j]));
  add(ConstraintId::C11, "bbu", floors.bbu_ul - rates.bbu_total[uq], positive_or_one(floors.bbu_ul));
  for (int i = 0; i < net.num_users; ++i)
    add(ConstraintId::C12, fmt::format("i={}", i), floors.user_dl[i] - rates.user_total[dq][i],
        positive_or_one(floors.user_dl[i]));
  add(ConstraintId::C13, "UL", rates.access_total[uq] - rates.bbu_total[uq],
      positive_or_one(std::max(rates.access_total[uq], rates.bbu_total[uq])));
  add(ConstraintId::C14, "DL", rates.bbu_total[dq] - rates.access_total[dq],
      positive_or_one(std::max(rates.access_total[dq], rates.bbu_total[dq])));

  rep.max_normalized = -std::numeric_limits<double>::infinity();
  for (const auto& e : rep.entries) rep.max_normalized = std::max(rep.max_normalized, e.normalized());
  rep.feasible = rep.max_normalized <= kFeasibilityTolerance;
  return rep;
}

ResidualReport check_constraints(const Allocation& a, const ChannelRealization& ch,
                                 const NetworkInstance& net, const QosThresholds& qos) {
  return check_constraints(a, ch, net, floors_from_budget(a.delay, qos), true);
}

std::string rate_report_csv(const RateReport& r, const Allocation& a) {
  std::string out = "# schema: cran-rates/1\nkind,direction,index,subcarrier,assign,rate_bps\n";
  for (Direction q : kDirections) {
    const int qi = dir_index(q);
    for (int i = 0; i < a.num_users; ++i)
      for (int k = 0; k < a.k1; ++k)
        out += fmt::format("access,{},{},{},{:.9g},{:.9e}\n", to_string(q), i, k, a.tau(q, i, k),
                           r.access[a.access_index(q, i, k)]);
    for (int j = 0; j < a.num_rrh; ++j)
      for (int k = 0; k < a.k2; ++k)
        out += fmt::format("fronthaul,{},{},{},{:.9g},{:.9e}\n", to_string(q), j, k, a.x(q, j, k),
                           r.fronthaul[a.fronthaul_index(q, j, k)]);
    for (std::size_t j = 0; j < r.rrh_total[qi].size(); ++j)
      out += fmt::format("rrh_total,{},{},,,{:.9e}\n", to_string(q), j, r.rrh_total[qi][j]);
    out += fmt::format("bbu_total,{},,,,{:.9e}\n", to_string(q), r.bbu_total[qi]);
    for (std::size_t s = 0; s < r.slice_total[qi].size(); ++s)
      out += fmt::format("slice_total,{},{},,,{:.9e}\n", to_string(q), s, r.slice_total[qi][s]);
    for (std::size_t i = 0; i < r.user_total[qi].size(); ++i)
      out += fmt::format("user_total,{},{},,,{:.9e}\n", to_string(q), i, r.user_total[qi][i]);
  }
  return out;
}

std::string residual_report_csv(const ResidualReport& r) {
  std::string out = "# schema: cran-residuals/1\nconstraint,where,residual,scale,normalized\n";
  for (const auto& e : r.entries)
    out += fmt::format("{},{},{:.9e},{:.9e},{:.9e}\n", to_string(e.id), e.where, e.residual,
                       e.scale, e.normalized());
  return out;
}

}  // namespace cran
