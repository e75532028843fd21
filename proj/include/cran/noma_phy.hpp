#pragma once

#include <span>
#include <string>
#include <vector>

#include "cran/delay_model.hpp"
#include "cran/topology.hpp"

namespace cran {

// Decision state. Access links are indexed [q][user][k1] (each user is served
// by its home RRH), fronthaul links [q][rrh][k2]. Powers of unassigned links
// hold candidate values used by the subcarrier step.
struct Allocation {
  int num_users = 0;
  int num_rrh = 0;
  int k1 = 0;
  int k2 = 0;
  std::vector<double> access_power;
  std::vector<double> access_assign;
  std::vector<double> fronthaul_power;
  std::vector<double> fronthaul_assign;
  DelayBudget delay;

  static Allocation empty(const NetworkInstance& net);

  std::size_t access_index(Direction q, int user, int k) const {
    return (static_cast<std::size_t>(dir_index(q)) * num_users + user) * k1 + k;
  }
  std::size_t fronthaul_index(Direction q, int rrh, int k) const {
    return (static_cast<std::size_t>(dir_index(q)) * num_rrh + rrh) * k2 + k;
  }
  double& p_access(Direction q, int i, int k) { return access_power[access_index(q, i, k)]; }
  double& tau(Direction q, int i, int k) { return access_assign[access_index(q, i, k)]; }
  double& p_fronthaul(Direction q, int j, int k) {
    return fronthaul_power[fronthaul_index(q, j, k)];
  }
  double& x(Direction q, int j, int k) { return fronthaul_assign[fronthaul_index(q, j, k)]; }
  double p_access(Direction q, int i, int k) const { return access_power[access_index(q, i, k)]; }
  double tau(Direction q, int i, int k) const { return access_assign[access_index(q, i, k)]; }
  double p_fronthaul(Direction q, int j, int k) const {
    return fronthaul_power[fronthaul_index(q, j, k)];
  }
  double x(Direction q, int j, int k) const { return fronthaul_assign[fronthaul_index(q, j, k)]; }

  bool is_binary() const;
  // tau*p / x*p for every link, concatenated access then fronthaul.
  std::vector<double> effective_powers() const;
};

struct UserGain {
  int user;
  double gain;
};

// Descending gain, ties by ascending user index.
std::vector<int> sic_order(std::span<const UserGain> gains);

// True when `a` is decoded before `b` on a shared subcarrier, i.e. `a`
// interferes with `b`.
inline bool decoded_before(double gain_a, int a, double gain_b, int b) {
  return gain_a > gain_b || (gain_a == gain_b && a < b);
}

// Noise plus interference seen by a link: sigma + I + I~ for access,
// sigma + I for fronthaul.
double access_denominator(const Allocation& alloc, const ChannelRealization& ch,
                          const NetworkInstance& net, Direction q, int user, int k);
double fronthaul_denominator(const Allocation& alloc, const ChannelRealization& ch,
                             Direction q, int rrh, int k);

// SINR of user i on access subcarrier k at its home RRH. Interferers are
// weighted by their assignment fractions.
double access_sinr(const Allocation& alloc, const ChannelRealization& ch,
                   const NetworkInstance& net, Direction q, int user, int k);
double fronthaul_sinr(const Allocation& alloc, const ChannelRealization& ch,
                      Direction q, int rrh, int k);

// W_S log2(1 + sinr), bits/s.
double link_rate(double sinr, double subcarrier_bw_hz);

struct RateReport {
  std::vector<double> access;     // per link, same indexing as Allocation
  std::vector<double> fronthaul;  // per link
  std::array<std::vector<double>, 2> rrh_total;    // [q][j], tau-weighted
  std::array<double, 2> bbu_total{};               // [q], x-weighted
  std::array<std::vector<double>, 2> slice_total;  // [q][s]
  std::array<std::vector<double>, 2> user_total;   // [q][i]
  std::array<double, 2> access_total{};            // [q]
};

RateReport aggregate_rates(const Allocation& alloc, const ChannelRealization& ch,
                           const NetworkInstance& net);

SegmentRates segment_rates(const RateReport& rates, const NetworkInstance& net);

double total_power(const Allocation& alloc);
double direction_power(const Allocation& alloc, Direction q);

enum class ConstraintId {
  C1, C2, C3, C4, C5, C6, C7, C8, C9, C10, C11, C12, C13, C14, C15
};
const char* to_string(ConstraintId id);

struct ResidualEntry {
  ConstraintId id;
  std::string where;   // e.g. "j=0,k=3,UL"
  double residual;     // signed, natural units; <= 0 satisfied
  double scale;        // normalizer for the relative tolerance
  double normalized() const { return residual / scale; }
};

struct ResidualReport {
  std::vector<ResidualEntry> entries;
  double max_normalized = 0.0;
  bool feasible = true;
  double max_normalized_for(ConstraintId id) const;
};

inline constexpr double kFeasibilityTolerance = 1e-6;

// C1-C15 against explicit rate floors (C10-C12); C9 is checked on
// alloc.delay. Assignments are treated as given (binary expected).
ResidualReport check_constraints(const Allocation& alloc, const ChannelRealization& ch,
                                 const NetworkInstance& net, const RateFloors& floors,
                                 bool include_delay_chain = true);
// Floors derived from alloc.delay and the thresholds.
ResidualReport check_constraints(const Allocation& alloc, const ChannelRealization& ch,
                                 const NetworkInstance& net, const QosThresholds& qos);

// CSV serializations (schema line first).
std::string rate_report_csv(const RateReport& r, const Allocation& alloc);
std::string residual_report_csv(const ResidualReport& r);

}  // namespace cran
