#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace cran {

// Statistical QoS parameters of the three queue families: one UL queue per
// RRH, the shared BBU queue and one DL queue per user.
struct QosThresholds {
  std::vector<double> theta_rrh;   // [j]
  double theta_bbu = 11.0;
  std::vector<double> theta_user;  // [i], at the user's serving RRH
  double delta_rrh = 1e-3;         // delta1
  double delta_bbu = 1e-3;         // delta2
  double delta_user = 1e-3;        // delta3
  double eta_rrh = 1.0;            // eta1
  double eta_bbu = 1.0;            // eta2
  double eta_user = 1.0;           // eta3

  static QosThresholds uniform(int num_rrh, int num_users, double theta,
                               double delta, double eta);
  void validate() const;
};

// Maximum queuing delay per segment, seconds.
struct DelayBudget {
  std::vector<double> rrh_ul;   // D^j_max
  double bbu = 0.0;             // D^BBU_max
  std::vector<double> user_dl;  // D^{i,j}_max, user i at its serving RRH
  double total_max = 0.0;

  static DelayBudget thirds(int num_rrh, int num_users, double total_max);
  // Largest chain sum minus total_max over all users; <= 0 when C9 holds.
  double worst_chain_excess(const std::vector<int>& user_rrh) const;
};

// Minimum output rates (bits/s) implied by a DelayBudget.
struct RateFloors {
  std::vector<double> rrh_ul;   // C10, per RRH
  double bbu_ul = 0.0;          // C11
  std::vector<double> user_dl;  // C12, per user
};

// Aggregate rates feeding each queue segment, bits/s.
struct SegmentRates {
  std::vector<double> rrh_ul;
  double bbu_ul = 0.0;
  std::vector<double> user_dl;
  std::vector<int> user_rrh;  // serving RRH of each user
};

class SegmentStarvedError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class DelayInfeasibleError : public std::runtime_error {
 public:
  DelayInfeasibleError(int user, int rrh, double chain_sum, double total_max);
  int user;
  int rrh;
  double chain_sum;
  double total_max;
};

// E_B = lambda (e^theta - 1) / theta, continuous at theta -> 0+.
double effective_bandwidth(double lambda_bps, double theta);

// eta * exp(-lambda (e^theta - 1) D_max).
double violation_probability(double lambda_bps, double theta, double eta,
                             double d_max_s);

// ln(1/delta) / ((e^theta - 1) D_max).
double min_rate_floor(double theta, double delta, double d_max_s);

// Algebraic inverse of min_rate_floor in D_max.
double min_delay_from_rate(double theta, double delta, double rate_bps);

RateFloors floors_from_budget(const DelayBudget& budget,
                              const QosThresholds& qos);

// Closed-form solution of the delay adjustment problem: every segment gets
// its minimal delay scaled by the largest common factor s >= 1 that keeps
// all chains within total_max. Throws DelayInfeasibleError or
// SegmentStarvedError.
DelayBudget adjust_delays(const SegmentRates& rates, const QosThresholds& qos,
                          double total_max);

struct QueueOracleResult {
  double empirical = 0.0;     // fraction of packets with sojourn > D_max
  double ci_half_width = 0.0; // 95% normal-approximation half width
  std::int64_t packets = 0;
  std::int64_t violations = 0;
};

inline constexpr double kOraclePacketBits = 256.0;

// Poisson packet arrivals (fixed 256-bit packets, mean bit rate lambda) into
// a FIFO queue drained at service_rate. Seeded and deterministic.
QueueOracleResult queue_oracle(double lambda_bps, double service_rate_bps,
                               double d_max_s, std::int64_t num_packets,
                               std::uint64_t seed);

struct OracleCase {
  double lambda_bps;
  double theta;
  double delta;
  double d_max_s;
  double service_rate_bps;
  std::uint64_t seed;
};

struct OracleRow {
  OracleCase input;
  double analytic;
  QueueOracleResult result;
};

// Runs the oracle over many cases. The OpenMP path and the serial reference
// produce identical rows.
std::vector<OracleRow> queue_oracle_batch(const std::vector<OracleCase>& cases,
                                          std::int64_t num_packets);
std::vector<OracleRow> queue_oracle_batch_serial(
    const std::vector<OracleCase>& cases, std::int64_t num_packets);

std::string oracle_csv(const std::vector<OracleRow>& rows);

}  // namespace cran
