#include <fmt/format.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "cran/delay_model.hpp"
#include "cran/topology.hpp"

namespace cran {

QueueOracleResult queue_oracle(double lambda_bps, double service_rate_bps,
                               double d_max_s, std::int64_t num_packets,
                               std::uint64_t seed) {
  if (num_packets < 10000) throw std::invalid_argument("oracle needs >= 1e4 packets");
  if (lambda_bps < 0.0) throw std::invalid_argument("arrival rate must be >= 0");
  QueueOracleResult out;
  if (lambda_bps == 0.0) return out;
  if (!(service_rate_bps > lambda_bps))
    throw std::invalid_argument("unstable queue: service rate must exceed arrival rate");

  std::mt19937_64 eng(mix_seed(seed));
  const double packet_rate = lambda_bps / kOraclePacketBits;
  const double service_time = kOraclePacketBits / service_rate_bps;
  double wait = 0.0;
  for (std::int64_t n = 0; n < num_packets; ++n) {
    if (wait + service_time > d_max_s) ++out.violations;
    const double gap = exponential_from_bits(eng()) / packet_rate;
    wait = std::max(0.0, wait + service_time - gap);
  }
  out.packets = num_packets;
  out.empirical = static_cast<double>(out.violations) / static_cast<double>(num_packets);
  out.ci_half_width =
      1.96 * std::sqrt(out.empirical * (1.0 - out.empirical) / static_cast<double>(num_packets));
  return out;
}

namespace {

OracleRow run_case(const OracleCase& c, std::int64_t num_packets) {
  OracleRow row{c, violation_probability(c.service_rate_bps, c.theta, 1.0, c.d_max_s), {}};
  row.result = queue_oracle(c.lambda_bps, c.service_rate_bps, c.d_max_s, num_packets, c.seed);
  return row;
}

}  // namespace

std::vector<OracleRow> queue_oracle_batch(const std::vector<OracleCase>& cases,
                                          std::int64_t num_packets) {
  std::vector<OracleRow> rows(cases.size());
  const auto n = static_cast<std::int64_t>(cases.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t k = 0; k < n; ++k) rows[k] = run_case(cases[k], num_packets);
  return rows;
}

std::vector<OracleRow> queue_oracle_batch_serial(const std::vector<OracleCase>& cases,
                                                 std::int64_t num_packets) {
  std::vector<OracleRow> rows;
  rows.reserve(cases.size());
  for (const auto& c : cases) rows.push_back(run_case(c, num_packets));
  return rows;
}

std::string oracle_csv(const std::vector<OracleRow>& rows) {
  std::string out = "# schema: cran-oracle/1\n";
  out += "lambda_bps,theta,delta,d_max_s,service_rate_bps,empirical,analytic,ci_half_width\n";
  for (const auto& r : rows) {
    out += fmt::format("{:.9e},{:.9e},{:.9e},{:.9e},{:.9e},{:.9e},{:.9e},{:.9e}\n",
                       r.input.lambda_bps, r.input.theta, r.input.delta, r.input.d_max_s,
                       r.input.service_rate_bps, r.result.empirical, r.analytic,
                       r.result.ci_half_width);
  }
  return out;
}

}  // namespace cran
