#include "cran/delay_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace cran {

QosThresholds QosThresholds::uniform(int num_rrh, int num_users, double theta,
                                     double delta, double eta) {
  QosThresholds t;
  t.theta_rrh.assign(num_rrh, theta);
  t.theta_bbu = theta;
  t.theta_user.assign(num_users, theta);
  t.delta_rrh = t.delta_bbu = t.delta_user = delta;
  t.eta_rrh = t.eta_bbu = t.eta_user = eta;
  t.validate();
  return t;
}

void QosThresholds::validate() const {
  auto theta_ok = [](double v) { return v > 0.0 && std::isfinite(v); };
  auto delta_ok = [](double v) { return v > 0.0 && v < 1.0; };
  auto eta_ok = [](double v) { return v > 0.0 && v <= 1.0; };
  bool ok = theta_ok(theta_bbu) && delta_ok(delta_rrh) && delta_ok(delta_bbu) &&
            delta_ok(delta_user) && eta_ok(eta_rrh) && eta_ok(eta_bbu) && eta_ok(eta_user);
  for (double v : theta_rrh) ok = ok && theta_ok(v);
  for (double v : theta_user) ok = ok && theta_ok(v);
  if (!ok) throw std::invalid_argument("QoS thresholds out of range");
}

DelayBudget DelayBudget::thirds(int num_rrh, int num_users, double total_max) {
  DelayBudget b;
  const double third = total_max / 3.0;
  b.rrh_ul.assign(num_rrh, third);
  b.bbu = third;
  b.user_dl.assign(num_users, third);
  b.total_max = total_max;
  return b;
}

double DelayBudget::worst_chain_excess(const std::vector<int>& user_rrh) const {
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < user_dl.size(); ++i)
    worst = std::max(worst, rrh_ul[user_rrh[i]] + bbu + user_dl[i] - total_max);
  return worst;
}

DelayInfeasibleError::DelayInfeasibleError(int user_, int rrh_, double chain_sum_,
                                           double total_max_)
    : std::runtime_error("delay budget infeasible: chain (user " + std::to_string(user_) +
                         ", rrh " + std::to_string(rrh_) + ") needs " +
                         std::to_string(chain_sum_) + " s > " + std::to_string(total_max_) +
                         " s"),
      user(user_),
      rrh(rrh_),
      chain_sum(chain_sum_),
      total_max(total_max_) {}

double effective_bandwidth(double lambda_bps, double theta) {
  if (!(theta > 0.0)) throw std::invalid_argument("QoS exponent must be positive");
  if (lambda_bps < 0.0) throw std::invalid_argument("arrival rate must be >= 0");
  if (theta < 1e-8) return lambda_bps * (1.0 + 0.5 * theta);
  return lambda_bps * std::expm1(theta) / theta;
}

double violation_probability(double lambda_bps, double theta, double eta,
                             double d_max_s) {
  return eta * std::exp(-lambda_bps * std::expm1(theta) * d_max_s);
}

double min_rate_floor(double theta, double delta, double d_max_s) {
  if (!(d_max_s > 0.0)) throw std::domain_error("D_max must be positive");
  return std::log(1.0 / delta) / (std::expm1(theta) * d_max_s);
}

double min_delay_from_rate(double theta, double delta, double rate_bps) {
  if (!(rate_bps > 0.0)) throw SegmentStarvedError("segment starved: rate must be positive");
  return std::log(1.0 / delta) / (std::expm1(theta) * rate_bps);
}

RateFloors floors_from_budget(const DelayBudget& b, const QosThresholds& qos) {
  RateFloors f;
  f.rrh_ul.resize(b.rrh_ul.size());
  for (std::size_t j = 0; j < b.rrh_ul.size(); ++j)
    f.rrh_ul[j] = min_rate_floor(qos.theta_rrh[j], qos.delta_rrh, b.rrh_ul[j]);
  f.bbu_ul = min_rate_floor(qos.theta_bbu, qos.delta_bbu, b.bbu);
  f.user_dl.resize(b.user_dl.size());
  for (std::size_t i = 0; i < b.user_dl.size(); ++i)
    f.user_dl[i] = min_rate_floor(qos.theta_user[i], qos.delta_user, b.user_dl[i]);
  return f;
}

DelayBudget adjust_delays(const SegmentRates& r, const QosThresholds& qos,
                          double total_max) {
  if (!(total_max > 0.0)) throw std::invalid_argument("D_total_max must be positive");
  DelayBudget b;
  b.total_max = total_max;
  b.rrh_ul.resize(r.rrh_ul.size());
  for (std::size_t j = 0; j < r.rrh_ul.size(); ++j)
    b.rrh_ul[j] = min_delay_from_rate(qos.theta_rrh[j], qos.delta_rrh, r.rrh_ul[j]);
  b.bbu = min_delay_from_rate(qos.theta_bbu, qos.delta_bbu, r.bbu_ul);
  b.user_dl.resize(r.user_dl.size());
  for (std::size_t i = 0; i < r.user_dl.size(); ++i)
    b.user_dl[i] = min_delay_from_rate(qos.theta_user[i], qos.delta_user, r.user_dl[i]);

  double scale = std::numeric_limits<double>::infinity();
  int worst = -1;
  double worst_sum = 0.0;
  for (std::size_t i = 0; i < b.user_dl.size(); ++i) {
    const double chain = b.rrh_ul[r.user_rrh[i]] + b.bbu + b.user_dl[i];
    if (total_max / chain < scale) {
      scale = total_max / chain;
      worst = static_cast<int>(i);
      worst_sum = chain;
    }
  }
  if (worst < 0) return b;
  if (scale < 1.0)
    throw DelayInfeasibleError(worst, r.user_rrh[worst], worst_sum, total_max);
  for (double& d : b.rrh_ul) d *= scale;
  b.bbu *= scale;
  for (double& d : b.user_dl) d *= scale;
  // Rounding can leave the tightest chain a few ulp above the total.
  for (std::size_t i = 0; i < b.user_dl.size(); ++i) {
    const double chain = b.rrh_ul[r.user_rrh[i]] + b.bbu + b.user_dl[i];
    if (chain > total_max) b.user_dl[i] -= chain - total_max;
  }
  return b;
}

}  // namespace cran
