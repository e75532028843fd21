#include <doctest.h>

#include <cmath>
#include <random>

#include "cran/delay_model.hpp"
#include "support/oracles.hpp"

using namespace cran;

namespace {

QosThresholds qos(int rrh, int users, double theta = 11.0, double delta = 1e-3) {
  return QosThresholds::uniform(rrh, users, theta, delta, 1.0);
}

// Two RRHs with one user each; every segment's rate chosen so that its
// minimal delay equals `dmin`.
SegmentRates rates_for(const QosThresholds& q, double d_rrh, double d_bbu, double d_user) {
  SegmentRates r;
  r.rrh_ul = {min_rate_floor(q.theta_rrh[0], q.delta_rrh, d_rrh),
              min_rate_floor(q.theta_rrh[1], q.delta_rrh, d_rrh)};
  r.bbu_ul = min_rate_floor(q.theta_bbu, q.delta_bbu, d_bbu);
  r.user_dl = {min_rate_floor(q.theta_user[0], q.delta_user, d_user),
               min_rate_floor(q.theta_user[1], q.delta_user, d_user)};
  r.user_rrh = {0, 1};
  return r;
}

}  // namespace

TEST_CASE("effective bandwidth") {
  CHECK(effective_bandwidth(1000.0, 1e-12) == doctest::Approx(1000.0));
  CHECK(effective_bandwidth(1000.0, 1e-9) == doctest::Approx(1000.0));
  // 1000 (e^11 - 1) / 11 evaluated in long double.
  const long double ref = 1000.0L * (std::exp(11.0L) - 1.0L) / 11.0L;
  CHECK(effective_bandwidth(1000.0, 11.0) == doctest::Approx(static_cast<double>(ref)).epsilon(1e-12));
  CHECK(effective_bandwidth(1000.0, 11.0) == doctest::Approx(5.4430e6).epsilon(1e-4));
  CHECK(effective_bandwidth(0.0, 11.0) == 0.0);
  CHECK_THROWS(effective_bandwidth(1000.0, 0.0));
  CHECK_THROWS(effective_bandwidth(1000.0, -1.0));
}

TEST_CASE("violation probability") {
  CHECK(violation_probability(1000.0, 11.0, 0.7, 0.0) == doctest::Approx(0.7));
  const double theta = 0.3, delta = 0.02, d = 0.5;
  const double lambda = std::log(1.0 / delta) / (std::expm1(theta) * d);
  CHECK(violation_probability(lambda, theta, 1.0, d) == doctest::Approx(delta).epsilon(1e-12));
  CHECK(violation_probability(1000.0, 11.0, 1.0, 1e-3) < 1e-300);
}

TEST_CASE("violation probability monotonicity and linearity") {
  std::mt19937_64 eng(2);
  std::uniform_real_distribution<double> u(0.1, 2.0);
  for (int t = 0; t < 200; ++t) {
    const double l = u(eng), th = u(eng), d = u(eng), eta = 0.5 * u(eng);
    const double base = violation_probability(l, th, eta, d);
    CHECK(violation_probability(l * 1.1, th, eta, d) < base);
    CHECK(violation_probability(l, th * 1.1, eta, d) < base);
    CHECK(violation_probability(l, th, eta, d * 1.1) < base);
    CHECK(violation_probability(l, th, 2 * eta, d) == doctest::Approx(2 * base));
  }
}

TEST_CASE("minimum rate floor") {
  CHECK(min_rate_floor(std::log(2.0), std::exp(-1.0), 1.0) == doctest::Approx(1.0).epsilon(1e-14));
  // ln(1e3) / ((e^11 - 1) * (1/3 ms)) by direct long double evaluation.
  const long double ref = std::log(1000.0L) / ((std::exp(11.0L) - 1.0L) * (1e-3L / 3.0L));
  const double floor = min_rate_floor(11.0, 1e-3, 1e-3 / 3.0);
  CHECK(floor == doctest::Approx(static_cast<double>(ref)).epsilon(1e-12));
  CHECK(floor == doctest::Approx(0.34612).epsilon(1e-4));
  CHECK(min_rate_floor(11.0, 1e-3, 0.5e-3 / 3.0) == doctest::Approx(2 * floor));
  CHECK_THROWS(min_rate_floor(11.0, 1e-3, 0.0));
  CHECK_THROWS(min_rate_floor(11.0, 1e-3, -1.0));
}

TEST_CASE("minimum delay inverts the floor") {
  struct Case {
    double theta, delta, d;
  };
  for (const Case c : {Case{std::log(2.0), std::exp(-1.0), 1.0}, Case{11.0, 1e-3, 1e-3 / 3.0},
                       Case{11.0, 1e-3, 0.5e-3 / 3.0}}) {
    const double r = min_rate_floor(c.theta, c.delta, c.d);
    CHECK(min_delay_from_rate(c.theta, c.delta, r) == doctest::Approx(c.d).epsilon(1e-12));
  }
  std::mt19937_64 eng(8);
  std::uniform_real_distribution<double> u(-6.0, 1.0);
  for (int t = 0; t < 1000; ++t) {
    const double theta = std::pow(10.0, u(eng)), delta = std::pow(10.0, u(eng) - 1.0);
    const double d = std::pow(10.0, u(eng));
    if (!(delta < 1.0)) continue;
    const double back = min_delay_from_rate(theta, delta, min_rate_floor(theta, delta, d));
    CHECK(std::abs(back - d) <= 1e-9 * d);
  }
  CHECK_THROWS_AS(min_delay_from_rate(11.0, 1e-3, 0.0), SegmentStarvedError);
  CHECK_THROWS_AS(min_delay_from_rate(11.0, 1e-3, -2.0), SegmentStarvedError);
}

TEST_CASE("thirds budget") {
  const DelayBudget b = DelayBudget::thirds(2, 4, 1e-3);
  CHECK(b.bbu == doctest::Approx(1e-3 / 3));
  for (double d : b.rrh_ul) CHECK(d == doctest::Approx(1e-3 / 3));
  for (double d : b.user_dl) CHECK(d == doctest::Approx(1e-3 / 3));
  CHECK(b.worst_chain_excess({0, 0, 1, 1}) <= 1e-18);
}

TEST_CASE("adjust_delays examples") {
  const auto q = qos(2, 2);
  const double total = 1e-3;
  SUBCASE("minimal delays at a sixth: each segment doubles") {
    const DelayBudget b = adjust_delays(rates_for(q, total / 6, total / 6, total / 6), q, total);
    CHECK(b.bbu == doctest::Approx(total / 3));
    for (double d : b.rrh_ul) CHECK(d == doctest::Approx(total / 3));
    for (double d : b.user_dl) CHECK(d == doctest::Approx(total / 3));
  }
  SUBCASE("zero slack returns the minima") {
    const DelayBudget b = adjust_delays(rates_for(q, 0.2e-3, 0.5e-3, 0.3e-3), q, total);
    CHECK(b.rrh_ul[0] == doctest::Approx(0.2e-3));
    CHECK(b.bbu == doctest::Approx(0.5e-3));
    CHECK(b.user_dl[1] == doctest::Approx(0.3e-3));
  }
  SUBCASE("starved segment") {
    auto r = rates_for(q, total / 6, total / 6, total / 6);
    r.user_dl[1] = 0.0;
    CHECK_THROWS_AS(adjust_delays(r, q, total), SegmentStarvedError);
  }
  SUBCASE("chain over budget") {
    CHECK_THROWS_AS(adjust_delays(rates_for(q, 0.5e-3, 0.5e-3, 0.5e-3), q, total),
                    DelayInfeasibleError);
  }
}

TEST_CASE("adjust_delays properties") {
  const auto q = qos(2, 2);
  std::mt19937_64 eng(6);
  std::uniform_real_distribution<double> u(0.01, 0.3);
  for (int t = 0; t < 500; ++t) {
    SegmentRates r;
    r.rrh_ul = {min_rate_floor(11, 1e-3, u(eng) * 1e-3), min_rate_floor(11, 1e-3, u(eng) * 1e-3)};
    r.bbu_ul = min_rate_floor(11, 1e-3, u(eng) * 1e-3);
    r.user_dl = {min_rate_floor(11, 1e-3, u(eng) * 1e-3), min_rate_floor(11, 1e-3, u(eng) * 1e-3)};
    r.user_rrh = {0, 1};
    const DelayBudget wide = adjust_delays(r, q, 1e-3);
    const DelayBudget tight = adjust_delays(r, q, 0.95e-3);
    // C9 and positivity.
    CHECK(wide.worst_chain_excess(r.user_rrh) <= 1e-15);
    CHECK(wide.bbu > 0.0);
    // C10-C12: each segment's rate meets the floor of its delay.
    const RateFloors f = floors_from_budget(wide, q);
    for (int j = 0; j < 2; ++j) CHECK(f.rrh_ul[j] <= r.rrh_ul[j] * (1 + 1e-12));
    CHECK(f.bbu_ul <= r.bbu_ul * (1 + 1e-12));
    for (int i = 0; i < 2; ++i) CHECK(f.user_dl[i] <= r.user_dl[i] * (1 + 1e-12));
    // Tightening never lengthens a segment.
    for (int j = 0; j < 2; ++j) CHECK(tight.rrh_ul[j] <= wide.rrh_ul[j]);
    CHECK(tight.bbu <= wide.bbu);
    for (int i = 0; i < 2; ++i) CHECK(tight.user_dl[i] <= wide.user_dl[i]);
  }
}

TEST_CASE("queue oracle examples") {
  SUBCASE("overprovisioned") {
    const auto r = queue_oracle(1e4, 1e5, 1.0, 100000, 3);
    CHECK(r.violations == 0);
    CHECK(r.empirical == 0.0);
  }
  SUBCASE("service at the floor") {
    const double theta = 1e-4, delta = 1e-2, d = 0.05;
    const double c = min_rate_floor(theta, delta, d);
    const auto r = queue_oracle(0.6 * c, c, d, 100000, 4);
    CHECK(r.empirical <= delta + r.ci_half_width);
  }
  SUBCASE("no traffic") {
    CHECK(queue_oracle(0.0, 1e3, 1e-3, 10000, 1).empirical == 0.0);
  }
  CHECK_THROWS(queue_oracle(2e3, 1e3, 1e-3, 10000, 1));
  CHECK_THROWS(queue_oracle(1e3, 2e3, 1e-3, 100, 1));
}

TEST_CASE("queue oracle batch: OpenMP path equals serial reference") {
  const auto cases = oracle::queue_tuples(6, 77);
  const auto a = queue_oracle_batch(cases, 20000);
  const auto b = queue_oracle_batch_serial(cases, 20000);
  CHECK(oracle_csv(a) == oracle_csv(b));
  for (const auto& row : a) CHECK(row.analytic == doctest::Approx(row.input.delta));
}

TEST_CASE("qos validation") {
  QosThresholds q = qos(1, 2);
  CHECK_NOTHROW(q.validate());
  q.delta_bbu = 1.0;
  CHECK_THROWS(q.validate());
  q = qos(1, 2);
  q.eta_user = 0.0;
  CHECK_THROWS(q.validate());
  q = qos(1, 2);
  q.theta_rrh[0] = 0.0;
  CHECK_THROWS(q.validate());
}
