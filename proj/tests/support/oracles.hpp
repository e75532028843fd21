// Independent reference computations used by the unit and acceptance tests.
// Nothing here calls into the solvers under test.
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include "cran/allocator.hpp"
#include "cran/convex.hpp"
#include "cran/delay_model.hpp"
#include "cran/topology.hpp"

namespace oracle {

// ---------------------------------------------------------------------------
// LP by vertex enumeration: min c'x, A x <= b, lo <= x <= hi (all finite).

struct VertexResult {
  bool feasible = false;
  double objective = std::numeric_limits<double>::infinity();
  Eigen::VectorXd x;
};

inline VertexResult enumerate_vertices(const Eigen::VectorXd& c, const Eigen::MatrixXd& a,
                                       const Eigen::VectorXd& b, const Eigen::VectorXd& lo,
                                       const Eigen::VectorXd& hi, double tol = 1e-9) {
  const int n = static_cast<int>(c.size());
  const int m = static_cast<int>(a.rows());
  // Every constraint as a row G x <= h.
  Eigen::MatrixXd g(m + 2 * n, n);
  Eigen::VectorXd h(m + 2 * n);
  g.topRows(m) = a;
  h.head(m) = b;
  for (int i = 0; i < n; ++i) {
    g.row(m + i).setZero();
    g(m + i, i) = -1.0;
    h(m + i) = -lo(i);
    g.row(m + n + i).setZero();
    g(m + n + i, i) = 1.0;
    h(m + n + i) = hi(i);
  }
  const int rows = m + 2 * n;
  VertexResult best;
  std::vector<int> pick(n);
  // Iterate over all n-subsets of rows.
  std::vector<bool> mask(rows, false);
  std::fill(mask.begin(), mask.begin() + n, true);
  do {
    int t = 0;
    for (int r = 0; r < rows; ++r)
      if (mask[r]) pick[t++] = r;
    Eigen::MatrixXd s(n, n);
    Eigen::VectorXd rhs(n);
    for (int i = 0; i < n; ++i) {
      s.row(i) = g.row(pick[i]);
      rhs(i) = h(pick[i]);
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(s);
    if (lu.rank() < n) continue;
    const Eigen::VectorXd x = lu.solve(rhs);
    const Eigen::VectorXd slack = g * x - h;
    if (slack.maxCoeff() > tol * (1.0 + h.cwiseAbs().maxCoeff())) continue;
    const double obj = c.dot(x);
    if (!best.feasible || obj < best.objective) {
      best.feasible = true;
      best.objective = obj;
      best.x = x;
    }
  } while (std::prev_permutation(mask.begin(), mask.end()));
  return best;
}

struct RandomLp {
  cran::opt::LinearProgram lp;
  VertexResult reference;
};

// 3 variables in a box, 5 random inequality rows; some instances are
// infeasible by construction of the right-hand side.
inline RandomLp random_lp(std::mt19937_64& eng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> rhs(-1.0, 2.0);
  RandomLp out;
  auto& lp = out.lp;
  lp = cran::opt::LinearProgram::with_dimension(3);
  lp.c = Eigen::VectorXd(3);
  for (int i = 0; i < 3; ++i) lp.c(i) = u(eng);
  lp.a_ineq = Eigen::MatrixXd(5, 3);
  lp.b_ineq = Eigen::VectorXd(5);
  for (int r = 0; r < 5; ++r) {
    for (int i = 0; i < 3; ++i) lp.a_ineq(r, i) = u(eng);
    lp.b_ineq(r) = rhs(eng);
  }
  lp.lower = Eigen::VectorXd::Constant(3, -2.0);
  lp.upper = Eigen::VectorXd::Constant(3, 5.0);
  out.reference = enumerate_vertices(lp.c, lp.a_ineq, lp.b_ineq, lp.lower, lp.upper);
  return out;
}

// ---------------------------------------------------------------------------
// Two DL users of one RRH sharing one subcarrier. The user with the larger
// gain is decoded first by the other, so the weaker one sees p_strong*h_weak.

struct TwoUserInstance {
  cran::NetworkInstance net;
  cran::ChannelRealization ch;
  cran::Allocation alloc;
  cran::RateFloors floors;
  double h[2] = {0, 0};
  double floor_bps[2] = {0, 0};
};

inline cran::ScenarioConfig two_user_config() {
  cran::ScenarioConfig c;
  c.num_rrh = 1;
  c.num_slices = 2;
  c.users_per_slice_per_rrh = 1;
  c.access_bw_hz = c.subcarrier_bw_hz;
  c.fronthaul_bw_hz = c.subcarrier_bw_hz;
  return c;
}

inline TwoUserInstance two_user_instance(std::mt19937_64& eng) {
  using cran::Direction;
  TwoUserInstance t;
  t.net = cran::build_network(two_user_config());
  t.ch = cran::sample_channels(t.net, eng());
  std::uniform_real_distribution<double> dist(50.0, 1000.0);
  std::exponential_distribution<double> fade(1.0);
  std::uniform_real_distribution<double> se(0.05, 4.0);
  for (int i = 0; i < 2; ++i) {
    t.h[i] = fade(eng) * std::pow(dist(eng), -t.net.alpha);
    t.ch.access_gain(Direction::Downlink, i, 0, 0) = t.h[i];
    t.floor_bps[i] = se(eng) * t.net.w_s;
  }
  t.alloc = cran::Allocation::empty(t.net);
  for (int i = 0; i < 2; ++i) {
    t.alloc.tau(Direction::Downlink, i, 0) = 1.0;
    t.alloc.p_access(Direction::Downlink, i, 0) = 0.25 * t.net.p_rrh_dl;
  }
  t.alloc.delay = cran::DelayBudget::thirds(1, 2, t.net.d_total_max);
  t.floors.rrh_ul = {0.0};
  t.floors.bbu_ul = 0.0;
  t.floors.user_dl = {t.floor_bps[0], t.floor_bps[1]};
  return t;
}

// Brute force over 10^6 log-spaced strong-user powers; the weak user's power
// is the least value meeting its floor at that point.
inline std::optional<double> two_user_grid_minimum(const TwoUserInstance& t, int points = 1000000) {
  const double sigma = t.net.noise_power();
  const double w = t.net.w_s;
  const int strong = cran::decoded_before(t.h[0], 0, t.h[1], 1) ? 0 : 1;
  const int weak = 1 - strong;
  const double cap = t.net.p_rrh_dl;
  const double lo = std::log(cap * 1e-14), hi = std::log(cap);
  double best = std::numeric_limits<double>::infinity();
  for (int n = 0; n < points; ++n) {
    const double ps = std::exp(lo + (hi - lo) * n / (points - 1));
    if (w * std::log2(1.0 + ps * t.h[strong] / sigma) < t.floor_bps[strong]) continue;
    const double den = sigma + ps * t.h[weak];
    const double pw = den * (std::exp2(t.floor_bps[weak] / w) - 1.0) / t.h[weak];
    if (ps + pw > cap) continue;
    best = std::min(best, ps + pw);
  }
  if (!std::isfinite(best)) return std::nullopt;
  return best;
}

// ---------------------------------------------------------------------------
// Least total power meeting sum_k w log2(1 + p_k g_k) >= rate over the
// subcarriers in `gains` (g = h / sigma), by water-filling.

inline double water_filling_power(std::vector<double> gains, double rate_bps, double w) {
  std::sort(gains.rbegin(), gains.rend());
  const double need = rate_bps / w;  // bits per Hz, summed over subcarriers
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t n = 1; n <= gains.size(); ++n) {
    // Active set = n best subcarriers; water level nu from the rate equation.
    double log_sum = 0.0;
    for (std::size_t k = 0; k < n; ++k) log_sum += std::log2(gains[k]);
    const double nu = std::exp2((need - log_sum) / static_cast<double>(n));
    if (nu * gains[n - 1] < 1.0) break;  // weakest active subcarrier would be empty
    double p = 0.0;
    for (std::size_t k = 0; k < n; ++k) p += nu - 1.0 / gains[k];
    best = std::min(best, p);
  }
  return best;
}

// ---------------------------------------------------------------------------
// Queue-bound tuples. The fluid bound carries over to a packetized Poisson
// source when the source's own effective bandwidth at theta stays below the
// service rate, lambda <= C theta b / (e^{theta b} - 1), and theta b << 1.
// Right at that edge the sojourn tail overshoots delta by up to e^{theta b}
// and 10^5 packets do not mix, so loads stop at 95% of the edge.

inline std::vector<cran::OracleCase> queue_tuples(int count, std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto log_uniform = [&](double a, double b) {
    return std::exp(std::log(a) + (std::log(b) - std::log(a)) * u(eng));
  };
  std::vector<cran::OracleCase> out;
  const double b = cran::kOraclePacketBits;
  for (int i = 0; i < count; ++i) {
    const double delta = log_uniform(1e-3, 1e-1);
    const double theta = log_uniform(1e-4, 1e-3);
    const double d = log_uniform(1e-3, 1e-1);
    const double c = cran::min_rate_floor(theta, delta, d);
    const double lambda_max = c * theta * b / std::expm1(theta * b);
    const double lambda = (0.5 + 0.45 * u(eng)) * lambda_max;
    out.push_back({lambda, theta, delta, d, c, seed * 1000 + static_cast<std::uint64_t>(i)});
  }
  return out;
}

}  // namespace oracle
