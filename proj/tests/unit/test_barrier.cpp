#include <doctest.h>

#include <cmath>
#include <random>

#include "cran/convex.hpp"
#include "support/oracles.hpp"

using namespace cran::opt;

namespace {

// c'x + 0.5 x'Qx with Q diagonal.
SmoothFunction quadratic(Vec c, Vec q) {
  return {[c, q](const Vec& x, Vec* g, Mat* h, double w) {
    if (g) *g = c + q.cwiseProduct(x);
    if (h) h->diagonal() += w * q;
    return c.dot(x) + 0.5 * x.dot(q.cwiseProduct(x));
  }};
}

SmoothFunction linear(Vec c) {
  return {[c](const Vec& x, Vec* g, Mat*, double) {
    if (g) *g = c;
    return c.dot(x);
  }};
}

// r0 - log2(1 + x_i / s) <= 0
SmoothFunction rate_floor(int i, double s, double r0) {
  return {[=](const Vec& x, Vec* g, Mat* h, double w) {
    const double a = s + x(i);
    if (g) {
      g->setZero(x.size());
      (*g)(i) = -1.0 / (a * std::log(2.0));
    }
    if (h) (*h)(i, i) += w / (a * a * std::log(2.0));
    return r0 - std::log2(a / s);
  }};
}

}  // namespace

TEST_CASE("unconstrained quadratic") {
  ConvexProgram p;
  p.dimension = 1;
  p.objective = {[](const Vec& x, Vec* g, Mat* h, double w) {
    if (g) *g = Vec::Constant(1, 2.0 * (x(0) - 2.0));
    if (h) (*h)(0, 0) += 2.0 * w;
    return (x(0) - 2.0) * (x(0) - 2.0);
  }};
  p.lower = Vec::Constant(1, -INFINITY);
  p.upper = Vec::Constant(1, INFINITY);
  const auto r = solve_convex(p, Vec::Constant(1, -7.0));
  REQUIRE(r.status == ConvexStatus::Optimal);
  CHECK(r.x(0) == doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("single-link power minimization") {
  const double sigma = 0.5, r0 = 3.0;
  ConvexProgram p;
  p.dimension = 1;
  p.objective = linear(Vec::Constant(1, 1.0));
  p.constraints = {rate_floor(0, sigma, r0)};
  p.lower = Vec::Zero(1);
  p.upper = Vec::Constant(1, 100.0);
  SUBCASE("strictly feasible start") {
    const auto r = solve_convex(p, Vec::Constant(1, 50.0));
    REQUIRE(r.status == ConvexStatus::Optimal);
    CHECK(r.x(0) == doctest::Approx(sigma * (std::exp2(r0) - 1.0)).epsilon(1e-7));
    CHECK(r.kkt_residual <= 1e-6);
    CHECK_FALSE(r.used_phase_one);
  }
  SUBCASE("infeasible start goes through phase one") {
    const auto r = solve_convex(p, Vec::Constant(1, 0.1));
    REQUIRE(r.status == ConvexStatus::Optimal);
    CHECK(r.used_phase_one);
    CHECK(r.x(0) == doctest::Approx(3.5).epsilon(1e-7));
  }
}

TEST_CASE("infeasible program") {
  ConvexProgram p;
  p.dimension = 1;
  p.objective = linear(Vec::Constant(1, 1.0));
  p.constraints = {rate_floor(0, 1.0, 10.0)};  // needs x >= 1023
  p.lower = Vec::Zero(1);
  p.upper = Vec::Constant(1, 10.0);
  CHECK(solve_convex(p, Vec::Constant(1, 5.0)).status == ConvexStatus::Infeasible);
}

TEST_CASE("two-user single-subcarrier power minimization vs grid") {
  // Weak user's floor is linear once written as p_w h_w >= (2^R - 1)(s + p_s h_w).
  std::mt19937_64 eng(17);
  for (int t = 0; t < 5; ++t) {
    const auto inst = oracle::two_user_instance(eng);
    const auto ref = oracle::two_user_grid_minimum(inst);
    if (!ref) continue;
    const int s = cran::decoded_before(inst.h[0], 0, inst.h[1], 1) ? 0 : 1;
    const int w = 1 - s;
    const double sigma = inst.net.noise_power();
    // Work in units of sigma / h_s for the strong and sigma / h_w for the weak.
    const double gs = std::exp2(inst.floor_bps[s] / inst.net.w_s) - 1.0;
    const double gw = std::exp2(inst.floor_bps[w] / inst.net.w_s) - 1.0;
    const double us = sigma / inst.h[s], uw = sigma / inst.h[w];
    ConvexProgram p;
    p.dimension = 2;
    p.objective = linear((Vec(2) << us, uw).finished() / (us + uw));
    p.lower = Vec::Zero(2);
    p.upper = Vec::Constant(2, INFINITY);
    // y_s >= gs ; y_w >= gw (1 + y_s h_w us / sigma)
    p.a_ineq = Mat(2, 2);
    p.a_ineq << -1.0, 0.0, gw * inst.h[w] * us / sigma, -1.0;
    p.b_ineq = (Vec(2) << -gs, -gw).finished();
    const auto r = solve_convex(p, Vec::Constant(2, 10.0 * (gs + gw + 1) * (1 + gs)));
    REQUIRE(r.status == ConvexStatus::Optimal);
    const double watts = r.x(0) * us + r.x(1) * uw;
    CHECK(watts == doctest::Approx(*ref).epsilon(1e-4));
  }
}

TEST_CASE("objective agrees with a tighter reference run") {
  std::mt19937_64 eng(5);
  std::uniform_real_distribution<double> u(0.2, 2.0);
  for (int t = 0; t < 20; ++t) {
    const int n = 3;
    Vec c(n), q(n);
    for (int i = 0; i < n; ++i) c(i) = u(eng), q(i) = u(eng);
    ConvexProgram p;
    p.dimension = n;
    p.objective = quadratic(c, q);
    for (int i = 0; i < n; ++i) p.constraints.push_back(rate_floor(i, u(eng), u(eng)));
    p.lower = Vec::Zero(n);
    p.upper = Vec::Constant(n, 50.0);
    p.a_ineq = Mat::Ones(1, n);
    p.b_ineq = Vec::Constant(1, 40.0);
    const auto a = solve_convex(p, Vec::Constant(n, 5.0));
    BarrierSettings tight;
    tight.gap_tolerance = 1e-10;
    const auto b = solve_convex(p, Vec::Constant(n, 5.0), tight);
    REQUIRE(a.status == ConvexStatus::Optimal);
    REQUIRE(b.status == ConvexStatus::Optimal);
    CHECK(a.kkt_residual <= 1e-6);
    CHECK(std::abs(a.objective - b.objective) <= 1e-6 * std::abs(b.objective));
  }
}

TEST_CASE("equality constraints") {
  // min x0^2 + x1^2 s.t. x0 + x1 = 1
  ConvexProgram p;
  p.dimension = 2;
  p.objective = quadratic(Vec::Zero(2), Vec::Constant(2, 2.0));
  p.lower = Vec::Constant(2, -INFINITY);
  p.upper = Vec::Constant(2, INFINITY);
  p.a_eq = Mat::Ones(1, 2);
  p.b_eq = Vec::Ones(1);
  const auto r = solve_convex(p, (Vec(2) << 3.0, -1.0).finished());
  REQUIRE(r.status == ConvexStatus::Optimal);
  CHECK(r.x(0) == doctest::Approx(0.5).epsilon(1e-7));
  CHECK(r.x(1) == doctest::Approx(0.5).epsilon(1e-7));
}

TEST_CASE("validation") {
  ConvexProgram p;
  p.dimension = 2;
  p.objective = linear(Vec::Ones(2));
  p.lower = Vec::Zero(2);
  p.upper = Vec::Zero(1);
  CHECK_THROWS(p.validate());
  p.upper = (Vec(2) << 1.0, -1.0).finished();
  CHECK_THROWS(p.validate());
}
