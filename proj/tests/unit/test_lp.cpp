#include <doctest.h>

#include <cmath>
#include <random>

#include "cran/convex.hpp"
#include "support/oracles.hpp"

using namespace cran::opt;

namespace {

Mat rows(std::initializer_list<std::initializer_list<double>> r) {
  Mat m(static_cast<Eigen::Index>(r.size()), static_cast<Eigen::Index>(r.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& row : r) {
    Eigen::Index j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

Vec vec(std::initializer_list<double> v) {
  Vec out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

}  // namespace

TEST_CASE("min x subject to x >= 3") {
  SUBCASE("as a bound") {
    LinearProgram lp = LinearProgram::with_dimension(1);
    lp.c = vec({1.0});
    lp.lower = vec({3.0});
    const auto r = solve_lp(lp);
    REQUIRE(r.status == LpStatus::Optimal);
    CHECK(r.x(0) == doctest::Approx(3.0));
  }
  SUBCASE("as a row") {
    LinearProgram lp = LinearProgram::with_dimension(1);
    lp.c = vec({1.0});
    lp.lower = vec({-INFINITY});
    lp.a_ineq = rows({{-1.0}});
    lp.b_ineq = vec({-3.0});
    const auto r = solve_lp(lp);
    REQUIRE(r.status == LpStatus::Optimal);
    CHECK(r.x(0) == doctest::Approx(3.0));
    CHECK(r.dual_ineq(0) == doctest::Approx(1.0));
    CHECK(lp_kkt_residual(lp, r) <= 1e-7);
  }
}

TEST_CASE("contradictory constraints are infeasible") {
  LinearProgram lp = LinearProgram::with_dimension(1);
  lp.c = vec({0.0});
  lp.a_ineq = rows({{1.0}, {-1.0}});
  lp.b_ineq = vec({1.0, -2.0});
  CHECK(solve_lp(lp).status == LpStatus::Infeasible);
  LinearProgram box = LinearProgram::with_dimension(1);
  box.c = vec({0.0});
  box.lower = vec({2.0});
  box.upper = vec({1.0});
  CHECK(solve_lp(box).status == LpStatus::Infeasible);
}

TEST_CASE("two-variable covering LP") {
  LinearProgram lp = LinearProgram::with_dimension(2);
  lp.c = vec({1.0, 1.0});
  lp.a_ineq = rows({{-1.0, -2.0}});
  lp.b_ineq = vec({-2.0});
  const auto r = solve_lp(lp);
  REQUIRE(r.status == LpStatus::Optimal);
  CHECK(r.x(0) == doctest::Approx(0.0));
  CHECK(r.x(1) == doctest::Approx(1.0));
  CHECK(r.objective == doctest::Approx(1.0));
  const auto ref = oracle::enumerate_vertices(lp.c, lp.a_ineq, lp.b_ineq, vec({0, 0}), vec({10, 10}));
  CHECK(ref.objective == doctest::Approx(r.objective));
}

TEST_CASE("unbounded") {
  LinearProgram lp = LinearProgram::with_dimension(2);
  lp.c = vec({-1.0, 0.0});
  lp.a_ineq = rows({{0.0, 1.0}});
  lp.b_ineq = vec({1.0});
  CHECK(solve_lp(lp).status == LpStatus::Unbounded);
}

TEST_CASE("equalities and free variables") {
  // min x - y, x + y = 2, x - y >= -4, both free.
  LinearProgram lp = LinearProgram::with_dimension(2);
  lp.c = vec({1.0, -1.0});
  lp.lower = vec({-INFINITY, -INFINITY});
  lp.a_eq = rows({{1.0, 1.0}});
  lp.b_eq = vec({2.0});
  lp.a_ineq = rows({{-1.0, 1.0}});
  lp.b_ineq = vec({4.0});
  const auto r = solve_lp(lp);
  REQUIRE(r.status == LpStatus::Optimal);
  CHECK(r.x(0) == doctest::Approx(-1.0));
  CHECK(r.x(1) == doctest::Approx(3.0));
  CHECK(lp_kkt_residual(lp, r) <= 1e-7);
}

TEST_CASE("degenerate LP terminates") {
  // Several rows active at the optimum vertex.
  LinearProgram lp = LinearProgram::with_dimension(3);
  lp.c = vec({-1.0, -1.0, -1.0});
  lp.a_ineq = rows({{1, 1, 0}, {0, 1, 1}, {1, 0, 1}, {1, 1, 1}, {2, 2, 2}});
  lp.b_ineq = vec({1, 1, 1, 1.5, 3});
  const auto r = solve_lp(lp);
  REQUIRE(r.status == LpStatus::Optimal);
  CHECK(r.objective == doctest::Approx(-1.5));
}

TEST_CASE("random LPs match vertex enumeration") {
  std::mt19937_64 eng(2024);
  int feasible = 0, infeasible = 0;
  for (int t = 0; t < 300; ++t) {
    const auto inst = oracle::random_lp(eng);
    const auto r = solve_lp(inst.lp);
    if (!inst.reference.feasible) {
      CHECK(r.status == LpStatus::Infeasible);
      ++infeasible;
      continue;
    }
    ++feasible;
    REQUIRE(r.status == LpStatus::Optimal);
    CHECK(r.objective == doctest::Approx(inst.reference.objective).epsilon(1e-8));
    CHECK(lp_kkt_residual(inst.lp, r) <= 1e-7);
  }
  CHECK(feasible > 50);
  CHECK(infeasible > 5);
}
