#include <doctest.h>

#include <cmath>
#include <random>

#include "cran/convex.hpp"

using namespace cran::opt;

namespace {

DcRate random_rate(std::mt19937_64& eng, int dim, bool with_interference = true) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  DcRate r;
  r.scale = 0.5 + u(eng);
  r.interference.constant = 0.5 + u(eng);
  if (with_interference)
    for (int j = 1; j < dim; ++j) r.interference.terms.push_back({j, 5.0 * u(eng)});
  r.total = r.interference;
  r.total.terms.push_back({0, 20.0 * u(eng)});
  return r;
}

Vec random_point(std::mt19937_64& eng, int dim) {
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  Vec x(dim);
  for (int j = 0; j < dim; ++j) x(j) = std::exp(u(eng));
  return x;
}

}  // namespace

TEST_CASE("tangency at the expansion point") {
  std::mt19937_64 eng(1);
  for (int t = 0; t < 200; ++t) {
    const auto rate = random_rate(eng, 4);
    const Vec x0 = random_point(eng, 4);
    const auto s = build_rate_surrogate(rate, x0);
    CHECK(std::abs(s.lower(x0) - rate.value(x0)) <= 1e-12 * std::max(1.0, std::abs(rate.value(x0))));
    CHECK(std::abs(s.upper(x0) - rate.value(x0)) <= 1e-12 * std::max(1.0, std::abs(rate.value(x0))));
  }
}

TEST_CASE("surrogates bracket the rate") {
  std::mt19937_64 eng(2);
  for (int t = 0; t < 100; ++t) {
    const auto rate = random_rate(eng, 4);
    const auto s = build_rate_surrogate(rate, random_point(eng, 4));
    const Vec x = random_point(eng, 4);
    CHECK(s.lower(x) <= rate.value(x) + 1e-9);
    CHECK(s.upper(x) >= rate.value(x) - 1e-9);
  }
}

TEST_CASE("no interference: lower surrogate is exact") {
  std::mt19937_64 eng(3);
  const auto rate = random_rate(eng, 1, false);
  const auto s = build_rate_surrogate(rate, random_point(eng, 1));
  for (int t = 0; t < 50; ++t) {
    const Vec x = random_point(eng, 1);
    CHECK(s.lower(x) == doctest::Approx(rate.value(x)).epsilon(1e-12));
  }
}

TEST_CASE("surrogate derivatives match central differences") {
  std::mt19937_64 eng(4);
  const int dim = 4;
  for (int t = 0; t < 50; ++t) {
    const auto rate = random_rate(eng, dim);
    const auto s = build_rate_surrogate(rate, random_point(eng, dim));
    const Vec x = random_point(eng, dim);
    for (int side = 0; side < 2; ++side) {
      Vec g = Vec::Zero(dim);
      Mat h = Mat::Zero(dim, dim);
      auto f = [&](const Vec& y) { return side ? s.upper(y) : s.lower(y); };
      if (side)
        s.add_upper_derivatives(x, 1.0, &g, &h);
      else
        s.add_lower_derivatives(x, 1.0, &g, &h);
      for (int j = 0; j < dim; ++j) {
        const double step = 1e-6 * std::max(1.0, x(j));
        Vec a = x, b = x;
        a(j) += step;
        b(j) -= step;
        const double fd = (f(a) - f(b)) / (2 * step);
        CHECK(std::abs(fd - g(j)) <= 1e-5 * std::max(1e-3, std::abs(g(j))));
        Vec ga = Vec::Zero(dim), gb = Vec::Zero(dim);
        if (side) {
          s.add_upper_derivatives(a, 1.0, &ga, nullptr);
          s.add_upper_derivatives(b, 1.0, &gb, nullptr);
        } else {
          s.add_lower_derivatives(a, 1.0, &ga, nullptr);
          s.add_lower_derivatives(b, 1.0, &gb, nullptr);
        }
        const Vec col = (ga - gb) / (2 * step);
        for (int i = 0; i < dim; ++i)
          CHECK(std::abs(col(i) - h(i, j)) <= 1e-5 * std::max(1e-3, std::abs(h(i, j))));
      }
    }
  }
}

TEST_CASE("batch construction") {
  std::mt19937_64 eng(5);
  std::vector<DcRate> rates{random_rate(eng, 3), random_rate(eng, 3)};
  const Vec x0 = random_point(eng, 3);
  const auto all = build_rate_surrogates(rates, x0);
  REQUIRE(all.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) CHECK(all[i].lower(x0) == doctest::Approx(rates[i].value(x0)));
}
