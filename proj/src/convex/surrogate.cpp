#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "cran/convex.hpp"

namespace cran::opt {

namespace {

constexpr double kInvLn2 = 1.0 / std::numbers::ln2;

// scale*log2(a(x)): gradient scale/(ln2 a) * coef, Hessian -scale/(ln2 a^2) cc'.
void add_log_derivatives(const AffineForm& a, double av, double scale, Vec* grad,
                         Mat* hess) {
  const double gcoef = scale * kInvLn2 / av;
  if (grad)
    for (auto [j, c] : a.terms) (*grad)(j) += gcoef * c;
  if (hess) {
    const double hcoef = -scale * kInvLn2 / (av * av);
    for (auto [j, cj] : a.terms)
      for (auto [k, ck] : a.terms) (*hess)(j, k) += hcoef * cj * ck;
  }
}

// Tangent of scale*log2(a) at a0 evaluated at a(x).
double log_tangent(double a_x, double a0, double scale) {
  return scale * (std::log2(a0) + kInvLn2 * (a_x - a0) / a0);
}

}  // namespace

double AffineForm::eval(const Vec& x) const {
  double v = constant;
  for (auto [j, c] : terms) v += c * x(j);
  return v;
}

double DcRate::value(const Vec& x) const {
  return scale * (std::log2(total.eval(x)) - std::log2(interference.eval(x)));
}

double DcSurrogate::lower(const Vec& x) const {
  const double t = rate.total.eval(x);
  if (!(t > 0)) return -std::numeric_limits<double>::infinity();
  return rate.scale * std::log2(t) - log_tangent(rate.interference.eval(x), interference0, rate.scale);
}

double DcSurrogate::upper(const Vec& x) const {
  const double i = rate.interference.eval(x);
  if (!(i > 0)) return std::numeric_limits<double>::infinity();
  return log_tangent(rate.total.eval(x), total0, rate.scale) - rate.scale * std::log2(i);
}

void DcSurrogate::add_lower_derivatives(const Vec& x, double weight, Vec* grad,
                                        Mat* hess) const {
  add_log_derivatives(rate.total, rate.total.eval(x), weight * rate.scale, grad, hess);
  if (grad) {
    const double c = weight * rate.scale * kInvLn2 / interference0;
    for (auto [j, a] : rate.interference.terms) (*grad)(j) -= c * a;
  }
}

void DcSurrogate::add_upper_derivatives(const Vec& x, double weight, Vec* grad,
                                        Mat* hess) const {
  if (grad) {
    const double c = weight * rate.scale * kInvLn2 / total0;
    for (auto [j, a] : rate.total.terms) (*grad)(j) += c * a;
  }
  add_log_derivatives(rate.interference, rate.interference.eval(x), -weight * rate.scale, grad,
                      hess);
}

DcSurrogate build_rate_surrogate(const DcRate& rate, const Vec& x0) {
  DcSurrogate s;
  s.rate = rate;
  s.total0 = rate.total.eval(x0);
  s.interference0 = rate.interference.eval(x0);
  if (!(s.total0 > 0) || !(s.interference0 > 0))
    throw std::domain_error("build_rate_surrogate: log argument not positive at x0");
  for (auto [j, c] : rate.total.terms) s.x0_terms.emplace_back(j, x0(j));
  return s;
}

std::vector<DcSurrogate> build_rate_surrogates(std::span<const DcRate> rates, const Vec& x0) {
  std::vector<DcSurrogate> out;
  out.reserve(rates.size());
  for (const auto& r : rates) out.push_back(build_rate_surrogate(r, x0));
  return out;
}

}  // namespace cran::opt
