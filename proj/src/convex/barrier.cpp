#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "cran/convex.hpp"

namespace cran::opt {

const char* to_string(ConvexStatus s) {
  switch (s) {
    case ConvexStatus::Optimal: return "optimal";
    case ConvexStatus::Infeasible: return "infeasible";
    case ConvexStatus::IterationLimit: return "iteration-limit";
    case ConvexStatus::NumericalError: return "numerical-error";
  }
  return "?";
}

void ConvexProgram::validate() const {
  const Eigen::Index n = dimension;
  if (n <= 0) throw std::invalid_argument("ConvexProgram: dimension must be positive");
  if (!objective.eval) throw std::invalid_argument("ConvexProgram: missing objective");
  for (const auto& g : constraints)
    if (!g.eval) throw std::invalid_argument("ConvexProgram: empty constraint callback");
  if (lower.size() != n || upper.size() != n)
    throw std::invalid_argument("ConvexProgram: bound dims");
  for (Eigen::Index j = 0; j < n; ++j)
    if (!(lower(j) <= upper(j))) throw std::invalid_argument("ConvexProgram: lower > upper");
  auto rows_ok = [n](const Mat& a, const Vec& b) {
    return (a.rows() == 0 && b.size() == 0) || (a.cols() == n && a.rows() == b.size());
  };
  if (!rows_ok(a_ineq, b_ineq)) throw std::invalid_argument("ConvexProgram: inequality dims");
  if (!rows_ok(a_eq, b_eq)) throw std::invalid_argument("ConvexProgram: equality dims");
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int barrier_terms(const ConvexProgram& p) {
  int m = static_cast<int>(p.constraints.size() + p.b_ineq.size());
  for (int j = 0; j < p.dimension; ++j) {
    if (std::isfinite(p.lower(j))) ++m;
    if (std::isfinite(p.upper(j))) ++m;
  }
  return m;
}

// Value of t f(x) + sum -log(-g_i(x)) + linear and box logs; +inf outside.
double barrier_value(const ConvexProgram& p, const Vec& x, double t) {
  for (int j = 0; j < p.dimension; ++j)
    if (!(x(j) > p.lower(j) && x(j) < p.upper(j))) return kInf;
  double phi = 0.0;
  for (Eigen::Index i = 0; i < p.b_ineq.size(); ++i) {
    const double s = p.b_ineq(i) - p.a_ineq.row(i).dot(x);
    if (!(s > 0)) return kInf;
    phi -= std::log(s);
  }
  for (const auto& g : p.constraints) {
    const double v = g.value(x);
    if (!(v < 0)) return kInf;
    phi -= std::log(-v);
  }
  for (int j = 0; j < p.dimension; ++j) {
    if (std::isfinite(p.lower(j))) phi -= std::log(x(j) - p.lower(j));
    if (std::isfinite(p.upper(j))) phi -= std::log(p.upper(j) - x(j));
  }
  const double f = p.objective.value(x);
  if (!std::isfinite(f)) return kInf;
  return t * f + phi;
}

void barrier_derivatives(const ConvexProgram& p, const Vec& x, double t, Vec& grad,
                         Mat& hess) {
  const int n = p.dimension;
  grad.setZero(n);
  hess.setZero(n, n);
  p.objective.eval(x, &grad, &hess, t);
  grad *= t;
  Vec gg(n);
  for (const auto& g : p.constraints) {
    // d/dx -log(-g) = grad g / (-g); Hessian adds g g'/g^2 + H/(-g).
    const double v = g.value(x);
    gg.setZero();
    g.eval(x, &gg, &hess, 1.0 / (-v));
    grad += gg / (-v);
    hess.noalias() += (gg * gg.transpose()) / (v * v);
  }
  for (Eigen::Index i = 0; i < p.b_ineq.size(); ++i) {
    const double s = p.b_ineq(i) - p.a_ineq.row(i).dot(x);
    grad += p.a_ineq.row(i).transpose() / s;
    hess.noalias() += p.a_ineq.row(i).transpose() * p.a_ineq.row(i) / (s * s);
  }
  for (int j = 0; j < n; ++j) {
    if (std::isfinite(p.lower(j))) {
      const double s = x(j) - p.lower(j);
      grad(j) -= 1.0 / s;
      hess(j, j) += 1.0 / (s * s);
    }
    if (std::isfinite(p.upper(j))) {
      const double s = p.upper(j) - x(j);
      grad(j) += 1.0 / s;
      hess(j, j) += 1.0 / (s * s);
    }
  }
}

// Newton direction, with equality rows kept satisfied.
bool newton_direction(const Mat& hess, const Vec& grad, const Mat& a_eq, Vec& dx) {
  const Eigen::Index n = grad.size();
  const double diag = std::max(1.0, hess.diagonal().cwiseAbs().maxCoeff());
  for (double reg = 0.0; reg <= 1e-4; reg = reg == 0.0 ? 1e-14 : reg * 100.0) {
    Mat h = hess;
    if (reg > 0) h.diagonal().array() += reg * diag;
    if (a_eq.rows() == 0) {
      Eigen::LDLT<Mat> ldlt(h);
      if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) continue;
      dx = ldlt.solve(-grad);
    } else {
      const Eigen::Index me = a_eq.rows();
      Mat kkt = Mat::Zero(n + me, n + me);
      kkt.topLeftCorner(n, n) = h;
      kkt.topRightCorner(n, me) = a_eq.transpose();
      kkt.bottomLeftCorner(me, n) = a_eq;
      Vec rhs = Vec::Zero(n + me);
      rhs.head(n) = -grad;
      // The blocks differ in scale by t, which defeats a rank threshold;
      // check the solve by its residual instead.
      const Vec sol = kkt.partialPivLu().solve(rhs);
      if (!sol.allFinite() ||
          (kkt * sol - rhs).norm() > 1e-8 * (rhs.norm() + kkt.norm() * sol.norm()))
        continue;
      dx = sol.head(n);
    }
    // Near the center roundoff can leave a tiny positive product.
    if (dx.allFinite() && grad.dot(dx) <= 1e-12 * grad.norm() * dx.norm()) return true;
  }
  return false;
}

struct CoreResult {
  ConvexStatus status;
  Vec x;
  double t;
  int outer;
  int newton;
};

// Barrier path-following from a strictly feasible x. `stop` is checked after
// every Newton step and ends the run early with Optimal status.
CoreResult barrier_core(const ConvexProgram& p, Vec x, const BarrierSettings& s,
                        const std::function<bool(const Vec&)>& stop) {
  const double m = std::max(1, barrier_terms(p));
  double t = 1.0 / s.mu_initial;
  CoreResult out{ConvexStatus::IterationLimit, x, t, 0, 0};
  Vec grad;
  Mat hess;
  Vec dx;
  for (int outer = 0; outer < s.max_outer; ++outer) {
    out.outer = outer + 1;
    double last_decrement = kInf;
    for (int it = 0; it < s.max_newton; ++it) {
      barrier_derivatives(p, x, t, grad, hess);
      if (!newton_direction(hess, grad, p.a_eq, dx)) {
        out.status = ConvexStatus::NumericalError;
        out.x = x;
        out.t = t;
        return out;
      }
      const double decrement = -grad.dot(dx);
      if (decrement / 2.0 <= s.newton_tolerance) break;
      // Roundoff floor: the decrement stopped shrinking.
      if (decrement < 1e-8 && decrement > 0.5 * last_decrement) break;
      last_decrement = decrement;
      Vec trial = x + dx;
      // Inside the quadratic region the full step is taken as long as it stays
      // in the domain; comparing barrier values of size t f there only sees
      // roundoff.
      if (decrement < 0.1 && std::isfinite(barrier_value(p, trial, t))) {
        ++out.newton;
        x = trial;
        if (stop && stop(x)) {
          out.status = ConvexStatus::Optimal;
          out.x = x;
          out.t = t;
          return out;
        }
        continue;
      }
      const double phi = barrier_value(p, x, t);
      double alpha = 1.0;
      double phi_trial = barrier_value(p, trial, t);
      while (!(phi_trial <= phi - 0.01 * alpha * decrement) && alpha > 1e-14) {
        alpha *= 0.5;
        trial = x + alpha * dx;
        phi_trial = barrier_value(p, trial, t);
      }
      ++out.newton;
      if (!(phi_trial < phi)) break;  // no more progress at this t
      x = trial;
      if (stop && stop(x)) {
        out.status = ConvexStatus::Optimal;
        out.x = x;
        out.t = t;
        return out;
      }
    }
    const double f = p.objective.value(x);
    if (m / t <= s.gap_tolerance * std::max(1.0, std::abs(f))) {
      out.status = ConvexStatus::Optimal;
      break;
    }
    t *= s.mu_factor;
  }
  out.x = x;
  out.t = t;
  return out;
}

double max_violation(const ConvexProgram& p, const Vec& x) {
  double worst = -kInf;
  for (Eigen::Index i = 0; i < p.b_ineq.size(); ++i)
    worst = std::max(worst, p.a_ineq.row(i).dot(x) - p.b_ineq(i));
  for (const auto& g : p.constraints) worst = std::max(worst, g.value(x));
  return worst;
}

// Pull x inside the open box.
Vec interior_of_box(const ConvexProgram& p, Vec x) {
  for (int j = 0; j < p.dimension; ++j) {
    const double l = p.lower(j), u = p.upper(j);
    double margin = 1e-6 * std::max({1.0, std::abs(l) * std::isfinite(l),
                                     std::abs(u) * std::isfinite(u)});
    if (std::isfinite(l) && std::isfinite(u)) margin = std::min(margin, (u - l) / 4.0);
    if (std::isfinite(l) && x(j) < l + margin) x(j) = l + margin;
    if (std::isfinite(u) && x(j) > u - margin) x(j) = u - margin;
  }
  return x;
}

// Stationarity, complementarity and primal violation at x. Multipliers start
// from the barrier estimates 1/(t s_i); at large t those carry the roundoff of
// s_i ~ 1/t, so they are refit by least squares on the near-active set and
// the better of the two estimates is reported.
double kkt_residual(const ConvexProgram& p, const Vec& x, double t) {
  const int n = p.dimension;
  std::vector<Vec> cols;
  std::vector<double> slack;
  Vec gg(n);
  for (const auto& g : p.constraints) {
    gg.setZero();
    const double v = g.eval(x, &gg, nullptr, 0.0);
    cols.push_back(gg);
    slack.push_back(-v);
  }
  for (Eigen::Index i = 0; i < p.b_ineq.size(); ++i) {
    cols.push_back(p.a_ineq.row(i).transpose());
    slack.push_back(p.b_ineq(i) - p.a_ineq.row(i).dot(x));
  }
  for (int j = 0; j < n; ++j) {
    if (std::isfinite(p.lower(j))) {
      cols.push_back(-Vec::Unit(n, j));
      slack.push_back(x(j) - p.lower(j));
    }
    if (std::isfinite(p.upper(j))) {
      cols.push_back(Vec::Unit(n, j));
      slack.push_back(p.upper(j) - x(j));
    }
  }
  Vec g0 = Vec::Zero(n);
  p.objective.eval(x, &g0, nullptr, 0.0);
  const double scale = std::max(1.0, g0.cwiseAbs().maxCoeff());
  const std::size_t m = cols.size();

  auto residual_of = [&](const std::vector<double>& lam) {
    Vec r = g0;
    double comp = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      r += lam[i] * cols[i];
      comp = std::max(comp, std::abs(lam[i] * slack[i]));
    }
    if (p.b_eq.size()) {
      const Vec nu = (p.a_eq * p.a_eq.transpose()).ldlt().solve(p.a_eq * r);
      r -= p.a_eq.transpose() * nu;
    }
    double primal = 0.0;
    for (double sl : slack) primal = std::max(primal, -sl);
    return std::max({r.cwiseAbs().maxCoeff() / scale, comp / scale, primal});
  };

  std::vector<double> barrier(m);
  for (std::size_t i = 0; i < m; ++i) barrier[i] = 1.0 / (t * slack[i]);
  double best = residual_of(barrier);

  double top = 0.0;
  for (double l : barrier) top = std::max(top, l);
  std::vector<int> active;
  for (std::size_t i = 0; i < m; ++i)
    if (barrier[i] > 1e-6 * top) active.push_back(static_cast<int>(i));
  if (!active.empty() && static_cast<int>(active.size()) <= n + static_cast<int>(p.b_eq.size())) {
    const Eigen::Index me = p.a_eq.rows();
    Mat a(n, static_cast<Eigen::Index>(active.size()) + me);
    for (std::size_t c = 0; c < active.size(); ++c) a.col(static_cast<Eigen::Index>(c)) = cols[active[c]];
    if (me) a.rightCols(me) = p.a_eq.transpose();
    const Vec sol = a.colPivHouseholderQr().solve(-g0);
    std::vector<double> lam(m, 0.0);
    for (std::size_t c = 0; c < active.size(); ++c)
      lam[active[c]] = std::max(0.0, sol(static_cast<Eigen::Index>(c)));
    if (std::all_of(lam.begin(), lam.end(), [](double v) { return std::isfinite(v); }))
      best = std::min(best, residual_of(lam));
  }
  return best;
}

}  // namespace

bool strictly_feasible(const ConvexProgram& p, const Vec& x) {
  for (int j = 0; j < p.dimension; ++j)
    if (!(x(j) > p.lower(j) && x(j) < p.upper(j))) return false;
  return max_violation(p, x) < 0.0;
}

ConvexResult solve_convex(const ConvexProgram& prog, const Vec& x_init,
                          const BarrierSettings& settings) {
  prog.validate();
  if (x_init.size() != prog.dimension)
    throw std::invalid_argument("solve_convex: x_init has wrong dimension");
  const int n = prog.dimension;
  ConvexResult res;
  Vec x = x_init;

  if (prog.b_eq.size()) {
    const Vec r = prog.a_eq * x - prog.b_eq;
    x -= prog.a_eq.transpose() * (prog.a_eq * prog.a_eq.transpose()).ldlt().solve(r);
  }

  if (!strictly_feasible(prog, x)) {
    res.used_phase_one = true;
    x = interior_of_box(prog, x);
    if (prog.b_eq.size() &&
        (prog.a_eq * x - prog.b_eq).cwiseAbs().maxCoeff() >
            1e-9 * (1.0 + prog.b_eq.cwiseAbs().maxCoeff())) {
      // Box clipping broke the equalities; phase one cannot recover that.
      res.status = ConvexStatus::Infeasible;
      res.x = x;
      return res;
    }
    const double v0 = max_violation(prog, x);
    if (!std::isfinite(v0)) {
      res.status = ConvexStatus::NumericalError;
      res.x = x;
      return res;
    }
    // min s  s.t.  g_i(x) <= s,  A x - s <= b,  s >= -1.
    ConvexProgram ph;
    ph.dimension = n + 1;
    ph.objective.eval = [n](const Vec& z, Vec* g, Mat*, double) {
      if (g) {
        g->setZero(n + 1);
        (*g)(n) = 1.0;
      }
      return z(n);
    };
    for (const auto& c : prog.constraints) {
      ph.constraints.push_back({[n, &c](const Vec& z, Vec* g, Mat* h, double w) {
        const Vec xs = z.head(n);
        double v;
        if (g || h) {
          Vec gx = Vec::Zero(n);
          Mat hx;
          if (h) hx = Mat::Zero(n, n);
          v = c.eval(xs, &gx, h ? &hx : nullptr, w);
          if (g) {
            g->setZero(n + 1);
            g->head(n) = gx;
            (*g)(n) = -1.0;
          }
          if (h) h->topLeftCorner(n, n) += hx;
        } else {
          v = c.value(xs);
        }
        return v - z(n);
      }});
    }
    ph.lower = Vec(n + 1);
    ph.upper = Vec(n + 1);
    ph.lower.head(n) = prog.lower;
    ph.upper.head(n) = prog.upper;
    ph.lower(n) = -1.0;
    ph.upper(n) = kInf;
    if (prog.b_ineq.size()) {
      ph.a_ineq = Mat::Zero(prog.a_ineq.rows(), n + 1);
      ph.a_ineq.leftCols(n) = prog.a_ineq;
      ph.a_ineq.col(n).setConstant(-1.0);
      ph.b_ineq = prog.b_ineq;
    } else {
      ph.a_ineq.resize(0, n + 1);
    }
    if (prog.b_eq.size()) {
      ph.a_eq = Mat::Zero(prog.a_eq.rows(), n + 1);
      ph.a_eq.leftCols(n) = prog.a_eq;
      ph.b_eq = prog.b_eq;
    } else {
      ph.a_eq.resize(0, n + 1);
    }
    Vec z(n + 1);
    z.head(n) = x;
    z(n) = std::max(v0, 0.0) + 0.1 * (1.0 + std::abs(v0));
    auto stop = [&](const Vec& zz) { return strictly_feasible(prog, Vec(zz.head(n))); };
    const CoreResult pr = barrier_core(ph, z, settings, stop);
    res.newton_iterations += pr.newton;
    x = pr.x.head(n);
    if (!strictly_feasible(prog, x)) {
      res.status = pr.status == ConvexStatus::Optimal ? ConvexStatus::Infeasible : pr.status;
      if (pr.status == ConvexStatus::IterationLimit) res.status = ConvexStatus::Infeasible;
      res.x = x;
      return res;
    }
  }

  const CoreResult cr = barrier_core(prog, x, settings, nullptr);
  res.status = cr.status;
  res.x = cr.x;
  res.outer_iterations = cr.outer;
  res.newton_iterations += cr.newton;
  res.objective = prog.objective.value(cr.x);
  const double m = std::max(1, barrier_terms(prog));
  res.gap = m / cr.t;

  res.multipliers = Vec::Zero(static_cast<Eigen::Index>(prog.constraints.size()));
  for (std::size_t i = 0; i < prog.constraints.size(); ++i)
    res.multipliers(static_cast<Eigen::Index>(i)) =
        1.0 / (cr.t * -prog.constraints[i].value(cr.x));

  res.kkt_residual = kkt_residual(prog, cr.x, cr.t);
  return res;
}

}  // namespace cran::opt
