#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "cran/convex.hpp"

namespace cran::opt {

const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
    case LpStatus::IterationLimit: return "iteration-limit";
  }
  return "?";
}

LinearProgram LinearProgram::with_dimension(int n) {
  LinearProgram lp;
  lp.c = Vec::Zero(n);
  lp.a_ineq.resize(0, n);
  lp.b_ineq.resize(0);
  lp.a_eq.resize(0, n);
  lp.b_eq.resize(0);
  lp.lower = Vec::Zero(n);
  lp.upper = Vec::Constant(n, std::numeric_limits<double>::infinity());
  return lp;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_dims(const LinearProgram& lp) {
  const Eigen::Index n = lp.c.size();
  auto rows_ok = [n](const Mat& a, const Vec& b) {
    return (a.rows() == 0 && b.size() == 0) || (a.cols() == n && a.rows() == b.size());
  };
  if (!rows_ok(lp.a_ineq, lp.b_ineq)) throw std::invalid_argument("solve_lp: inequality dims");
  if (!rows_ok(lp.a_eq, lp.b_eq)) throw std::invalid_argument("solve_lp: equality dims");
  if (lp.lower.size() != n || lp.upper.size() != n)
    throw std::invalid_argument("solve_lp: bound dims");
}

// Standard-form column: a shifted/negated copy of one original variable.
struct StdColumn {
  int var;
  double sign;
};

// Dense tableau. Row m holds reduced costs, column `cols` the rhs.
class Tableau {
 public:
  Tableau(int rows, int cols) : m_(rows), n_(cols), t_(Mat::Zero(rows + 1, cols + 1)) {}

  double& at(int r, int c) { return t_(r, c); }
  double at(int r, int c) const { return t_(r, c); }
  double& rhs(int r) { return t_(r, n_); }
  double& cost(int c) { return t_(m_, c); }
  double objective() const { return -t_(m_, n_); }

  void pivot(int r, int c) {
    const double p = t_(r, c);
    t_.row(r) /= p;
    for (int i = 0; i <= m_; ++i) {
      if (i == r) continue;
      const double f = t_(i, c);
      if (f != 0.0) t_.row(i) -= f * t_.row(r);
    }
  }

  // Rebuild the reduced-cost row for costs `c` given the current basis.
  void price(const Vec& c, const std::vector<int>& basis) {
    t_.row(m_).setZero();
    t_.row(m_).head(n_) = c.transpose();
    for (int r = 0; r < m_; ++r) {
      const double cb = c(basis[r]);
      if (cb != 0.0) t_.row(m_) -= cb * t_.row(r);
    }
  }

  int rows() const { return m_; }
  int cols() const { return n_; }

 private:
  int m_;
  int n_;
  Mat t_;
};

enum class PhaseResult { Optimal, Unbounded, IterationLimit };

// Primal simplex on the tableau. Dantzig pricing; after a run of degenerate
// pivots it switches to Bland's rule until progress resumes.
PhaseResult iterate(Tableau& t, std::vector<int>& basis, const std::vector<char>& allowed,
                    double tol, int& iterations, int max_iterations) {
  int degenerate_run = 0;
  for (;;) {
    const bool bland = degenerate_run > 20;
    int enter = -1;
    double best = -tol;
    for (int c = 0; c < t.cols(); ++c) {
      if (!allowed[c]) continue;
      const double d = t.cost(c);
      if (d < best) {
        enter = c;
        best = d;
        if (bland) break;
      }
    }
    if (enter < 0) return PhaseResult::Optimal;
    if (iterations >= max_iterations) return PhaseResult::IterationLimit;

    int leave = -1;
    double ratio = kInf;
    for (int r = 0; r < t.rows(); ++r) {
      const double a = t.at(r, enter);
      if (a <= tol) continue;
      const double q = t.rhs(r) / a;
      if (q < ratio - 1e-12 ||
          (q <= ratio + 1e-12 && leave >= 0 && basis[r] < basis[leave])) {
        ratio = q;
        leave = r;
      }
    }
    if (leave < 0) return PhaseResult::Unbounded;
    degenerate_run = ratio <= tol ? degenerate_run + 1 : 0;
    t.pivot(leave, enter);
    basis[leave] = enter;
    ++iterations;
  }
}

}  // namespace

LpResult solve_lp(const LinearProgram& lp, const LpSettings& settings) {
  check_dims(lp);
  const int n = lp.dimension();
  const int mi = static_cast<int>(lp.b_ineq.size());
  const int me = static_cast<int>(lp.b_eq.size());
  const double tol = settings.tolerance;

  LpResult out;
  out.x = Vec::Zero(n);
  out.dual_ineq = Vec::Zero(mi);
  out.dual_eq = Vec::Zero(me);

  for (int j = 0; j < n; ++j)
    if (lp.lower(j) > lp.upper(j)) return out;  // contradictory bounds

  // x_j = offset_j + sum sign * z_k over its standard columns.
  Vec offset = Vec::Zero(n);
  std::vector<StdColumn> cols;
  std::vector<std::pair<int, double>> bound_rows;  // (std column, width)
  for (int j = 0; j < n; ++j) {
    const double l = lp.lower(j), u = lp.upper(j);
    if (std::isfinite(l)) {
      offset(j) = l;
      cols.push_back({j, 1.0});
      if (std::isfinite(u)) bound_rows.emplace_back(static_cast<int>(cols.size()) - 1, u - l);
    } else if (std::isfinite(u)) {
      offset(j) = u;
      cols.push_back({j, -1.0});
    } else {
      cols.push_back({j, 1.0});
      cols.push_back({j, -1.0});
    }
  }
  const int nz = static_cast<int>(cols.size());
  const int nb = static_cast<int>(bound_rows.size());
  const int m = mi + nb + me;
  const int n_slack = mi + nb;

  // Row data before sign normalization.
  Mat a = Mat::Zero(m, nz);
  Vec b = Vec::Zero(m);
  for (int r = 0; r < mi; ++r) {
    for (int k = 0; k < nz; ++k) a(r, k) = lp.a_ineq(r, cols[k].var) * cols[k].sign;
    b(r) = lp.b_ineq(r) - lp.a_ineq.row(r).dot(offset);
  }
  for (int r = 0; r < nb; ++r) {
    a(mi + r, bound_rows[r].first) = 1.0;
    b(mi + r) = bound_rows[r].second;
  }
  for (int r = 0; r < me; ++r) {
    for (int k = 0; k < nz; ++k) a(mi + nb + r, k) = lp.a_eq(r, cols[k].var) * cols[k].sign;
    b(mi + nb + r) = lp.b_eq(r) - lp.a_eq.row(r).dot(offset);
  }

  std::vector<double> flip(m, 1.0);
  std::vector<int> art_of_row(m, -1);
  int n_art = 0;
  for (int r = 0; r < m; ++r) {
    if (b(r) < 0) flip[r] = -1.0;
    // A slack with coefficient +1 can start in the basis; others need an
    // artificial.
    const bool has_unit_slack = r < n_slack && flip[r] > 0;
    if (!has_unit_slack) art_of_row[r] = n_art++;
  }
  const int n_total = nz + n_slack + n_art;
  Tableau t(m, n_total);
  std::vector<int> basis(m);
  std::vector<int> unit_col(m);
  for (int r = 0; r < m; ++r) {
    for (int k = 0; k < nz; ++k) t.at(r, k) = flip[r] * a(r, k);
    if (r < n_slack) t.at(r, nz + r) = flip[r];
    t.rhs(r) = flip[r] * b(r);
    if (art_of_row[r] >= 0) {
      const int c = nz + n_slack + art_of_row[r];
      t.at(r, c) = 1.0;
      unit_col[r] = c;
    } else {
      unit_col[r] = nz + r;
    }
    basis[r] = unit_col[r];
  }

  const double b_scale = 1.0 + (b.size() ? b.cwiseAbs().maxCoeff() : 0.0);
  std::vector<char> allowed(n_total, 1);
  int iterations = 0;

  if (n_art > 0) {
    Vec c1 = Vec::Zero(n_total);
    c1.tail(n_art).setOnes();
    t.price(c1, basis);
    const PhaseResult p1 = iterate(t, basis, allowed, tol, iterations, settings.max_iterations);
    out.iterations = iterations;
    if (p1 == PhaseResult::IterationLimit) {
      out.status = LpStatus::IterationLimit;
      return out;
    }
    if (t.objective() > 1e-8 * b_scale) {
      out.status = LpStatus::Infeasible;
      return out;
    }
    // Drive zero-level artificials out of the basis where possible.
    for (int r = 0; r < m; ++r) {
      if (basis[r] < nz + n_slack) continue;
      int best = -1;
      double mag = tol;
      for (int c = 0; c < nz + n_slack; ++c)
        if (std::abs(t.at(r, c)) > mag) {
          mag = std::abs(t.at(r, c));
          best = c;
        }
      if (best >= 0) {
        t.pivot(r, best);
        basis[r] = best;
      }
    }
    for (int c = nz + n_slack; c < n_total; ++c) allowed[c] = 0;
  }

  Vec c2 = Vec::Zero(n_total);
  for (int k = 0; k < nz; ++k) c2(k) = lp.c(cols[k].var) * cols[k].sign;
  t.price(c2, basis);
  const PhaseResult p2 = iterate(t, basis, allowed, tol, iterations, settings.max_iterations);
  out.iterations = iterations;
  if (p2 == PhaseResult::Unbounded) {
    out.status = LpStatus::Unbounded;
    return out;
  }

  Vec z = Vec::Zero(n_total);
  for (int r = 0; r < m; ++r) z(basis[r]) = std::max(0.0, t.rhs(r));
  out.x = offset;
  for (int k = 0; k < nz; ++k) out.x(cols[k].var) += cols[k].sign * z(k);
  out.objective = lp.c.dot(out.x);

  // Row multipliers y_r = c_u - d_u for each row's initial unit column
  // (cost 0), then mapped back to the original row orientation.
  for (int r = 0; r < m; ++r) {
    const double y = -t.cost(unit_col[r]);
    if (r < mi) out.dual_ineq(r) = -flip[r] * y;
    else if (r >= mi + nb) out.dual_eq(r - mi - nb) = -flip[r] * y;
  }
  out.status = p2 == PhaseResult::Optimal ? LpStatus::Optimal : LpStatus::IterationLimit;
  return out;
}

double lp_kkt_residual(const LinearProgram& lp, const LpResult& r) {
  const int n = lp.dimension();
  const double scale = 1.0 + (n ? lp.c.cwiseAbs().maxCoeff() : 0.0);
  double worst = 0.0;
  const Vec& x = r.x;
  const double btol = 1e-9;

  for (Eigen::Index i = 0; i < lp.b_ineq.size(); ++i) {
    const double slack = lp.b_ineq(i) - lp.a_ineq.row(i).dot(x);
    worst = std::max(worst, -slack);
    worst = std::max(worst, -r.dual_ineq(i));
    worst = std::max(worst, std::abs(r.dual_ineq(i) * slack) / scale);
  }
  for (Eigen::Index i = 0; i < lp.b_eq.size(); ++i)
    worst = std::max(worst, std::abs(lp.a_eq.row(i).dot(x) - lp.b_eq(i)));

  Vec d = lp.c;
  if (lp.b_ineq.size()) d += lp.a_ineq.transpose() * r.dual_ineq;
  if (lp.b_eq.size()) d += lp.a_eq.transpose() * r.dual_eq;
  for (int j = 0; j < n; ++j) {
    const double l = lp.lower(j), u = lp.upper(j);
    worst = std::max({worst, l - x(j), x(j) - u});
    const bool at_l = std::isfinite(l) && x(j) - l <= btol * (1.0 + std::abs(l));
    const bool at_u = std::isfinite(u) && u - x(j) <= btol * (1.0 + std::abs(u));
    double viol;
    if (at_l && at_u) viol = 0.0;
    else if (at_l) viol = std::max(0.0, -d(j));
    else if (at_u) viol = std::max(0.0, d(j));
    else viol = std::abs(d(j));
    worst = std::max(worst, viol / scale);
  }
  return worst;
}

}  // namespace cran::opt
