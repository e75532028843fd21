#pragma once

#include <Eigen/Dense>

#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace cran::opt {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// ---------------------------------------------------------------------------
// Linear programming

//   min c'x  s.t.  A_ineq x <= b_ineq,  A_eq x = b_eq,  lower <= x <= upper
// Bounds may be +-infinity. Empty matrices mean "no rows".
struct LinearProgram {
  Vec c;
  Mat a_ineq;
  Vec b_ineq;
  Mat a_eq;
  Vec b_eq;
  Vec lower;
  Vec upper;

  static LinearProgram with_dimension(int n);  // x >= 0, no rows
  int dimension() const { return static_cast<int>(c.size()); }
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };
const char* to_string(LpStatus s);

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  Vec x;
  double objective = 0.0;
  Vec dual_ineq;  // u >= 0 with c + A'u + E'v - z = 0
  Vec dual_eq;    // v
  int iterations = 0;
};

struct LpSettings {
  int max_iterations = 500;
  double tolerance = 1e-9;
};

// Dense two-phase primal simplex with Bland's rule fallback against cycling.
LpResult solve_lp(const LinearProgram& lp, const LpSettings& settings = {});

// max of primal infeasibility, dual infeasibility and complementarity.
double lp_kkt_residual(const LinearProgram& lp, const LpResult& r);

// ---------------------------------------------------------------------------
// Smooth convex programming

// Returns f(x). If grad is non-null it is overwritten with the gradient; if
// hess is non-null, weight * Hessian is added to it.
struct SmoothFunction {
  std::function<double(const Vec& x, Vec* grad, Mat* hess, double weight)> eval;

  double value(const Vec& x) const { return eval(x, nullptr, nullptr, 0.0); }
};

//   min f(x)  s.t.  g_i(x) <= 0,  A x <= b,  E x = d,  lower <= x <= upper
struct ConvexProgram {
  int dimension = 0;
  SmoothFunction objective;
  std::vector<SmoothFunction> constraints;
  Vec lower;
  Vec upper;
  Mat a_ineq;
  Vec b_ineq;
  Mat a_eq;
  Vec b_eq;

  void validate() const;
};

struct BarrierSettings {
  double mu_initial = 1.0;
  double mu_factor = 10.0;
  double gap_tolerance = 1e-9;  // relative to max(1, |f|)
  int max_outer = 200;
  int max_newton = 100;
  double newton_tolerance = 1e-12;  // half squared Newton decrement
};

enum class ConvexStatus { Optimal, Infeasible, IterationLimit, NumericalError };
const char* to_string(ConvexStatus s);

struct ConvexResult {
  ConvexStatus status = ConvexStatus::NumericalError;
  Vec x;
  double objective = 0.0;
  double kkt_residual = 0.0;
  double gap = 0.0;
  int outer_iterations = 0;
  int newton_iterations = 0;
  bool used_phase_one = false;
  Vec multipliers;  // one per smooth constraint
};

// Log-barrier interior-point method with backtracking line search. A
// phase-one problem is solved first when x_init is not strictly feasible.
// Equality constraints require x_init to be reachable by projection.
ConvexResult solve_convex(const ConvexProgram& prog, const Vec& x_init,
                          const BarrierSettings& settings = {});

// True when x is strictly inside every inequality and the box.
bool strictly_feasible(const ConvexProgram& prog, const Vec& x);

// ---------------------------------------------------------------------------
// DC rate surrogates

struct AffineForm {
  double constant = 0.0;
  std::vector<std::pair<int, double>> terms;

  double eval(const Vec& x) const;
};

// rate(x) = scale * (log2(total(x)) - log2(interference(x))), both arguments
// affine and positive on the domain, so each term is concave.
struct DcRate {
  double scale = 1.0;
  AffineForm total;
  AffineForm interference;

  double value(const Vec& x) const;
};

// Tangent-plane surrogates of a DcRate around x0:
//   lower(x) = scale*log2(total(x)) - tangent of the interference term  <= rate
//   upper(x) = tangent of the total term - scale*log2(interference(x))  >= rate
// Both coincide with the rate at x0.
struct DcSurrogate {
  DcRate rate;
  double total0 = 0.0;
  double interference0 = 0.0;
  std::vector<std::pair<int, double>> x0_terms;  // x0 on the referenced vars

  double lower(const Vec& x) const;
  double upper(const Vec& x) const;
  // Accumulate weight * gradient / weight * Hessian.
  void add_lower_derivatives(const Vec& x, double weight, Vec* grad, Mat* hess) const;
  void add_upper_derivatives(const Vec& x, double weight, Vec* grad, Mat* hess) const;
};

DcSurrogate build_rate_surrogate(const DcRate& rate, const Vec& x0);
std::vector<DcSurrogate> build_rate_surrogates(std::span<const DcRate> rates, const Vec& x0);

}  // namespace cran::opt
