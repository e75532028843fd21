#include "cran/allocator.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>

namespace cran {

const char* to_string(MultipleAccess m) { return m == MultipleAccess::Noma ? "noma" : "ofdma"; }
const char* to_string(DelayMode m) { return m == DelayMode::Dynamic ? "dynamic" : "fixed"; }

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::IterationCap: return "iteration-cap";
    case SolveStatus::Infeasible: return "infeasible";
  }
  return "?";
}

NetworkInstance apply_mode(const NetworkInstance& net, const ModeFlags& flags) {
  NetworkInstance n = net;
  if (flags.access == MultipleAccess::Ofdma) {
    n.l1 = 1;
    n.l2 = 1;
  }
  return n;
}

std::vector<double> IterationTrace::objectives() const {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.objective);
  return out;
}

bool IterationTrace::non_increasing(double slack) const {
  for (std::size_t z = 1; z < records.size(); ++z)
    if (records[z].objective > records[z - 1].objective + slack) return false;
  return true;
}

namespace {

constexpr double kAssigned = 0.5;
constexpr double kInf = std::numeric_limits<double>::infinity();

using opt::Mat;
using opt::Vec;

struct LinearRows {
  std::vector<Vec> rows;
  std::vector<double> rhs;

  void add(Vec row, double b) {
    rows.push_back(std::move(row));
    rhs.push_back(b);
  }
  void add_block(const Mat& a, const Vec& b) {
    for (Eigen::Index r = 0; r < a.rows(); ++r) add(a.row(r).transpose(), b(r));
  }
  void to(Mat& a, Vec& b, Eigen::Index n) const {
    a = Mat::Zero(static_cast<Eigen::Index>(rows.size()), n);
    b = Vec::Zero(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      a.row(static_cast<Eigen::Index>(r)) = rows[r].transpose();
      b(static_cast<Eigen::Index>(r)) = rhs[r];
    }
  }
};

using SurrogateSet = std::shared_ptr<const std::vector<opt::DcSurrogate>>;

// g(v) = 1 - sum(lower_l) / floor.
opt::SmoothFunction floor_constraint(SurrogateSet s, std::vector<int> idx, double floor) {
  return {[s, idx = std::move(idx), floor](const Vec& v, Vec* g, Mat* h, double w) {
    double sum = 0.0;
    if (g) g->setZero(v.size());
    for (int l : idx) {
      const auto& su = (*s)[l];
      sum += su.lower(v);
      su.add_lower_derivatives(v, -1.0 / floor, g, nullptr);
      if (h) su.add_lower_derivatives(v, -w / floor, nullptr, h);
    }
    return 1.0 - sum / floor;
  }};
}

// g(v) = (sum(upper over `in`) - sum(lower over `out`)) / scale.
opt::SmoothFunction balance_constraint(SurrogateSet s, std::vector<int> in, std::vector<int> out,
                                       double scale) {
  return {[s, in = std::move(in), out = std::move(out), scale](const Vec& v, Vec* g, Mat* h,
                                                               double w) {
    double sum = 0.0;
    if (g) g->setZero(v.size());
    for (int l : in) {
      const auto& su = (*s)[l];
      sum += su.upper(v);
      su.add_upper_derivatives(v, 1.0 / scale, g, nullptr);
      if (h) su.add_upper_derivatives(v, w / scale, nullptr, h);
    }
    for (int l : out) {
      const auto& su = (*s)[l];
      sum -= su.lower(v);
      su.add_lower_derivatives(v, -1.0 / scale, g, nullptr);
      if (h) su.add_lower_derivatives(v, -w / scale, nullptr, h);
    }
    return sum / scale;
  }};
}

struct DirectionOutcome {
  bool ok = true;
  int rounds = 0;
  std::vector<double> objectives;
  std::string message;
};

DirectionOutcome solve_direction(Allocation& alloc, const ChannelRealization& ch,
                                 const NetworkInstance& net, const RateFloors& floors, Direction q,
                                 const SolverSettings& settings) {
  DirectionOutcome out;
  const DirectionModel m = build_direction_model(alloc, ch, net, q);
  const auto n = static_cast<Eigen::Index>(m.links.size());
  const bool ul = q == Direction::Uplink;
  const int qi = dir_index(q);

  // Link groups.
  std::vector<int> access, fronthaul;
  for (int l = 0; l < static_cast<int>(n); ++l) (m.links[l].fronthaul ? fronthaul : access).push_back(l);
  auto access_where = [&](auto pred) {
    std::vector<int> g;
    for (int l : access)
      if (pred(m.links[l].owner)) g.push_back(l);
    return g;
  };

  struct FloorGroup {
    std::vector<int> links;
    double floor;
    std::string what;
  };
  std::vector<FloorGroup> groups;
  if (ul) {
    for (int j = 0; j < net.num_rrh; ++j)
      groups.push_back({access_where([&](int i) { return net.users[i].rrh == j; }),
                        floors.rrh_ul[j], fmt::format("C10 j={}", j)});
    groups.push_back({fronthaul, floors.bbu_ul, "C11"});
  } else {
    for (int i = 0; i < net.num_users; ++i)
      groups.push_back({access_where([&](int u) { return u == i; }), floors.user_dl[i],
                        fmt::format("C12 i={}", i)});
  }
  for (int s = 0; s < net.num_slices; ++s)
    groups.push_back({access_where([&](int i) { return net.users[i].slice == s; }),
                      net.r_rsv[qi][s], fmt::format("C15 s={}", s)});
  double floor_sum = 0.0;
  for (const auto& g : groups) {
    if (!(g.floor > 0)) continue;
    if (g.links.empty()) {
      out.ok = false;
      out.message = fmt::format("{} {} has no assigned link", to_string(q), g.what);
      return out;
    }
    floor_sum += g.floor;
  }
  if (n == 0) return out;

  // Linear rows: power caps then SIC ordering.
  LinearRows lin;
  auto cap_row = [&](const std::vector<int>& links, double cap) {
    if (links.empty()) return;
    Vec row = Vec::Zero(n);
    for (int l : links) row(l) = m.watts_per_unit(l) / cap;
    lin.add(row, 1.0);
  };
  if (ul) {
    for (int i = 0; i < net.num_users; ++i)
      cap_row(access_where([&](int u) { return u == i; }), net.p_user_ul);
    for (int j = 0; j < net.num_rrh; ++j) {
      std::vector<int> g;
      for (int l : fronthaul)
        if (m.links[l].owner == j) g.push_back(l);
      cap_row(g, net.p_rrh_ul);
    }
  } else {
    for (int j = 0; j < net.num_rrh; ++j)
      cap_row(access_where([&](int i) { return net.users[i].rrh == j; }), net.p_rrh_dl);
    cap_row(fronthaul, net.p_bbu_dl);
  }
  {
    Mat a;
    Vec b;
    sic_rows(m, net, a, b);
    lin.add_block(a, b);
  }

  Vec w(n);
  for (Eigen::Index l = 0; l < n; ++l) w(l) = m.watts_per_unit(static_cast<std::size_t>(l));
  Vec v = m.read(alloc).cwiseMax(0.0);
  double f_prev = w.dot(v);
  bool have = false;
  // Tangent upper bounds taken far above the optimum stay large even at zero
  // power; a failed first round is retried with that side expanded lower,
  // then with every link lowered (interference tangents behave the same).
  const std::vector<int>& upper_side = ul ? access : fronthaul;
  int restarts = 0;

  for (int round = 0; round < settings.sca_rounds; ++round) {
    auto surr = std::make_shared<const std::vector<opt::DcSurrogate>>(
        opt::build_rate_surrogates(m.rates, v));
    opt::ConvexProgram prog;
    prog.dimension = static_cast<int>(n);
    const double p0 = f_prev > 0 ? f_prev : w.sum();
    const Vec c = w / p0;
    prog.objective = {[c](const Vec& x, Vec* g, Mat*, double) {
      if (g) *g = c;
      return c.dot(x);
    }};
    for (const auto& g : groups)
      if (g.floor > 0) prog.constraints.push_back(floor_constraint(surr, g.links, g.floor));
    // C13 (UL): access <= fronthaul. C14 (DL): fronthaul <= access.
    const std::vector<int>& in = ul ? access : fronthaul;
    const std::vector<int>& outl = ul ? fronthaul : access;
    if (!in.empty())
      prog.constraints.push_back(balance_constraint(surr, in, outl, std::max(1.0, floor_sum)));
    prog.lower = Vec::Zero(n);
    prog.upper = Vec::Constant(n, kInf);
    lin.to(prog.a_ineq, prog.b_ineq, n);
    prog.a_eq.resize(0, n);
    prog.b_eq.resize(0);

    const opt::ConvexResult res = opt::solve_convex(prog, v, settings.barrier);
    ++out.rounds;
    if (res.status == opt::ConvexStatus::Infeasible || !opt::strictly_feasible(prog, res.x)) {
      if (!have && restarts < 8) {
        ++restarts;
        if (restarts <= 4 && !upper_side.empty())
          for (int l : upper_side) v(l) *= 1e-3;
        else
          v *= 1e-3;
        --round;
        continue;
      }
      if (!have) {
        out.ok = false;
        out.message = fmt::format("{} power step infeasible ({})", to_string(q),
                                  opt::to_string(res.status));
        return out;
      }
      break;
    }
    const double f_new = w.dot(res.x);
    if (have && f_new > f_prev) break;
    const double rel = std::abs(f_prev - f_new) / std::max(f_prev, 1e-300);
    v = res.x;
    have = true;
    out.objectives.push_back(f_new);
    f_prev = f_new;
    if (round > 0 && rel <= settings.sca_tolerance) break;
  }
  m.write(v, alloc);
  return out;
}

bool assigned_access(const Allocation& a, Direction q, int i) {
  for (int k = 0; k < a.k1; ++k)
    if (a.tau(q, i, k) > kAssigned) return true;
  return false;
}

// Power caps under candidate powers, and at least one link for every
// positive floor.
bool structurally_feasible(const Allocation& a, const NetworkInstance& net,
                           const RateFloors& floors) {
  const Direction ul = Direction::Uplink, dl = Direction::Downlink;
  const double slack = 1.0 + 1e-9;
  for (Direction q : kDirections) {
    for (int i = 0; i < net.num_users; ++i) {
      double s = 0.0;
      for (int k = 0; k < net.k1; ++k) s += a.tau(q, i, k) * a.p_access(q, i, k);
      if (q == ul && s > net.p_user_ul * slack) return false;
    }
    for (int j = 0; j < net.num_rrh; ++j) {
      if (q == dl) {
        double s = 0.0;
        for (int i : net.users_of_rrh(j))
          for (int k = 0; k < net.k1; ++k) s += a.tau(q, i, k) * a.p_access(q, i, k);
        if (s > net.p_rrh_dl * slack) return false;
      } else {
        double s = 0.0;
        for (int k = 0; k < net.k2; ++k) s += a.x(q, j, k) * a.p_fronthaul(q, j, k);
        if (s > net.p_rrh_ul * slack) return false;
      }
    }
    if (q == dl) {
      double s = 0.0;
      for (int j = 0; j < net.num_rrh; ++j)
        for (int k = 0; k < net.k2; ++k) s += a.x(q, j, k) * a.p_fronthaul(q, j, k);
      if (s > net.p_bbu_dl * slack) return false;
    }
    for (int s = 0; s < net.num_slices; ++s) {
      if (!(net.r_rsv[dir_index(q)][s] > 0)) continue;
      bool any = false;
      for (int i = 0; i < net.num_users; ++i)
        any = any || (net.users[i].slice == s && assigned_access(a, q, i));
      if (!any) return false;
    }
  }
  for (int j = 0; j < net.num_rrh; ++j) {
    if (!(floors.rrh_ul[j] > 0)) continue;
    bool any = false;
    for (int i : net.users_of_rrh(j)) any = any || assigned_access(a, ul, i);
    if (!any) return false;
  }
  if (floors.bbu_ul > 0) {
    bool any = false;
    for (int j = 0; j < net.num_rrh; ++j)
      for (int k = 0; k < net.k2; ++k) any = any || a.x(ul, j, k) > kAssigned;
    if (!any) return false;
  }
  for (int i = 0; i < net.num_users; ++i)
    if (floors.user_dl[i] > 0 && !assigned_access(a, dl, i)) return false;
  return true;
}

// One rounding group: an access subcarrier of one RRH or a fronthaul
// subcarrier, in one direction.
struct Group {
  Direction q;
  bool fronthaul;
  int rrh;  // access groups only
  int k;
};

bool same_group_assignment(const Allocation& a, const Allocation& b, const NetworkInstance& net,
                           const Group& g) {
  if (g.fronthaul) {
    for (int j = 0; j < net.num_rrh; ++j)
      if (a.x(g.q, j, g.k) != b.x(g.q, j, g.k)) return false;
    return true;
  }
  for (int i : net.users_of_rrh(g.rrh))
    if (a.tau(g.q, i, g.k) != b.tau(g.q, i, g.k)) return false;
  return true;
}

void copy_group(Allocation& dst, const Allocation& src, const NetworkInstance& net,
                const Group& g) {
  if (g.fronthaul) {
    for (int j = 0; j < net.num_rrh; ++j) {
      dst.x(g.q, j, g.k) = src.x(g.q, j, g.k);
      dst.p_fronthaul(g.q, j, g.k) = src.p_fronthaul(g.q, j, g.k);
    }
    return;
  }
  for (int i : net.users_of_rrh(g.rrh)) {
    dst.tau(g.q, i, g.k) = src.tau(g.q, i, g.k);
    dst.p_access(g.q, i, g.k) = src.p_access(g.q, i, g.k);
  }
}

double relative_change(const std::vector<double>& now, const std::vector<double>& before) {
  double num = 0.0, den = 0.0;
  for (std::size_t l = 0; l < now.size(); ++l) {
    num += (now[l] - before[l]) * (now[l] - before[l]);
    den += before[l] * before[l];
  }
  return den > 0 ? std::sqrt(num / den) : std::sqrt(num);
}

double delay_change(const DelayBudget& a, const DelayBudget& b) {
  double worst = std::abs(a.bbu - b.bbu) / b.bbu;
  for (std::size_t j = 0; j < a.rrh_ul.size(); ++j)
    worst = std::max(worst, std::abs(a.rrh_ul[j] - b.rrh_ul[j]) / b.rrh_ul[j]);
  for (std::size_t i = 0; i < a.user_dl.size(); ++i)
    worst = std::max(worst, std::abs(a.user_dl[i] - b.user_dl[i]) / b.user_dl[i]);
  return worst;
}

}  // namespace

PowerStepResult power_step(Allocation& alloc, const ChannelRealization& ch,
                           const NetworkInstance& net, const RateFloors& floors,
                           const SolverSettings& settings, bool include_delay_chain) {
  PowerStepResult res;
  res.feasible = true;
  std::vector<double> per_dir;
  for (Direction q : kDirections) {
    DirectionOutcome d = solve_direction(alloc, ch, net, floors, q, settings);
    res.sca_rounds += d.rounds;
    if (!d.ok) {
      res.feasible = false;
      res.message += d.message + "; ";
    }
    per_dir.push_back(d.objectives.empty() ? direction_power(alloc, q) : d.objectives.back());
  }
  refresh_candidate_powers(alloc, net);
  if (res.feasible) {
    const ResidualReport rep = check_constraints(alloc, ch, net, floors, include_delay_chain);
    if (!rep.feasible) {
      res.feasible = false;
      res.message += fmt::format("true-rate check failed (max normalized residual {:.3e})",
                                 rep.max_normalized);
    }
  }
  res.surrogate_objective.push_back(per_dir[0] + per_dir[1]);
  return res;
}

SubcarrierStepResult subcarrier_step(Allocation& alloc, const ChannelRealization& ch,
                                     const NetworkInstance& net, const RateFloors& floors,
                                     const SolverSettings& settings) {
  SubcarrierStepResult res;
  res.solved = true;
  Allocation next = alloc;

  for (Direction q : kDirections) {
    const bool ul = q == Direction::Uplink;
    const int qi = dir_index(q);
    const int na = net.num_users * net.k1;
    const int nf = net.num_rrh * net.k2;
    const int n = na + nf;
    auto ai = [&](int i, int k) { return i * net.k1 + k; };
    auto fi = [&](int j, int k) { return na + j * net.k2 + k; };

    // Frozen-interference rates and candidate powers.
    Vec rate(n), power(n);
    for (int i = 0; i < net.num_users; ++i)
      for (int k = 0; k < net.k1; ++k) {
        const double h = ch.access_gain(q, i, net.users[i].rrh, k);
        const double p = alloc.p_access(q, i, k);
        power(ai(i, k)) = p;
        rate(ai(i, k)) =
            link_rate(p * h / access_denominator(alloc, ch, net, q, i, k), net.w_s);
      }
    for (int j = 0; j < net.num_rrh; ++j)
      for (int k = 0; k < net.k2; ++k) {
        const double h = ch.fronthaul_gain(q, j, k);
        const double p = alloc.p_fronthaul(q, j, k);
        power(fi(j, k)) = p;
        rate(fi(j, k)) = link_rate(p * h / fronthaul_denominator(alloc, ch, q, j, k), net.w_s);
      }

    opt::LinearProgram lp = opt::LinearProgram::with_dimension(n);
    const double pmax = power.maxCoeff();
    lp.c = pmax > 0 ? Vec(power / pmax) : Vec(Vec::Zero(n));
    lp.upper = Vec::Ones(n);
    LinearRows rows;
    for (int j = 0; j < net.num_rrh; ++j)
      for (int k = 0; k < net.k1; ++k) {
        Vec r = Vec::Zero(n);
        for (int i : net.users_of_rrh(j)) r(ai(i, k)) = 1.0;
        rows.add(r, net.l1);
      }
    for (int k = 0; k < net.k2; ++k) {
      Vec r = Vec::Zero(n);
      for (int j = 0; j < net.num_rrh; ++j) r(fi(j, k)) = 1.0;
      rows.add(r, net.l2);
    }
    auto cap = [&](const std::vector<int>& vars, double cap_w) {
      Vec r = Vec::Zero(n);
      for (int v : vars) r(v) = power(v) / cap_w;
      rows.add(r, 1.0);
    };
    auto floor_row = [&](const std::vector<int>& vars, double f) {
      if (!(f > 0)) return;
      Vec r = Vec::Zero(n);
      for (int v : vars) r(v) = -rate(v) / f;
      rows.add(r, -1.0);
    };
    auto access_vars = [&](auto pred) {
      std::vector<int> out;
      for (int i = 0; i < net.num_users; ++i)
        if (pred(i))
          for (int k = 0; k < net.k1; ++k) out.push_back(ai(i, k));
      return out;
    };
    auto fronthaul_vars = [&](auto pred) {
      std::vector<int> out;
      for (int j = 0; j < net.num_rrh; ++j)
        if (pred(j))
          for (int k = 0; k < net.k2; ++k) out.push_back(fi(j, k));
      return out;
    };
    const auto all_access = access_vars([](int) { return true; });
    const auto all_fronthaul = fronthaul_vars([](int) { return true; });
    if (ul) {
      for (int i = 0; i < net.num_users; ++i)
        cap(access_vars([&](int u) { return u == i; }), net.p_user_ul);
      for (int j = 0; j < net.num_rrh; ++j)
        cap(fronthaul_vars([&](int f) { return f == j; }), net.p_rrh_ul);
      for (int j = 0; j < net.num_rrh; ++j)
        floor_row(access_vars([&](int i) { return net.users[i].rrh == j; }), floors.rrh_ul[j]);
      floor_row(all_fronthaul, floors.bbu_ul);
    } else {
      for (int j = 0; j < net.num_rrh; ++j)
        cap(access_vars([&](int i) { return net.users[i].rrh == j; }), net.p_rrh_dl);
      cap(all_fronthaul, net.p_bbu_dl);
      for (int i = 0; i < net.num_users; ++i)
        floor_row(access_vars([&](int u) { return u == i; }), floors.user_dl[i]);
    }
    for (int s = 0; s < net.num_slices; ++s)
      floor_row(access_vars([&](int i) { return net.users[i].slice == s; }), net.r_rsv[qi][s]);
    {
      // C13 / C14 with the frozen rates.
      Vec r = Vec::Zero(n);
      double scale = 0.0;
      for (int v : all_access) scale = std::max(scale, rate(v));
      for (int v : all_fronthaul) scale = std::max(scale, rate(v));
      if (scale > 0) {
        const double sign = ul ? 1.0 : -1.0;
        for (int v : all_access) r(v) = sign * rate(v) / scale;
        for (int v : all_fronthaul) r(v) = -sign * rate(v) / scale;
        rows.add(r, 0.0);
      }
    }
    rows.to(lp.a_ineq, lp.b_ineq, n);

    const opt::LpResult sol = opt::solve_lp(lp, settings.lp);
    if (sol.status != opt::LpStatus::Optimal) {
      res.solved = false;
      res.message += fmt::format("{} relaxed LP {}; ", to_string(q), opt::to_string(sol.status));
      continue;
    }
    for (int j = 0; j < net.num_rrh; ++j) {
      const auto members = net.users_of_rrh(j);
      for (int k = 0; k < net.k1; ++k) {
        std::vector<double> w;
        for (int i : members) w.push_back(sol.x(ai(i, k)));
        const auto b = round_assignments(w, net.l1);
        for (std::size_t m = 0; m < members.size(); ++m) next.tau(q, members[m], k) = b[m];
      }
    }
    for (int k = 0; k < net.k2; ++k) {
      std::vector<double> w;
      for (int j = 0; j < net.num_rrh; ++j) w.push_back(sol.x(fi(j, k)));
      const auto b = round_assignments(w, net.l2);
      for (int j = 0; j < net.num_rrh; ++j) next.x(q, j, k) = b[j];
    }
  }

  // Revert changed groups one at a time until the rounded assignment is
  // structurally usable.
  std::vector<Group> changed;
  for (Direction q : kDirections) {
    for (int j = 0; j < net.num_rrh; ++j)
      for (int k = 0; k < net.k1; ++k) {
        const Group g{q, false, j, k};
        if (!same_group_assignment(next, alloc, net, g)) changed.push_back(g);
      }
    for (int k = 0; k < net.k2; ++k) {
      const Group g{q, true, 0, k};
      if (!same_group_assignment(next, alloc, net, g)) changed.push_back(g);
    }
  }
  std::size_t g = 0;
  while (!structurally_feasible(next, net, floors) && g < changed.size()) {
    copy_group(next, alloc, net, changed[g++]);
    ++res.reverted_groups;
  }
  res.changed = g < changed.size();
  alloc = std::move(next);
  return res;
}

void delay_step(Allocation& alloc, const ChannelRealization& ch, const NetworkInstance& net) {
  const RateReport rates = aggregate_rates(alloc, ch, net);
  alloc.delay = adjust_delays(segment_rates(rates, net), net.qos, net.d_total_max);
}

SolveOutcome run(const NetworkInstance& net_in, const ChannelRealization& ch,
                 const ModeFlags& flags, const SolverSettings& settings) {
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  const NetworkInstance net = apply_mode(net_in, flags);
  const bool want_dynamic = flags.delay == DelayMode::Dynamic;
  SolveOutcome out;
  Allocation alloc = initialize(net, ch);
  auto floors_of = [&](const Allocation& a) { return floors_from_budget(a.delay, net.qos); };
  auto elapsed = [&] { return std::chrono::duration<double>(clock::now() - t0).count(); };

  // Step 1: powers for the initial assignment.
  PowerStepResult ps = power_step(alloc, ch, net, floors_of(alloc), settings, want_dynamic);
  IterationRecord r0;
  r0.z = 0;
  r0.power_feasible = ps.feasible;
  r0.objective = total_power(alloc);
  r0.wall_seconds = elapsed();
  out.trace.records.push_back(r0);
  if (!ps.feasible) {
    out.alloc = alloc;
    out.status = SolveStatus::Infeasible;
    out.message = "initial power step: " + ps.message;
    out.residuals = check_constraints(alloc, ch, net, floors_of(alloc), want_dynamic);
    out.objective = total_power(alloc);
    return out;
  }

  bool dynamic_active = false;
  bool floors_dirty = false;
  bool converged = false;
  int z = 1;
  for (; z <= settings.z_th; ++z) {
    IterationRecord rec;
    rec.z = z;
    const Allocation prev = alloc;
    const double f0 = total_power(prev);
    const RateFloors floors = floors_of(prev);

    // Step 2 + 3 with the accept-if-improved guard.
    Allocation cand = prev;
    const SubcarrierStepResult sc = subcarrier_step(cand, ch, net, floors, settings);
    rec.subcarrier_solved = sc.solved;
    rec.subcarrier_changed = sc.changed;
    bool accepted = false;
    if (sc.changed) {
      const PowerStepResult p = power_step(cand, ch, net, floors, settings, want_dynamic);
      if (p.feasible && total_power(cand) <= f0) {
        alloc = std::move(cand);
        accepted = true;
        rec.power_feasible = true;
      }
    }
    if (!accepted) {
      alloc = prev;
      rec.power_feasible = true;
      if (floors_dirty) {
        Allocation again = prev;
        const PowerStepResult p = power_step(again, ch, net, floors, settings, want_dynamic);
        if (p.feasible && total_power(again) <= f0) alloc = std::move(again);
        rec.power_feasible = p.feasible;
      }
    }
    rec.subcarrier_accepted = accepted;
    floors_dirty = false;

    // Step 4.
    if (dynamic_active) {
      const DelayBudget before = alloc.delay;
      try {
        delay_step(alloc, ch, net);
        rec.delay_adjusted = true;
        rec.delay_change = delay_change(alloc.delay, before);
        floors_dirty = rec.delay_change > 0;
      } catch (const std::exception&) {
        alloc.delay = before;
      }
    }

    rec.power_change = relative_change(alloc.effective_powers(), prev.effective_powers());
    rec.objective = total_power(alloc);
    rec.wall_seconds = elapsed();
    out.trace.records.push_back(rec);

    if (rec.power_change <= settings.epsilon_th && rec.delay_change <= settings.epsilon_th) {
      if (want_dynamic && !dynamic_active) {
        // Warm start done: continue from the fixed-split optimum.
        dynamic_active = true;
        const DelayBudget before = alloc.delay;
        try {
          delay_step(alloc, ch, net);
          floors_dirty = delay_change(alloc.delay, before) > 0;
        } catch (const std::exception&) {
          alloc.delay = before;
        }
        continue;
      }
      converged = true;
      break;
    }
  }

  out.alloc = alloc;
  out.iterations = std::min(z, settings.z_th);
  out.objective = total_power(alloc);
  out.residuals = check_constraints(alloc, ch, net, floors_of(alloc), want_dynamic);
  if (!out.residuals.feasible) {
    out.status = SolveStatus::Infeasible;
    out.message = fmt::format("final check failed (max normalized residual {:.3e})",
                              out.residuals.max_normalized);
  } else {
    out.status = converged ? SolveStatus::Converged : SolveStatus::IterationCap;
  }
  return out;
}

}  // namespace cran
