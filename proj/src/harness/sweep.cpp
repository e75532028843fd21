#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "cran/harness.hpp"

namespace cran {

const char* to_string(SweepParam p) {
  switch (p) {
    case SweepParam::None: return "none";
    case SweepParam::UsersPerSlice: return "users_per_slice";
    case SweepParam::DTotalMax: return "d_total_max_s";
    case SweepParam::K1: return "k1";
    case SweepParam::RRsv: return "r_rsv_bps";
  }
  return "?";
}

void SweepSpec::validate() const {
  if (values.empty()) throw ValidationError("sweep needs at least one value");
  if (trials < 1) throw ValidationError("trials must be >= 1");
  if (modes.empty()) throw ValidationError("sweep needs at least one mode");
  for (double v : values) build_network(apply_sweep_value(base, param, v));
}

ScenarioConfig apply_sweep_value(const ScenarioConfig& base, SweepParam p, double value) {
  ScenarioConfig c = base;
  auto as_count = [](double v) {
    const double r = std::round(v);
    if (std::abs(v - r) > 1e-9) throw ValidationError("sweep value must be an integer count");
    return static_cast<int>(r);
  };
  switch (p) {
    case SweepParam::None: break;
    case SweepParam::UsersPerSlice: c.users_per_slice_per_rrh = as_count(value); break;
    case SweepParam::DTotalMax: c.d_total_max_s = value; break;
    case SweepParam::K1: c.k1 = as_count(value); break;
    case SweepParam::RRsv:
      c.r_rsv_ul_bps = value;
      c.r_rsv_dl_bps = value;
      break;
  }
  return c;
}

SweepSpec named_sweep(const std::string& name, const ScenarioConfig& base, MultipleAccess access,
                      DelayMode delay, int trials, std::uint64_t master_seed,
                      const std::vector<double>& values) {
  SweepSpec s;
  s.name = name;
  s.base = base;
  s.trials = trials;
  s.master_seed = master_seed;
  s.modes = {ModeFlags{access, delay}};
  if (name == "single") {
    s.param = SweepParam::None;
    s.values = {0.0};
  } else if (name == "fig2") {
    s.param = SweepParam::UsersPerSlice;
    s.values = {1, 2, 3};
    s.modes = {ModeFlags{MultipleAccess::Noma, delay}, ModeFlags{MultipleAccess::Ofdma, delay}};
  } else if (name == "fig5") {
    s.param = SweepParam::DTotalMax;
    s.values = {0.5e-3, 1e-3, 2e-3, 4e-3};
  } else if (name == "fig6") {
    s.param = SweepParam::DTotalMax;
    s.values = {0.5e-3, 1e-3, 2e-3, 4e-3};
    s.modes = {ModeFlags{access, DelayMode::Dynamic}, ModeFlags{access, DelayMode::Fixed}};
  } else if (name == "fig7") {
    s.param = SweepParam::K1;
    s.values = {4, 6, 8};
  } else {
    throw ValidationError("unknown sweep '" + name + "' (single, fig2, fig5, fig6, fig7)");
  }
  if (!values.empty() && s.param != SweepParam::None) s.values = values;
  s.validate();
  return s;
}

std::uint64_t trial_seed(std::uint64_t master_seed, int trial) {
  return mix_seed(master_seed, static_cast<std::uint64_t>(trial));
}

TrialRow run_trial(const NetworkInstance& net, int point, double value, int trial,
                   std::uint64_t seed, const ModeFlags& mode, const SolverSettings& settings) {
  TrialRow row;
  row.point = point;
  row.value = value;
  row.trial = trial;
  row.seed = seed;
  row.mode = mode;
  const ChannelRealization ch = sample_channels(net, seed);
  const SolveOutcome out = run(net, ch, mode, settings);
  row.status = out.status;
  row.power_w = out.objective;
  row.iterations = out.iterations;
  row.max_residual = out.residuals.max_normalized;
  const DelayBudget& d = out.alloc.delay;
  row.d_rrh_ul = std::accumulate(d.rrh_ul.begin(), d.rrh_ul.end(), 0.0) / d.rrh_ul.size();
  row.d_bbu = d.bbu;
  row.d_user_dl = std::accumulate(d.user_dl.begin(), d.user_dl.end(), 0.0) / d.user_dl.size();
  row.trace_non_increasing = out.trace.non_increasing(1e-6);
  return row;
}

namespace {

struct Job {
  int point;
  int mode;
  int trial;
};

std::vector<Job> jobs_of(const SweepSpec& s) {
  std::vector<Job> jobs;
  for (int p = 0; p < static_cast<int>(s.values.size()); ++p)
    for (int m = 0; m < static_cast<int>(s.modes.size()); ++m)
      for (int t = 0; t < s.trials; ++t) jobs.push_back({p, m, t});
  return jobs;
}

std::vector<NetworkInstance> networks_of(const SweepSpec& s) {
  std::vector<NetworkInstance> nets;
  for (double v : s.values) nets.push_back(build_network(apply_sweep_value(s.base, s.param, v)));
  return nets;
}

SweepResult finish(const SweepSpec& spec, std::vector<TrialRow> rows) {
  SweepResult r;
  r.spec = spec;
  r.trials = std::move(rows);
  r.summary = summarize(spec, r.trials);
  return r;
}

}  // namespace

SweepResult run_sweep(const SweepSpec& spec) {
  spec.validate();
  const auto jobs = jobs_of(spec);
  const auto nets = networks_of(spec);
  std::vector<TrialRow> rows(jobs.size());
  const long n = static_cast<long>(jobs.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (long idx = 0; idx < n; ++idx) {
    const Job& j = jobs[idx];
    rows[idx] = run_trial(nets[j.point], j.point, spec.values[j.point], j.trial,
                          trial_seed(spec.master_seed, j.trial), spec.modes[j.mode],
                          spec.settings);
  }
  return finish(spec, std::move(rows));
}

SweepResult run_sweep_serial(const SweepSpec& spec) {
  spec.validate();
  const auto jobs = jobs_of(spec);
  const auto nets = networks_of(spec);
  std::vector<TrialRow> rows;
  rows.reserve(jobs.size());
  for (const Job& j : jobs)
    rows.push_back(run_trial(nets[j.point], j.point, spec.values[j.point], j.trial,
                             trial_seed(spec.master_seed, j.trial), spec.modes[j.mode],
                             spec.settings));
  return finish(spec, std::move(rows));
}

namespace {

double median(std::vector<double> v) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

std::vector<SummaryRow> summarize(const SweepSpec& spec, const std::vector<TrialRow>& rows) {
  std::vector<SummaryRow> out;
  for (int p = 0; p < static_cast<int>(spec.values.size()); ++p) {
    for (int m = 0; m < static_cast<int>(spec.modes.size()); ++m) {
      SummaryRow s;
      s.point = p;
      s.value = spec.values[p];
      s.mode = spec.modes[m];
      std::vector<double> watts, dbm;
      for (const auto& r : rows) {
        if (r.point != p || r.mode.access != s.mode.access || r.mode.delay != s.mode.delay)
          continue;
        ++s.trials;
        if (r.status == SolveStatus::Converged) {
          ++s.converged;
          watts.push_back(r.power_w);
          dbm.push_back(r.power_w > 0 ? watt_to_dbm(r.power_w) : -INFINITY);
        } else if (r.status == SolveStatus::IterationCap) {
          ++s.iteration_cap;
        } else {
          ++s.infeasible;
        }
      }
      if (!watts.empty()) {
        const double n = static_cast<double>(watts.size());
        const double mean = std::accumulate(watts.begin(), watts.end(), 0.0) / n;
        double var = 0.0;
        for (double w : watts) var += (w - mean) * (w - mean);
        var = watts.size() > 1 ? var / (n - 1.0) : 0.0;
        s.mean_power_w = mean;
        s.ci95_power_w = 1.96 * std::sqrt(var / n);
        s.mean_power_dbm = mean > 0 ? watt_to_dbm(mean) : std::nan("");
        s.median_power_dbm = median(dbm);
      } else {
        s.mean_power_w = s.ci95_power_w = s.mean_power_dbm = s.median_power_dbm = std::nan("");
      }
      out.push_back(s);
    }
  }
  return out;
}

PairedComparison compare_modes(const ScenarioConfig& base, const std::vector<std::uint64_t>& seeds,
                               const ModeFlags& a, const ModeFlags& b,
                               const SolverSettings& settings) {
  PairedComparison c;
  c.a = a;
  c.b = b;
  const NetworkInstance net = build_network(base);
  c.rows.resize(seeds.size());
  const long n = static_cast<long>(seeds.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (long i = 0; i < n; ++i) {
    const TrialRow ra = run_trial(net, 0, 0.0, static_cast<int>(i), seeds[i], a, settings);
    const TrialRow rb = run_trial(net, 0, 0.0, static_cast<int>(i), seeds[i], b, settings);
    PairedRow& row = c.rows[i];
    row.seed = seeds[i];
    row.status_a = ra.status;
    row.status_b = rb.status;
    row.power_a_w = ra.power_w;
    row.power_b_w = rb.power_w;
    row.delta_db = (ra.power_w > 0 && rb.power_w > 0)
                       ? 10.0 * std::log10(ra.power_w / rb.power_w)
                       : std::nan("");
  }
  std::vector<double> deltas;
  int conv_a = 0, conv_b = 0;
  for (const auto& r : c.rows) {
    conv_a += r.status_a == SolveStatus::Converged;
    conv_b += r.status_b == SolveStatus::Converged;
    if (r.status_a == SolveStatus::Converged && r.status_b == SolveStatus::Converged)
      deltas.push_back(r.delta_db);
  }
  c.converged_pairs = static_cast<int>(deltas.size());
  c.median_delta_db = median(deltas);
  c.sufficient = 2 * conv_a >= n && 2 * conv_b >= n && !deltas.empty();
  return c;
}

}  // namespace cran
