#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cran/allocator.hpp"
#include "cran/topology.hpp"

namespace cran {

enum class SweepParam { None, UsersPerSlice, DTotalMax, K1, RRsv };
const char* to_string(SweepParam p);

struct SweepSpec {
  std::string name = "single";
  SweepParam param = SweepParam::None;
  std::vector<double> values{0.0};
  int trials = 100;
  ScenarioConfig base;
  std::vector<ModeFlags> modes{ModeFlags{}};  // every point runs every mode
  std::uint64_t master_seed = 1;
  SolverSettings settings;

  void validate() const;
};

// Named sweeps: single, fig2, fig5, fig6, fig7. `access` / `delay` fill in
// whichever mode axis the sweep does not fix itself. Empty `values` keeps
// the sweep's own list.
SweepSpec named_sweep(const std::string& name, const ScenarioConfig& base,
                      MultipleAccess access, DelayMode delay, int trials,
                      std::uint64_t master_seed, const std::vector<double>& values = {});

ScenarioConfig apply_sweep_value(const ScenarioConfig& base, SweepParam p, double value);

// Channel seed of one trial; shared by every point and mode of a sweep.
std::uint64_t trial_seed(std::uint64_t master_seed, int trial);

struct TrialRow {
  int point = 0;
  double value = 0.0;
  int trial = 0;
  std::uint64_t seed = 0;
  ModeFlags mode;
  SolveStatus status = SolveStatus::Infeasible;
  double power_w = 0.0;
  int iterations = 0;
  double max_residual = 0.0;
  double d_rrh_ul = 0.0;  // mean over RRHs
  double d_bbu = 0.0;
  double d_user_dl = 0.0;  // mean over users
  bool trace_non_increasing = true;
};

struct SummaryRow {
  int point = 0;
  double value = 0.0;
  ModeFlags mode;
  int trials = 0;
  int converged = 0;
  int iteration_cap = 0;
  int infeasible = 0;
  double mean_power_w = 0.0;   // over converged trials
  double ci95_power_w = 0.0;   // normal approximation
  double mean_power_dbm = 0.0; // dBm of the mean in W
  double median_power_dbm = 0.0;
};

struct SweepResult {
  SweepSpec spec;
  std::vector<TrialRow> trials;  // ordered by (point, mode, trial)
  std::vector<SummaryRow> summary;
};

TrialRow run_trial(const NetworkInstance& net, int point, double value, int trial,
                   std::uint64_t seed, const ModeFlags& mode, const SolverSettings& settings);

// OpenMP over (point, mode, trial); the serial variant is the reference.
SweepResult run_sweep(const SweepSpec& spec);
SweepResult run_sweep_serial(const SweepSpec& spec);

std::vector<SummaryRow> summarize(const SweepSpec& spec, const std::vector<TrialRow>& rows);

struct PairedRow {
  std::uint64_t seed = 0;
  SolveStatus status_a = SolveStatus::Infeasible;
  SolveStatus status_b = SolveStatus::Infeasible;
  double power_a_w = 0.0;
  double power_b_w = 0.0;
  double delta_db = 0.0;  // dBm(a) - dBm(b); valid when both converged
};

struct PairedComparison {
  ModeFlags a;
  ModeFlags b;
  std::vector<PairedRow> rows;
  int converged_pairs = 0;
  double median_delta_db = 0.0;
  bool sufficient = false;  // both modes converge on >= 50% of seeds
};

PairedComparison compare_modes(const ScenarioConfig& base, const std::vector<std::uint64_t>& seeds,
                               const ModeFlags& a, const ModeFlags& b,
                               const SolverSettings& settings = {});

// CSV and manifest writers (schema comment line first).
std::string trials_csv(const SweepResult& r);
std::string summary_csv(const SweepResult& r);
std::string paired_csv(const PairedComparison& c);
std::string manifest_json(const SweepResult& r);

int cli_main(int argc, char** argv);

}  // namespace cran
