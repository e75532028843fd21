#pragma once

#include <span>
#include <string>
#include <vector>

#include "cran/convex.hpp"
#include "cran/delay_model.hpp"
#include "cran/noma_phy.hpp"
#include "cran/topology.hpp"

namespace cran {

enum class MultipleAccess { Noma, Ofdma };
enum class DelayMode { Dynamic, Fixed };
const char* to_string(MultipleAccess m);
const char* to_string(DelayMode m);

struct ModeFlags {
  MultipleAccess access = MultipleAccess::Noma;
  DelayMode delay = DelayMode::Dynamic;
};

// OFDMA forces L1 = L2 = 1.
NetworkInstance apply_mode(const NetworkInstance& net, const ModeFlags& flags);

struct SolverSettings {
  double epsilon_th = 1e-4;  // relative ||P(z) - P(z-1)|| / ||P(z-1)||
  int z_th = 100;
  double sca_tolerance = 1e-6;
  int sca_rounds = 30;
  opt::BarrierSettings barrier{};
  opt::LpSettings lp{};
};

// ---------------------------------------------------------------------------
// Power-step model for one direction. Variables are the assigned links only,
// v_l = p_l h_l / (sigma * y_scale).

struct LinkVar {
  bool fronthaul = false;
  int owner = 0;  // user for access links, RRH for fronthaul links
  int k = 0;
  double gain = 0.0;
};

struct DirectionModel {
  Direction q = Direction::Uplink;
  double sigma = 0.0;
  double y_scale = 1.0;
  std::vector<LinkVar> links;
  std::vector<opt::DcRate> rates;  // bits/s, one per link

  double watts_per_unit(std::size_t l) const { return sigma * y_scale / links[l].gain; }
  opt::Vec read(const Allocation& alloc) const;
  void write(const opt::Vec& v, Allocation& alloc) const;
  int find(bool fronthaul, int owner, int k) const;
};

DirectionModel build_direction_model(const Allocation& alloc, const ChannelRealization& ch,
                                     const NetworkInstance& net, Direction q);

// Linear SIC rows (C4/C8) in model variables: A v <= b.
void sic_rows(const DirectionModel& model, const NetworkInstance& net, opt::Mat& a,
              opt::Vec& b);

// ---------------------------------------------------------------------------
// Algorithm steps

Allocation initialize(const NetworkInstance& net, const ChannelRealization& ch);

// Unassigned links take the mean power of their owner's assigned links.
void refresh_candidate_powers(Allocation& alloc, const NetworkInstance& net);

// Keep the `cap` largest weights above 0.5/cap; ties by lower index.
std::vector<double> round_assignments(std::span<const double> fractional, int cap);

struct SubcarrierStepResult {
  bool solved = false;
  bool changed = false;
  int reverted_groups = 0;
  std::string message;
};

SubcarrierStepResult subcarrier_step(Allocation& alloc, const ChannelRealization& ch,
                                     const NetworkInstance& net, const RateFloors& floors,
                                     const SolverSettings& settings = {});

struct PowerStepResult {
  bool feasible = false;
  int sca_rounds = 0;
  std::vector<double> surrogate_objective;  // W, per accepted SCA round
  std::string message;
};

PowerStepResult power_step(Allocation& alloc, const ChannelRealization& ch,
                           const NetworkInstance& net, const RateFloors& floors,
                           const SolverSettings& settings = {},
                           bool include_delay_chain = true);

// Rescales alloc.delay from the current rates. Throws DelayInfeasibleError or
// SegmentStarvedError.
void delay_step(Allocation& alloc, const ChannelRealization& ch, const NetworkInstance& net);

enum class SolveStatus { Converged, IterationCap, Infeasible };
const char* to_string(SolveStatus s);

struct IterationRecord {
  int z = 0;
  double objective = 0.0;  // W, after the iteration
  bool subcarrier_solved = false;
  bool subcarrier_changed = false;
  bool subcarrier_accepted = false;
  bool power_feasible = false;
  bool delay_adjusted = false;
  double power_change = 0.0;
  double delay_change = 0.0;
  double wall_seconds = 0.0;
};

struct IterationTrace {
  std::vector<IterationRecord> records;

  std::vector<double> objectives() const;
  bool non_increasing(double slack) const;
};

struct SolveOutcome {
  Allocation alloc;
  SolveStatus status = SolveStatus::Infeasible;
  IterationTrace trace;
  ResidualReport residuals;
  double objective = 0.0;
  int iterations = 0;
  std::string message;
};

SolveOutcome run(const NetworkInstance& net, const ChannelRealization& ch,
                 const ModeFlags& flags, const SolverSettings& settings = {});

}  // namespace cran
