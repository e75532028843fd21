#include <fmt/format.h>

#include <cmath>
#include <json.hpp>

#include "cran/harness.hpp"

namespace cran {

namespace {

std::string dbm_or_nan(double w) {
  return w > 0 ? fmt::format("{:.9e}", watt_to_dbm(w)) : std::string("nan");
}

nlohmann::ordered_json scenario_json(const ScenarioConfig& c) {
  nlohmann::ordered_json j;
  j["num_rrh"] = c.num_rrh;
  j["num_slices"] = c.num_slices;
  j["users_per_slice_per_rrh"] = c.users_per_slice_per_rrh;
  j["k1"] = c.k1;
  j["k2"] = c.k2;
  j["subcarrier_bw_hz"] = c.subcarrier_bw_hz;
  j["access_bw_hz"] = c.access_bw_hz;
  j["fronthaul_bw_hz"] = c.fronthaul_bw_hz;
  j["p_rrh_dl_dbm"] = c.p_rrh_dl_dbm;
  j["p_rrh_ul_dbm"] = c.p_rrh_ul_dbm;
  j["p_bbu_dl_dbm"] = c.p_bbu_dl_dbm;
  j["p_user_ul_dbm"] = c.p_user_ul_dbm;
  j["l1"] = c.l1;
  j["l2"] = c.l2;
  j["alpha"] = c.alpha;
  j["beta"] = c.beta;
  j["noise_psd_dbm_hz"] = c.noise_psd_dbm_hz;
  j["area_km2"] = c.area_km2;
  j["rrh_bbu_distance_m"] = c.rrh_bbu_distance_m;
  j["min_user_distance_m"] = c.min_user_distance_m;
  j["r_rsv_ul_bps"] = c.r_rsv_ul_bps;
  j["r_rsv_dl_bps"] = c.r_rsv_dl_bps;
  j["d_total_max_s"] = c.d_total_max_s;
  j["theta"] = c.theta;
  j["delta"] = c.delta;
  j["eta"] = c.eta;
  auto pairs = nlohmann::ordered_json::array();
  for (auto [a, b] : c.pairs) pairs.push_back({a, b});
  j["pairs"] = pairs;
  j["auto_pairs"] = c.auto_pairs;
  return j;
}

}  // namespace

std::string trials_csv(const SweepResult& r) {
  std::string out =
      "# schema: cran-trials/1\n"
      "sweep_param,value,trial,seed,mode,delay_mode,status,power_W,power_dBm,iterations,"
      "max_residual,D_rrh_ul,D_bbu,D_user_dl\n";
  for (const auto& t : r.trials)
    out += fmt::format("{},{:.9e},{},{},{},{},{},{:.9e},{},{},{:.9e},{:.9e},{:.9e},{:.9e}\n",
                       to_string(r.spec.param), t.value, t.trial, t.seed, to_string(t.mode.access),
                       to_string(t.mode.delay), to_string(t.status), t.power_w,
                       dbm_or_nan(t.power_w), t.iterations, t.max_residual, t.d_rrh_ul, t.d_bbu,
                       t.d_user_dl);
  return out;
}

std::string summary_csv(const SweepResult& r) {
  std::string out =
      "# schema: cran-summary/1\n"
      "sweep_param,value,mode,delay_mode,trials,converged,iteration_cap,infeasible,"
      "mean_power_W,ci95_power_W,mean_power_dBm,median_power_dBm\n";
  for (const auto& s : r.summary)
    out += fmt::format("{},{:.9e},{},{},{},{},{},{},{:.9e},{:.9e},{:.9e},{:.9e}\n",
                       to_string(r.spec.param), s.value, to_string(s.mode.access),
                       to_string(s.mode.delay), s.trials, s.converged, s.iteration_cap,
                       s.infeasible, s.mean_power_w, s.ci95_power_w, s.mean_power_dbm,
                       s.median_power_dbm);
  return out;
}

std::string paired_csv(const PairedComparison& c) {
  std::string out = fmt::format(
      "# schema: cran-paired/1 a={}/{} b={}/{}\nseed,status_a,status_b,power_a_W,power_b_W,"
      "delta_dB\n",
      to_string(c.a.access), to_string(c.a.delay), to_string(c.b.access), to_string(c.b.delay));
  for (const auto& r : c.rows)
    out += fmt::format("{},{},{},{:.9e},{:.9e},{:.9e}\n", r.seed, to_string(r.status_a),
                       to_string(r.status_b), r.power_a_w, r.power_b_w, r.delta_db);
  return out;
}

std::string manifest_json(const SweepResult& r) {
  const SweepSpec& s = r.spec;
  nlohmann::ordered_json j;
  j["schema"] = "cran-manifest/1";
  j["sweep"] = s.name;
  j["sweep_param"] = to_string(s.param);
  j["values"] = s.values;
  j["trials"] = s.trials;
  j["master_seed"] = s.master_seed;
  j["scenario"] = scenario_json(s.base);
  auto modes = nlohmann::ordered_json::array();
  const NetworkInstance net = build_network(apply_sweep_value(s.base, s.param, s.values.front()));
  for (const auto& m : s.modes) {
    const NetworkInstance eff = apply_mode(net, m);
    modes.push_back({{"mode", to_string(m.access)},
                     {"delay_mode", to_string(m.delay)},
                     {"L1", eff.l1},
                     {"L2", eff.l2}});
  }
  j["modes"] = modes;
  j["derived"] = {{"K1", net.k1},
                  {"K2", net.k2},
                  {"num_users", net.num_users},
                  {"noise_power_W", net.noise_power()}};
  j["solver"] = {{"epsilon_th", s.settings.epsilon_th},
                 {"z_th", s.settings.z_th},
                 {"sca_tolerance", s.settings.sca_tolerance},
                 {"sca_rounds", s.settings.sca_rounds},
                 {"barrier_mu_initial", s.settings.barrier.mu_initial},
                 {"barrier_mu_factor", s.settings.barrier.mu_factor},
                 {"barrier_max_outer", s.settings.barrier.max_outer},
                 {"lp_max_iterations", s.settings.lp.max_iterations}};
  j["outputs"] = {"trials.csv", "summary.csv"};
  return j.dump(2) + "\n";
}

}  // namespace cran
