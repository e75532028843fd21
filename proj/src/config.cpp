#include "cran/config.hpp"

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace cran {
namespace {

using Setter = std::function<void(ScenarioConfig&, const YAML::Node&)>;

template <typename T>
Setter field(T ScenarioConfig::*member) {
  return [member](ScenarioConfig& c, const YAML::Node& n) { c.*member = n.as<T>(); };
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"num_rrh", field(&ScenarioConfig::num_rrh)},
      {"num_slices", field(&ScenarioConfig::num_slices)},
      {"users_per_slice_per_rrh", field(&ScenarioConfig::users_per_slice_per_rrh)},
      {"k1", field(&ScenarioConfig::k1)},
      {"k2", field(&ScenarioConfig::k2)},
      {"subcarrier_bw_hz", field(&ScenarioConfig::subcarrier_bw_hz)},
      {"access_bw_hz", field(&ScenarioConfig::access_bw_hz)},
      {"fronthaul_bw_hz", field(&ScenarioConfig::fronthaul_bw_hz)},
      {"p_rrh_dl_dbm", field(&ScenarioConfig::p_rrh_dl_dbm)},
      {"p_rrh_ul_dbm", field(&ScenarioConfig::p_rrh_ul_dbm)},
      {"p_bbu_dl_dbm", field(&ScenarioConfig::p_bbu_dl_dbm)},
      {"p_user_ul_dbm", field(&ScenarioConfig::p_user_ul_dbm)},
      {"l1", field(&ScenarioConfig::l1)},
      {"l2", field(&ScenarioConfig::l2)},
      {"alpha", field(&ScenarioConfig::alpha)},
      {"beta", field(&ScenarioConfig::beta)},
      {"noise_psd_dbm_hz", field(&ScenarioConfig::noise_psd_dbm_hz)},
      {"area_km2", field(&ScenarioConfig::area_km2)},
      {"rrh_bbu_distance_m", field(&ScenarioConfig::rrh_bbu_distance_m)},
      {"min_user_distance_m", field(&ScenarioConfig::min_user_distance_m)},
      {"r_rsv_ul_bps", field(&ScenarioConfig::r_rsv_ul_bps)},
      {"r_rsv_dl_bps", field(&ScenarioConfig::r_rsv_dl_bps)},
      {"d_total_max_s", field(&ScenarioConfig::d_total_max_s)},
      {"theta", field(&ScenarioConfig::theta)},
      {"delta", field(&ScenarioConfig::delta)},
      {"eta", field(&ScenarioConfig::eta)},
      {"pairs",
       [](ScenarioConfig& c, const YAML::Node& n) {
         c.pairs.clear();
         for (const auto& p : n) {
           if (!p.IsSequence() || p.size() != 2)
             throw ValidationError("pairs must be a list of [a, b] entries");
           c.pairs.emplace_back(p[0].as<int>(), p[1].as<int>());
         }
         c.auto_pairs = false;
       }},
  };
  return table;
}

}  // namespace

RunConfig parse_run_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ValidationError(std::string("config parse error: ") + e.what());
  }
  RunConfig rc;
  if (root.IsNull()) return rc;
  if (!root.IsMap()) throw ValidationError("config must be a key-value map");
  for (const auto& kv : root) {
    const auto key = kv.first.as<std::string>();
    try {
      if (key == "sweep_values") {
        rc.sweep_values = kv.second.as<std::vector<double>>();
        continue;
      }
      const auto it = setters().find(key);
      if (it == setters().end()) throw ValidationError("unknown config key: " + key);
      it->second(rc.scenario, kv.second);
    } catch (const YAML::Exception& e) {
      throw ValidationError("bad value for " + key + ": " + e.what());
    }
  }
  return rc;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str());
}

std::string scenario_to_yaml(const ScenarioConfig& c) {
  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "num_rrh" << YAML::Value << c.num_rrh;
  out << YAML::Key << "num_slices" << YAML::Value << c.num_slices;
  out << YAML::Key << "users_per_slice_per_rrh" << YAML::Value << c.users_per_slice_per_rrh;
  out << YAML::Key << "k1" << YAML::Value << c.k1;
  out << YAML::Key << "k2" << YAML::Value << c.k2;
  out << YAML::Key << "subcarrier_bw_hz" << YAML::Value << c.subcarrier_bw_hz;
  out << YAML::Key << "access_bw_hz" << YAML::Value << c.access_bw_hz;
  out << YAML::Key << "fronthaul_bw_hz" << YAML::Value << c.fronthaul_bw_hz;
  out << YAML::Key << "p_rrh_dl_dbm" << YAML::Value << c.p_rrh_dl_dbm;
  out << YAML::Key << "p_rrh_ul_dbm" << YAML::Value << c.p_rrh_ul_dbm;
  out << YAML::Key << "p_bbu_dl_dbm" << YAML::Value << c.p_bbu_dl_dbm;
  out << YAML::Key << "p_user_ul_dbm" << YAML::Value << c.p_user_ul_dbm;
  out << YAML::Key << "l1" << YAML::Value << c.l1;
  out << YAML::Key << "l2" << YAML::Value << c.l2;
  out << YAML::Key << "alpha" << YAML::Value << c.alpha;
  out << YAML::Key << "beta" << YAML::Value << c.beta;
  out << YAML::Key << "noise_psd_dbm_hz" << YAML::Value << c.noise_psd_dbm_hz;
  out << YAML::Key << "area_km2" << YAML::Value << c.area_km2;
  out << YAML::Key << "rrh_bbu_distance_m" << YAML::Value << c.rrh_bbu_distance_m;
  out << YAML::Key << "min_user_distance_m" << YAML::Value << c.min_user_distance_m;
  out << YAML::Key << "r_rsv_ul_bps" << YAML::Value << c.r_rsv_ul_bps;
  out << YAML::Key << "r_rsv_dl_bps" << YAML::Value << c.r_rsv_dl_bps;
  out << YAML::Key << "d_total_max_s" << YAML::Value << c.d_total_max_s;
  out << YAML::Key << "theta" << YAML::Value << c.theta;
  out << YAML::Key << "delta" << YAML::Value << c.delta;
  out << YAML::Key << "eta" << YAML::Value << c.eta;
  if (!c.auto_pairs) {
    out << YAML::Key << "pairs" << YAML::Value << YAML::BeginSeq;
    for (auto [a, b] : c.pairs)
      out << YAML::Flow << YAML::BeginSeq << a << b << YAML::EndSeq;
    out << YAML::EndSeq;
  }
  out << YAML::EndMap;
  return out.c_str();
}

}  // namespace cran
