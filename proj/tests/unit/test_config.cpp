#include <doctest.h>

#include "cran/config.hpp"

using namespace cran;

TEST_CASE("shipped config matches built-in defaults") {
  const RunConfig rc = load_run_config(std::string(CRAN_SOURCE_DIR) + "/configs/default.yaml");
  const NetworkInstance a = build_network(rc.scenario);
  const NetworkInstance b = build_network(ScenarioConfig{});
  CHECK(a.k1 == b.k1);
  CHECK(a.k2 == b.k2);
  CHECK(a.p_bbu_dl == b.p_bbu_dl);
  CHECK(a.noise_power() == b.noise_power());
  CHECK(a.d_total_max == b.d_total_max);
  CHECK(rc.sweep_values.empty());
}

TEST_CASE("partial config keeps defaults") {
  const RunConfig rc = parse_run_config("num_rrh: 3\nd_total_max_s: 0.002\nsweep_values: [1, 2]\n");
  CHECK(rc.scenario.num_rrh == 3);
  CHECK(rc.scenario.d_total_max_s == 0.002);
  CHECK(rc.scenario.num_slices == 2);
  CHECK(rc.sweep_values == std::vector<double>{1, 2});
}

TEST_CASE("bad configs are rejected") {
  CHECK_THROWS_AS(parse_run_config("nmu_rrh: 3\n"), ValidationError);
  CHECK_THROWS_AS(parse_run_config("num_rrh: three\n"), ValidationError);
  CHECK_THROWS_AS(parse_run_config("- 1\n- 2\n"), ValidationError);
  CHECK_THROWS_AS(parse_run_config("pairs: [[0, 1, 2]]\n"), ValidationError);
  CHECK_THROWS_AS(load_run_config("/nonexistent/cfg.yaml"), ValidationError);
}

TEST_CASE("yaml round trip") {
  ScenarioConfig c;
  c.num_rrh = 1;
  c.theta = 0.5;
  c.pairs = {{0, 1}};
  c.auto_pairs = false;
  const RunConfig back = parse_run_config(scenario_to_yaml(c));
  CHECK(back.scenario.num_rrh == 1);
  CHECK(back.scenario.theta == 0.5);
  CHECK(back.scenario.pairs == c.pairs);
  CHECK_FALSE(back.scenario.auto_pairs);
}
