#include <CLI11.hpp>
#include <fmt/format.h>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "cran/config.hpp"
#include "cran/harness.hpp"

namespace cran {

namespace {

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  f << text;
  if (!f) throw std::runtime_error("write failed for " + p.string());
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"cran_sim: joint subcarrier/power/delay allocation for NOMA C-RAN"};
  std::string config_path;
  std::string sweep = "single";
  std::string mode = "noma";
  std::string delay_mode = "dynamic";
  int trials = 100;
  std::uint64_t seed = 1;
  std::string out_dir = "results";
  app.add_option("--config", config_path, "scenario file (YAML key-value)")->required();
  app.add_option("--sweep", sweep, "single | fig2 | fig5 | fig6 | fig7")
      ->check(CLI::IsMember({"single", "fig2", "fig5", "fig6", "fig7"}));
  app.add_option("--mode", mode, "noma | ofdma")->check(CLI::IsMember({"noma", "ofdma"}));
  app.add_option("--delay-mode", delay_mode, "dynamic | fixed")
      ->check(CLI::IsMember({"dynamic", "fixed"}));
  app.add_option("--trials", trials, "Monte-Carlo trials per point")->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "master seed");
  app.add_option("--out", out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    const RunConfig cfg = load_run_config(config_path);
    const SweepSpec spec = named_sweep(
        sweep, cfg.scenario, mode == "ofdma" ? MultipleAccess::Ofdma : MultipleAccess::Noma,
        delay_mode == "fixed" ? DelayMode::Fixed : DelayMode::Dynamic, trials, seed,
        cfg.sweep_values);

    const std::filesystem::path out(out_dir);
    std::error_code ec;
    std::filesystem::create_directories(out, ec);
    if (ec || !std::filesystem::is_directory(out))
      throw std::runtime_error("cannot create output directory " + out.string());

    const SweepResult res = run_sweep(spec);
    write_file(out / "trials.csv", trials_csv(res));
    write_file(out / "summary.csv", summary_csv(res));
    write_file(out / "manifest.json", manifest_json(res));

    for (const auto& s : res.summary)
      std::cout << fmt::format("{}={:g} {}/{}: {}/{} converged, mean {:.3f} dBm\n",
                               to_string(spec.param), s.value, to_string(s.mode.access),
                               to_string(s.mode.delay), s.converged, s.trials, s.mean_power_dbm);
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n" << app.help();
    return 2;
  }
}

}  // namespace cran
