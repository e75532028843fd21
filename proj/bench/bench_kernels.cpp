// Serial reference vs OpenMP paths: the Monte-Carlo sweep and the queue
// oracle batch.
#include <benchmark/benchmark.h>

#include "cran/delay_model.hpp"
#include "cran/harness.hpp"

namespace {

cran::SweepSpec small_sweep() {
  cran::ScenarioConfig base;
  return cran::named_sweep("fig5", base, cran::MultipleAccess::Noma, cran::DelayMode::Fixed, 4, 3);
}

std::vector<cran::OracleCase> oracle_cases() {
  std::vector<cran::OracleCase> cases;
  for (int i = 0; i < 8; ++i) {
    const double theta = 1e-3 * (1 + i);
    const double d = 0.05;
    const double service = cran::min_rate_floor(theta, 1e-2, d);
    cases.push_back({0.5 * service, theta, 1e-2, d, service, 100u + i});
  }
  return cases;
}

void BM_SweepSerial(benchmark::State& st) {
  const auto spec = small_sweep();
  for (auto _ : st) benchmark::DoNotOptimize(cran::run_sweep_serial(spec));
}

void BM_SweepOpenMP(benchmark::State& st) {
  const auto spec = small_sweep();
  for (auto _ : st) benchmark::DoNotOptimize(cran::run_sweep(spec));
}

void BM_OracleSerial(benchmark::State& st) {
  const auto cases = oracle_cases();
  for (auto _ : st) benchmark::DoNotOptimize(cran::queue_oracle_batch_serial(cases, 100000));
}

void BM_OracleOpenMP(benchmark::State& st) {
  const auto cases = oracle_cases();
  for (auto _ : st) benchmark::DoNotOptimize(cran::queue_oracle_batch(cases, 100000));
}

}  // namespace

BENCHMARK(BM_SweepSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepOpenMP)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_OracleSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_OracleOpenMP)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
