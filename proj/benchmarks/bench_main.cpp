#include <benchmark/benchmark.h>

#include <spdcopt/analytic_optimizer.hpp>
#include <spdcopt/constants.hpp>
#include <spdcopt/numeric_optimizer.hpp>
#include <spdcopt/oracle_fft.hpp>
#include <spdcopt/qkd_security.hpp>
#include <spdcopt/temporal_model.hpp>

using namespace spdcopt;

namespace {

constexpr double kD1km = -1.15e-23;

void closed_form_widths(benchmark::State& state) {
  const SourceParams src{1e-12, 1e12};
  double d = kD1km;
  for (auto _ : state) {
    benchmark::DoNotOptimize(tau_heralded_jittered(src, d, 0.5 * d, 1e-11, 2e-11));
    benchmark::ClobberMemory();
  }
}
BENCHMARK(closed_form_widths);

void regime_classification(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(optimal_pump_fixed_crystal(kD1km, 100.0 * kD1km, 1e11));
}
BENCHMARK(regime_classification);

void full_optimum(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(full_optimum_2d(kD1km, 100.0 * kD1km));
}
BENCHMARK(full_optimum)->Unit(benchmark::kMillisecond);

void frame_oracle(benchmark::State& state) {
  const SourceParams src{1e-12, 1e12};
  for (auto _ : state) benchmark::DoNotOptimize(oracle::frame_oracle_widths(src, kD1km, 30.0 * kD1km));
}
BENCHMARK(frame_oracle)->Unit(benchmark::kMicrosecond);

void direct_grid(benchmark::State& state) {
  const SourceParams src{1e-12, 1e12};
  const auto n = std::size_t(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(oracle::empirical_widths(
        oracle::joint_temporal_intensity(src, kD1km, kD1km, oracle::default_grid(src, kD1km, kD1km, n))));
}
BENCHMARK(direct_grid)->Arg(1024)->Arg(2048)->Unit(benchmark::kMillisecond);

void window_search(benchmark::State& state) {
  const ChannelParams ch{150e3, kSmfBeta, kSmfAttenuation};
  const DetectorParams det{0.0, 1e3, 6.0};
  const QkdScenario sc{{1e-9, 1e12}, ch, ch, det, det};
  for (auto _ : state) benchmark::DoNotOptimize(optimize_windows(sc));
}
BENCHMARK(window_search)->Unit(benchmark::kMicrosecond);

} // namespace
BENCHMARK_MAIN();
