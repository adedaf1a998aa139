#include <benchmark/benchmark.h>

#include "shs/processes.hpp"
#include "shs/rng.hpp"
#include "shs/schedulers.hpp"
#include "shs/trajectory.hpp"

namespace {

void BM_Philox(benchmark::State& state) {
  shs::PhiloxCounter ctr{0, 0, 0, 0};
  for (auto _ : state) {
    ++ctr[0];
    benchmark::DoNotOptimize(shs::philox4x32_10(ctr, {1, 2}));
  }
}
BENCHMARK(BM_Philox);

void BM_RandomizedRound(benchmark::State& state) {
  shs::RngStream rng({1, 0, 0, shs::StreamTag::kTest});
  for (auto _ : state) benchmark::DoNotOptimize(shs::randomized_round(3.7, rng.uniform()));
}
BENCHMARK(BM_RandomizedRound);

void BM_DenoiserTrajectory(benchmark::State& state) {
  const auto kind = state.range(0) == 0 ? shs::SchedulerKind::kStandard : shs::SchedulerKind::kShs;
  shs::ToyDenoiserSpec spec{std::vector<shs::Token>(64, 0), 32, 4.0, 0.9};
  const shs::ToyDenoiser model(spec);
  const shs::TimeGrid grid(static_cast<std::size_t>(state.range(1)));
  const shs::SequenceState init(std::vector<shs::Token>(64, 1));
  std::uint64_t t = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(shs::run_trajectory(model, kind, grid, init, 3, t++));
  }
  state.SetItemsProcessed(state.iterations() * 64 * state.range(1));
}
BENCHMARK(BM_DenoiserTrajectory)->ArgsProduct({{0, 1}, {16, 64, 256}});

}  // namespace

BENCHMARK_MAIN();
