// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include "isac/channel.hpp"
#include "isac/rng.hpp"
#include "isac/sensing.hpp"

using namespace isac;

namespace {

SensingMeasurement make_measurement(const SlotConfig& slot, bool dmrs_only) {
  const ReSet mask = dmrs_only
                         ? ReSet::from_symbols(slot.num_subcarriers, slot.num_symbols, {2, 11})
                         : ReSet::full(slot.num_subcarriers, slot.num_symbols);
  const double tau = 0.33 * slot.data_duration_s();
  const double nu = 0.11 / slot.symbol_duration_s();
  const ChannelRealization ch = synthesize_channel({{Complex(0.31, 0.05), tau, nu}}, slot);

  SensingMeasurement m{ResourceGrid(slot.num_subcarriers, slot.num_symbols), mask,
                       dmrs_only ? Scenario::DmrsOnly : Scenario::AllRe};
  Rng rng(3);
  for (int l = 0; l < slot.num_symbols; ++l)
    for (int k = 0; k < slot.num_subcarriers; ++k)
      if (mask.contains(k, l))
        m.z.at(k, l) = ch.h.at(k, l) + complex_gaussian(rng, 1e-2);
  return m;
}

void periodogram_full_grid(benchmark::State& state) {
  const SlotConfig slot;
  const SensingMeasurement m = make_measurement(slot, false);
  const EstimatorConfig cfg{static_cast<int>(state.range(0)),
                            static_cast<int>(state.range(0)), false};
  for (auto _ : state) {
    auto grid = periodogram(m, cfg, slot);
    benchmark::DoNotOptimize(grid.power.data());
  }
}
BENCHMARK(periodogram_full_grid)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

void estimate_all_res(benchmark::State& state) {
  const SlotConfig slot;
  const SensingMeasurement m = make_measurement(slot, false);
  const EstimatorConfig cfg{4, 4, true};
  for (auto _ : state) {
    auto est = estimate_ml(m, cfg, slot);
    benchmark::DoNotOptimize(est.tau_hat_s);
  }
}
BENCHMARK(estimate_all_res)->Unit(benchmark::kMillisecond);

void estimate_dmrs_only(benchmark::State& state) {
  const SlotConfig slot;
  const SensingMeasurement m = make_measurement(slot, true);
  const EstimatorConfig cfg{4, 4, true};
  for (auto _ : state) {
    auto est = estimate_ml(m, cfg, slot);
    benchmark::DoNotOptimize(est.tau_hat_s);
  }
}
BENCHMARK(estimate_dmrs_only)->Unit(benchmark::kMillisecond);

void channel_synthesis(benchmark::State& state) {
  const SlotConfig slot;
  const std::vector<PathParams> paths{{Complex(0.9, 0), 0.0, 0.0},
                                      {Complex(0.3, 0.1), 8e-6, 400.0}};
  for (auto _ : state) {
    auto ch = synthesize_channel(paths, slot);
    benchmark::DoNotOptimize(ch.h.entries().data());
  }
}
BENCHMARK(channel_synthesis)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
