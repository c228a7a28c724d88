// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include "isac/harq_link.hpp"
#include "isac/rng.hpp"

using namespace isac;

namespace {

Bits random_payload(int bits, Rng& rng) {
  Bits b(bits);
  for (auto& v : b) v = random_bit(rng);
  return b;
}

void mother_encode(benchmark::State& state) {
  Rng rng(1);
  const Bits block = crc24_attach(random_payload(3552, rng));
  for (auto _ : state) {
    auto cw = conv_encode(block);
    benchmark::DoNotOptimize(cw.data());
  }
}
BENCHMARK(mother_encode);

void viterbi_full_tb(benchmark::State& state) {
  Rng rng(2);
  const int payload_bits = 3552;
  const Bits cw = conv_encode(crc24_attach(random_payload(payload_bits, rng)));
  std::vector<double> llrs(cw.size());
  for (std::size_t i = 0; i < cw.size(); ++i)
    llrs[i] = (cw[i] ? -2.0 : 2.0) + 0.3 * (uniform01(rng) - 0.5);
  for (auto _ : state) {
    auto res = decode_block(llrs, payload_bits);
    benchmark::DoNotOptimize(res.crc_ok);
  }
}
BENCHMARK(viterbi_full_tb)->Unit(benchmark::kMillisecond);

void harq_single_round(benchmark::State& state) {
  const SlotConfig slot;
  const PilotMap pilots = generate_dmrs(DmrsConfig::make(1, 1), slot);
  const ChannelRealization ch = synthesize_channel(
      {{Complex(0.9486832980505138, 0), 0.0, 0.0},
       {Complex(0.1, 0.3), 6e-6, 250.0}},
      slot);
  const LinkContext ctx{&slot, &pilots, &ch, 1e-3};
  const McsEntry mcs = mcs_from_index(0);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    Rng rng(seed++);
    auto outcome = harq_run_tb(ctx, mcs, rng);
    benchmark::DoNotOptimize(outcome.decoded);
  }
}
BENCHMARK(harq_single_round)->Unit(benchmark::kMillisecond);

}  // namespace
