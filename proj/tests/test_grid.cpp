// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include "isac/errors.hpp"
#include "isac/grid.hpp"
#include "isac/rng.hpp"

using namespace isac;

namespace {

SlotConfig small_slot(int k = 24, int l = 14) {
  SlotConfig slot;
  slot.num_subcarriers = k;
  slot.num_symbols = l;
  return slot;
}

}  // namespace

TEST_SUITE("grid") {

TEST_CASE("slot config derived durations") {
  SlotConfig slot;
  CHECK(slot.subcarrier_spacing_hz == 30e3);
  CHECK(slot.num_subcarriers == 1272);
  CHECK(slot.num_symbols == 14);
  CHECK(slot.data_duration_s() == doctest::Approx(1.0 / 30e3).epsilon(1e-15));
  CHECK(slot.symbol_duration_s() == slot.data_duration_s() + slot.cp_duration_s);

  SlotConfig bad = slot;
  bad.num_subcarriers = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = slot;
  bad.subcarrier_spacing_hz = -1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("dmrs symbol position table") {
  CHECK(dmrs_symbol_positions(0) == std::vector<int>{2});
  CHECK(dmrs_symbol_positions(1) == std::vector<int>{2, 11});
  CHECK(dmrs_symbol_positions(2) == std::vector<int>{2, 7, 11});
  CHECK(dmrs_symbol_positions(3) == std::vector<int>{2, 5, 8, 11});
  CHECK_THROWS_AS(dmrs_symbol_positions(4), ConfigError);
  CHECK_THROWS_AS(dmrs_symbol_positions(-1), ConfigError);
}

TEST_CASE("dmrs generation is deterministic and unit-modulus") {
  SlotConfig slot;  // full Table-I grid
  const DmrsConfig cfg = DmrsConfig::make(1, 42);
  const PilotMap a = generate_dmrs(cfg, slot);
  const PilotMap b = generate_dmrs(cfg, slot);

  CHECK(a.set.count() == 2 * 1272);
  CHECK(a.grid.entries() == b.grid.entries());

  for (int l : cfg.symbol_positions)
    for (int k = 0; k < slot.num_subcarriers; ++k) {
      CHECK(a.set.contains(k, l));
      CHECK(std::abs(std::abs(a.grid.at(k, l)) - 1.0) <= 1e-12);
    }

  const PilotMap other = generate_dmrs(DmrsConfig::make(1, 43), slot);
  CHECK(a.grid.entries() != other.grid.entries());
}

TEST_CASE("pilot/data accounting for the Table-I grid") {
  SlotConfig slot;
  const std::size_t kl = static_cast<std::size_t>(slot.num_subcarriers) * slot.num_symbols;
  CHECK(kl == 17808);

  const PilotMap pos1 = generate_dmrs(DmrsConfig::make(1, 1), slot);
  CHECK(pos1.set.count() == 2544);
  CHECK(kl - pos1.set.count() == 15264);

  const PilotMap pos3 = generate_dmrs(DmrsConfig::make(3, 1), slot);
  CHECK(kl - pos3.set.count() == 12720);
}

TEST_CASE("pilot and data sets partition the grid for every dmrs position") {
  SlotConfig slot = small_slot();
  for (int pos = 0; pos <= 3; ++pos) {
    const PilotMap pilots = generate_dmrs(DmrsConfig::make(pos, 7), slot);
    const ReSet data = pilots.set.complement();
    CHECK(pilots.set.count() + data.count() ==
          static_cast<std::size_t>(slot.num_subcarriers) * slot.num_symbols);
    for (int l = 0; l < slot.num_symbols; ++l)
      for (int k = 0; k < slot.num_subcarriers; ++k)
        CHECK(pilots.set.contains(k, l) != data.contains(k, l));
  }
}

TEST_CASE("qpsk gray mapping") {
  const std::vector<std::uint8_t> bits{0, 0, 1, 1, 0, 1, 1, 0};
  const auto symbols = qpsk_modulate(bits);
  REQUIRE(symbols.size() == 4);
  const double a = 1.0 / std::sqrt(2.0);
  CHECK(symbols[0] == Complex(a, a));
  CHECK(symbols[1] == Complex(-a, -a));
  CHECK(symbols[2] == Complex(a, -a));
  CHECK(symbols[3] == Complex(-a, a));
  for (const Complex& s : symbols) CHECK(std::abs(std::abs(s) - 1.0) <= 1e-12);

  const std::vector<std::uint8_t> odd{0, 1, 0};
  CHECK_THROWS_AS(qpsk_modulate(odd), std::invalid_argument);
}

TEST_CASE("map_pusch fills every RE and inverts by frequency-first extraction") {
  SlotConfig slot = small_slot();
  const PilotMap pilots = generate_dmrs(DmrsConfig::make(2, 3), slot);
  const std::size_t n_data =
      static_cast<std::size_t>(slot.num_subcarriers) * slot.num_symbols - pilots.set.count();

  Rng rng(99);
  std::vector<std::uint8_t> bits(2 * n_data);
  for (auto& b : bits) b = random_bit(rng);
  const auto data = qpsk_modulate(bits);

  const ResourceGrid grid = map_pusch(slot, pilots, data);
  for (int l = 0; l < slot.num_symbols; ++l)
    for (int k = 0; k < slot.num_subcarriers; ++k)
      CHECK(std::abs(std::abs(grid.at(k, l)) - 1.0) <= 1e-12);  // nothing left unset

  CHECK(extract_data(grid, pilots.set) == data);

  std::vector<Complex> short_data(data.begin(), data.end() - 1);
  CHECK_THROWS_AS(map_pusch(slot, pilots, short_data), std::invalid_argument);
}

}  // TEST_SUITE
