// SPDX-License-Identifier: Apache-2.0
#include "isac/grid.hpp"

#include <algorithm>
#include <numbers>
#include <stdexcept>

#include "isac/errors.hpp"
#include "isac/rng.hpp"

namespace isac {

void SlotConfig::validate() const {
  if (num_subcarriers <= 0) throw std::invalid_argument("num_subcarriers must be > 0");
  if (num_symbols <= 0) throw std::invalid_argument("num_symbols must be > 0");
  if (subcarrier_spacing_hz <= 0.0) throw std::invalid_argument("subcarrier_spacing_hz must be > 0");
  if (cp_duration_s < 0.0) throw std::invalid_argument("cp_duration_s must be >= 0");
  if (carrier_frequency_hz <= 0.0) throw std::invalid_argument("carrier_frequency_hz must be > 0");
}

ReSet::ReSet(int num_subcarriers, int num_symbols)
    : k_(num_subcarriers), l_(num_symbols),
      mask_(static_cast<std::size_t>(num_subcarriers) * num_symbols, 0) {}

ReSet ReSet::full(int num_subcarriers, int num_symbols) {
  ReSet s(num_subcarriers, num_symbols);
  std::fill(s.mask_.begin(), s.mask_.end(), std::uint8_t{1});
  s.count_ = s.mask_.size();
  return s;
}

ReSet ReSet::from_symbols(int num_subcarriers, int num_symbols,
                          const std::vector<int>& symbol_positions) {
  ReSet s(num_subcarriers, num_symbols);
  for (int l : symbol_positions) {
    if (l < 0 || l >= num_symbols)
      throw ConfigError("DMRS symbol position " + std::to_string(l) + " outside slot");
    for (int k = 0; k < num_subcarriers; ++k) s.set(k, l, true);
  }
  return s;
}

void ReSet::set(int k, int l, bool member) {
  std::uint8_t& cell = mask_[index(k, l)];
  if (cell && !member) --count_;
  if (!cell && member) ++count_;
  cell = member ? 1 : 0;
}

ReSet ReSet::complement() const {
  ReSet out(k_, l_);
  for (std::size_t i = 0; i < mask_.size(); ++i) out.mask_[i] = mask_[i] ? 0 : 1;
  out.count_ = mask_.size() - count_;
  return out;
}

std::vector<int> dmrs_symbol_positions(int additional_position) {
  switch (additional_position) {
    case 0: return {2};
    case 1: return {2, 11};
    case 2: return {2, 7, 11};
    case 3: return {2, 5, 8, 11};
    default:
      throw ConfigError("dmrs additional_position must be in 0..3, got " +
                        std::to_string(additional_position));
  }
}

DmrsConfig DmrsConfig::make(int additional_position, std::uint64_t seed) {
  DmrsConfig cfg;
  cfg.additional_position = additional_position;
  cfg.symbol_positions = dmrs_symbol_positions(additional_position);
  cfg.seed = seed;
  return cfg;
}

PilotMap generate_dmrs(const DmrsConfig& config, const SlotConfig& slot) {
  slot.validate();
  if (config.symbol_positions.empty())
    throw ConfigError("DMRS config has no symbol positions");
  for (std::size_t i = 1; i < config.symbol_positions.size(); ++i)
    if (config.symbol_positions[i] <= config.symbol_positions[i - 1])
      throw ConfigError("DMRS symbol positions must be strictly increasing");

  const int K = slot.num_subcarriers;
  const int L = slot.num_symbols;
  PilotMap out{ResourceGrid(K, L), ReSet::from_symbols(K, L, config.symbol_positions)};

  Rng rng(config.seed);
  const double amp = 1.0 / std::numbers::sqrt2_v<double>;
  for (int l : config.symbol_positions) {
    for (int k = 0; k < K; ++k) {
      std::uint64_t word = rng();
      double re = (word & 1u) ? -amp : amp;
      double im = (word & 2u) ? -amp : amp;
      out.grid.at(k, l) = Complex(re, im);
    }
  }
  return out;
}

std::vector<Complex> qpsk_modulate(std::span<const std::uint8_t> bits) {
  if (bits.size() % 2 != 0)
    throw std::invalid_argument("qpsk_modulate requires an even number of bits");
  const double amp = 1.0 / std::numbers::sqrt2_v<double>;
  std::vector<Complex> symbols(bits.size() / 2);
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    double re = bits[2 * i] ? -amp : amp;
    double im = bits[2 * i + 1] ? -amp : amp;
    symbols[i] = Complex(re, im);
  }
  return symbols;
}

ResourceGrid map_pusch(const SlotConfig& slot, const PilotMap& pilots,
                       std::span<const Complex> data_symbols) {
  const int K = slot.num_subcarriers;
  const int L = slot.num_symbols;
  const std::size_t n_data = static_cast<std::size_t>(K) * L - pilots.set.count();
  if (data_symbols.size() != n_data)
    throw std::invalid_argument("map_pusch: expected " + std::to_string(n_data) +
                                " data symbols, got " + std::to_string(data_symbols.size()));

  ResourceGrid grid(K, L);
  std::size_t next = 0;
  for (int l = 0; l < L; ++l) {
    for (int k = 0; k < K; ++k) {
      grid.at(k, l) = pilots.set.contains(k, l) ? pilots.grid.at(k, l) : data_symbols[next++];
    }
  }
  return grid;
}

std::vector<Complex> extract_data(const ResourceGrid& grid, const ReSet& pilot_set) {
  std::vector<Complex> out;
  out.reserve(grid.size() - pilot_set.count());
  for (int l = 0; l < grid.num_symbols(); ++l)
    for (int k = 0; k < grid.num_subcarriers(); ++k)
      if (!pilot_set.contains(k, l)) out.push_back(grid.at(k, l));
  return out;
}

}  // namespace isac
