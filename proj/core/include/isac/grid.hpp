// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "isac/common.hpp"

namespace isac {

/// OFDM numerology and slot dimensions.
struct SlotConfig {
  double subcarrier_spacing_hz = 30e3;   // Δf
  int num_subcarriers = 1272;            // K
  int num_symbols = 14;                  // L
  double cp_duration_s = 2.34375e-6;     // T_cp (normal CP at 30 kHz)
  double carrier_frequency_hz = 3.5e9;   // f_c

  double data_duration_s() const { return 1.0 / subcarrier_spacing_hz; }           // T
  double symbol_duration_s() const { return data_duration_s() + cp_duration_s; }   // T_s

  /// Throws std::invalid_argument on non-positive dimensions or spacing.
  void validate() const;
};

/// Mask over the K x L resource-element grid with cached cardinality.
class ReSet {
 public:
  ReSet() = default;
  ReSet(int num_subcarriers, int num_symbols);

  static ReSet full(int num_subcarriers, int num_symbols);
  /// All subcarriers of the listed OFDM symbols.
  static ReSet from_symbols(int num_subcarriers, int num_symbols,
                            const std::vector<int>& symbol_positions);

  bool contains(int k, int l) const { return mask_[index(k, l)] != 0; }
  void set(int k, int l, bool member);
  std::size_t count() const { return count_; }
  int num_subcarriers() const { return k_; }
  int num_symbols() const { return l_; }
  ReSet complement() const;

 private:
  std::size_t index(int k, int l) const { return static_cast<std::size_t>(k) + static_cast<std::size_t>(k_) * l; }
  int k_ = 0;
  int l_ = 0;
  std::size_t count_ = 0;
  std::vector<std::uint8_t> mask_;
};

/// K x L complex baseband grid, stored frequency-first (k fastest).
class ResourceGrid {
 public:
  ResourceGrid() = default;
  ResourceGrid(int num_subcarriers, int num_symbols)
      : k_(num_subcarriers), l_(num_symbols),
        entries_(static_cast<std::size_t>(num_subcarriers) * num_symbols) {}

  Complex& at(int k, int l) { return entries_[index(k, l)]; }
  const Complex& at(int k, int l) const { return entries_[index(k, l)]; }
  int num_subcarriers() const { return k_; }
  int num_symbols() const { return l_; }
  std::size_t size() const { return entries_.size(); }
  std::vector<Complex>& entries() { return entries_; }
  const std::vector<Complex>& entries() const { return entries_; }

 private:
  std::size_t index(int k, int l) const { return static_cast<std::size_t>(k) + static_cast<std::size_t>(k_) * l; }
  int k_ = 0;
  int l_ = 0;
  std::vector<Complex> entries_;
};

/// DMRS placement and pilot-sequence seed.
struct DmrsConfig {
  int additional_position = 1;        // 0..3
  std::vector<int> symbol_positions;  // derived, strictly increasing
  std::uint64_t seed = 1;

  static DmrsConfig make(int additional_position, std::uint64_t seed);
};

/// Pilot grid (nonzero only on the pilot set) together with the pilot set.
struct PilotMap {
  ResourceGrid grid;
  ReSet set;
};

/// Fixed type-A single-symbol table for a 14-symbol slot:
/// 0 -> {2}, 1 -> {2,11}, 2 -> {2,7,11}, 3 -> {2,5,8,11}.
/// Throws ConfigError for positions outside 0..3.
std::vector<int> dmrs_symbol_positions(int additional_position);

/// Seeded unit-modulus QPSK pilots on all subcarriers of each DMRS symbol.
PilotMap generate_dmrs(const DmrsConfig& config, const SlotConfig& slot);

/// Gray mapping (b0,b1) -> ((1-2 b0) + j(1-2 b1))/sqrt(2).
/// Throws std::invalid_argument on odd input length.
std::vector<Complex> qpsk_modulate(std::span<const std::uint8_t> bits);

/// Fills data REs frequency-first around the pilots; throws on count mismatch.
ResourceGrid map_pusch(const SlotConfig& slot, const PilotMap& pilots,
                       std::span<const Complex> data_symbols);

/// Data REs in the same frequency-first order map_pusch consumed them.
std::vector<Complex> extract_data(const ResourceGrid& grid, const ReSet& pilot_set);

}  // namespace isac
