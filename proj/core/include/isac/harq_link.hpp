// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "isac/channel.hpp"
#include "isac/grid.hpp"
#include "isac/rng.hpp"

namespace isac {

/// Modulation order and nominal code rate for one MCS index (QPSK rows only).
struct McsEntry {
  int index = 0;
  int modulation_order = 2;     // Q, bits/symbol
  double code_rate = 120.0 / 1024.0;
};

/// QPSK entries (indices 0..9) of the NR MCS table; throws ConfigError otherwise.
McsEntry mcs_from_index(int index);

/// Payload bits per TB: floor(N_d Q R) - 24 CRC bits, floored to a byte
/// multiple. Throws ConfigError when the configuration cannot carry a payload.
int tbs_compute(std::uint64_t num_data_res, const McsEntry& mcs);

using Bits = std::vector<std::uint8_t>;

/// CRC-24A remainder (generator 0x1864CFB, zero initial state), MSB first.
std::uint32_t crc24(std::span<const std::uint8_t> bits);
/// Payload with the 24 parity bits appended.
Bits crc24_attach(std::span<const std::uint8_t> payload);
/// True iff the trailing 24 bits are a valid CRC of the leading bits.
bool crc24_check(std::span<const std::uint8_t> bits_with_crc);

inline constexpr int kConvConstraintLength = 7;
inline constexpr int kConvStates = 64;
inline constexpr int kConvTailBits = kConvConstraintLength - 1;

/// Rate-1/3 recursive systematic convolutional mother code, constraint
/// length 7, feedback 0133 with parity generators 0171 and 0165 (octal),
/// zero-terminated with 6 tail steps. Codeword layout is (sys, p1, p2) per
/// step, so systematic bits sit at positions 3t.
Bits conv_encode(std::span<const std::uint8_t> info_bits);

/// Circular-buffer selection of `num_bits` starting at rv * floor(buffer/4).
Bits rate_match(std::span<const std::uint8_t> codeword, int rv, std::size_t num_bits);

/// Additive soft combining back into mother-codeword positions.
void derate_match(std::span<const double> llrs, int rv, std::span<double> soft_buffer);

/// Soft-input Viterbi decode of the zero-terminated mother code.
/// `soft_buffer` holds 3 (B + 6) LLRs; returns the B information bits.
Bits viterbi_decode(std::span<const double> soft_buffer, int info_bits);

struct DecodeResult {
  Bits payload;
  bool crc_ok = false;
};

/// Viterbi + CRC-24 check; payload_bits excludes the CRC.
DecodeResult decode_block(std::span<const double> soft_buffer, int payload_bits);

/// Least-squares estimates at pilot REs, linearly interpolated across the
/// symbol index per subcarrier (nearest-pilot extrapolation at the edges).
ResourceGrid channel_estimate(const ResourceGrid& y, const PilotMap& pilots);

/// One-tap equalization and max-log QPSK LLRs over the data REs in mapping
/// order (2 per RE, positive = bit 0). A zero channel estimate yields zero
/// LLRs (erasure). With noise_variance = 0 the constant 1/sigma^2 factor is
/// dropped; decisions are unaffected.
std::vector<double> equalize_demod(const ResourceGrid& y, const ResourceGrid& h_hat,
                                   double noise_variance, const ReSet& pilot_set);

/// Soft-combining state of one transport block across redundancy versions.
struct HarqProcess {
  int round = 0;  // completed transmissions, at most 4
  std::vector<double> soft_buffer;
  bool decoded = false;
  std::array<int, 4> rv_sequence{0, 2, 3, 1};
};

struct LinkContext {
  const SlotConfig* slot = nullptr;
  const PilotMap* pilots = nullptr;
  const ChannelRealization* channel = nullptr;
  double noise_variance = 0.0;
};

struct RoundObservation {
  int round;  // 1-based
  const ResourceGrid& transmitted;
  const ResourceGrid& received;
  bool crc_ok;
};
using RoundObserver = std::function<void(const RoundObservation&)>;

struct HarqOutcome {
  int rounds_used = 0;
  bool decoded = false;
  std::array<bool, 4> round_crc_ok{};
};

/// Runs one TB through up to four HARQ-IR rounds over the fixed channel
/// realization (fresh noise per round), stopping at the first CRC pass. The
/// observer, when set, sees every round's transmitted/received grids.
HarqOutcome harq_run_tb(const LinkContext& ctx, const McsEntry& mcs, Rng& rng,
                        const RoundObserver& observer = {});

}  // namespace isac
