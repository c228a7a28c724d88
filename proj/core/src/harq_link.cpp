// SPDX-License-Identifier: Apache-2.0
#include "isac/harq_link.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "isac/errors.hpp"

namespace isac {

McsEntry mcs_from_index(int index) {
  // QPSK rows of the NR MCS index table (R * 1024).
  static constexpr int kRates[] = {120, 157, 193, 251, 308, 379, 449, 526, 602, 679};
  if (index < 0 || index >= static_cast<int>(std::size(kRates)))
    throw ConfigError("unsupported MCS index " + std::to_string(index) +
                      " (QPSK entries 0..9 only)");
  return McsEntry{index, 2, kRates[index] / 1024.0};
}

int tbs_compute(std::uint64_t num_data_res, const McsEntry& mcs) {
  if (num_data_res == 0) throw std::invalid_argument("tbs_compute: no data REs");
  const double info = std::floor(static_cast<double>(num_data_res) *
                                 mcs.modulation_order * mcs.code_rate);
  const long long payload = static_cast<long long>(info) - 24;
  if (payload <= 0)
    throw ConfigError("tbs_compute: configuration too small to carry a CRC-protected payload");
  const long long bytes_floored = payload - payload % 8;
  if (bytes_floored <= 0)
    throw ConfigError("tbs_compute: payload smaller than one byte");
  return static_cast<int>(bytes_floored);
}

// ---- CRC-24A ----------------------------------------------------------------

std::uint32_t crc24(std::span<const std::uint8_t> bits) {
  std::uint32_t reg = 0;
  for (std::uint8_t b : bits) {
    const std::uint32_t feedback = ((reg >> 23) & 1u) ^ (b & 1u);
    reg = (reg << 1) & 0xFFFFFFu;
    if (feedback) reg ^= 0x864CFBu;
  }
  return reg;
}

Bits crc24_attach(std::span<const std::uint8_t> payload) {
  Bits out(payload.begin(), payload.end());
  const std::uint32_t rem = crc24(payload);
  for (int i = 23; i >= 0; --i) out.push_back(static_cast<std::uint8_t>((rem >> i) & 1u));
  return out;
}

bool crc24_check(std::span<const std::uint8_t> bits_with_crc) {
  if (bits_with_crc.size() < 24) return false;
  return crc24(bits_with_crc) == 0;
}

// ---- convolutional mother code ----------------------------------------------

namespace {

// State packs the six post-feedback register bits, bit 0 most recent.
inline std::uint8_t conv_feedback(std::uint8_t s) {
  return static_cast<std::uint8_t>(((s >> 1) ^ (s >> 2) ^ (s >> 4) ^ (s >> 5)) & 1u);
}

struct ConvStep {
  std::uint8_t next;
  std::uint8_t sys, p1, p2;
};

// transitions[s][u]: outputs and successor for input bit u in state s.
struct ConvTables {
  ConvStep step[kConvStates][2];
  std::uint8_t tail_input[kConvStates];

  ConvTables() {
    for (int s = 0; s < kConvStates; ++s) {
      const std::uint8_t fb = conv_feedback(static_cast<std::uint8_t>(s));
      for (int u = 0; u < 2; ++u) {
        const std::uint8_t w = static_cast<std::uint8_t>(u ^ fb);
        const std::uint8_t p1 = static_cast<std::uint8_t>(
            (w ^ (s >> 0) ^ (s >> 1) ^ (s >> 2) ^ (s >> 5)) & 1u);  // 0171
        const std::uint8_t p2 = static_cast<std::uint8_t>(
            (w ^ (s >> 0) ^ (s >> 1) ^ (s >> 3) ^ (s >> 5)) & 1u);  // 0165
        const std::uint8_t next = static_cast<std::uint8_t>(((s << 1) | w) & 0x3F);
        step[s][u] = ConvStep{next, static_cast<std::uint8_t>(u), p1, p2};
      }
      tail_input[s] = fb;  // forces w = 0 so the register drains to zero
    }
  }
};

const ConvTables& conv_tables() {
  static const ConvTables tables;
  return tables;
}

}  // namespace

Bits conv_encode(std::span<const std::uint8_t> info_bits) {
  const ConvTables& t = conv_tables();
  Bits out;
  out.reserve(3 * (info_bits.size() + kConvTailBits));
  std::uint8_t state = 0;
  auto emit = [&](std::uint8_t u) {
    const ConvStep& st = t.step[state][u];
    out.push_back(st.sys);
    out.push_back(st.p1);
    out.push_back(st.p2);
    state = st.next;
  };
  for (std::uint8_t b : info_bits) emit(b & 1u);
  for (int i = 0; i < kConvTailBits; ++i) emit(t.tail_input[state]);
  return out;
}

// ---- rate matching ------------------------------------------------------------

Bits rate_match(std::span<const std::uint8_t> codeword, int rv, std::size_t num_bits) {
  if (codeword.empty()) throw std::invalid_argument("rate_match: empty codeword");
  if (rv < 0 || rv > 3) throw std::invalid_argument("rate_match: rv must be in 0..3");
  if (num_bits == 0) throw std::invalid_argument("rate_match: target bit count must be > 0");

  const std::size_t nc = codeword.size();
  const std::size_t offset = static_cast<std::size_t>(rv) * (nc / 4);
  Bits out(num_bits);
  for (std::size_t i = 0; i < num_bits; ++i) out[i] = codeword[(offset + i) % nc];
  return out;
}

void derate_match(std::span<const double> llrs, int rv, std::span<double> soft_buffer) {
  if (soft_buffer.empty()) throw std::invalid_argument("derate_match: empty soft buffer");
  if (rv < 0 || rv > 3) throw std::invalid_argument("derate_match: rv must be in 0..3");

  const std::size_t nc = soft_buffer.size();
  const std::size_t offset = static_cast<std::size_t>(rv) * (nc / 4);
  for (std::size_t i = 0; i < llrs.size(); ++i) soft_buffer[(offset + i) % nc] += llrs[i];
}

// ---- Viterbi -------------------------------------------------------------------

Bits viterbi_decode(std::span<const double> soft_buffer, int info_bits) {
  const int steps = info_bits + kConvTailBits;
  if (soft_buffer.size() != static_cast<std::size_t>(3 * steps))
    throw std::invalid_argument("viterbi_decode: buffer length must be 3 (B + 6)");

  const ConvTables& t = conv_tables();
  constexpr double kNoPath = -1e300;

  std::vector<double> metric(kConvStates, kNoPath), next_metric(kConvStates);
  metric[0] = 0.0;  // encoder starts in the all-zero state
  std::vector<std::uint8_t> prev_state(static_cast<std::size_t>(steps) * kConvStates);

  for (int step = 0; step < steps; ++step) {
    const double l_sys = soft_buffer[3 * step];
    const double l_p1 = soft_buffer[3 * step + 1];
    const double l_p2 = soft_buffer[3 * step + 2];
    std::fill(next_metric.begin(), next_metric.end(), kNoPath);
    std::uint8_t* decisions = &prev_state[static_cast<std::size_t>(step) * kConvStates];

    const bool tail = step >= info_bits;
    for (int s = 0; s < kConvStates; ++s) {
      if (metric[s] == kNoPath) continue;
      const int u_first = tail ? t.tail_input[s] : 0;
      const int u_last = tail ? t.tail_input[s] : 1;
      for (int u = u_first; u <= u_last; ++u) {
        const ConvStep& st = t.step[s][u];
        const double branch = (st.sys ? -l_sys : l_sys) + (st.p1 ? -l_p1 : l_p1) +
                              (st.p2 ? -l_p2 : l_p2);
        const double cand = metric[s] + branch;
        // >= so exact metric ties (all-erasure input) do not collapse onto
        // the all-zero codeword, whose CRC is trivially valid.
        if (cand >= next_metric[st.next]) {
          next_metric[st.next] = cand;
          decisions[st.next] = static_cast<std::uint8_t>(s);
        }
      }
    }
    metric.swap(next_metric);
  }

  // Zero termination: trace back from the all-zero state.
  Bits decoded(steps);
  std::uint8_t state = 0;
  for (int step = steps - 1; step >= 0; --step) {
    const std::uint8_t prev = prev_state[static_cast<std::size_t>(step) * kConvStates + state];
    const std::uint8_t w = state & 1u;
    decoded[step] = static_cast<std::uint8_t>(w ^ conv_feedback(prev));
    state = prev;
  }
  decoded.resize(info_bits);
  return decoded;
}

DecodeResult decode_block(std::span<const double> soft_buffer, int payload_bits) {
  const int info_bits = payload_bits + 24;
  Bits with_crc = viterbi_decode(soft_buffer, info_bits);
  DecodeResult res;
  res.crc_ok = crc24_check(with_crc);
  with_crc.resize(payload_bits);
  res.payload = std::move(with_crc);
  return res;
}

// ---- receiver front end ---------------------------------------------------------

ResourceGrid channel_estimate(const ResourceGrid& y, const PilotMap& pilots) {
  if (pilots.set.count() == 0) throw std::invalid_argument("channel_estimate: empty pilot set");
  const int K = y.num_subcarriers();
  const int L = y.num_symbols();
  ResourceGrid h_hat(K, L);

  std::vector<int> pilot_l;
  std::vector<Complex> ls;
  for (int k = 0; k < K; ++k) {
    pilot_l.clear();
    ls.clear();
    for (int l = 0; l < L; ++l) {
      if (!pilots.set.contains(k, l)) continue;
      pilot_l.push_back(l);
      ls.push_back(y.at(k, l) / pilots.grid.at(k, l));
    }
    if (pilot_l.empty()) continue;  // no pilots on this subcarrier, leave zeros

    std::size_t seg = 0;
    for (int l = 0; l < L; ++l) {
      if (l <= pilot_l.front()) {
        h_hat.at(k, l) = ls.front();
      } else if (l >= pilot_l.back()) {
        h_hat.at(k, l) = ls.back();
      } else {
        while (pilot_l[seg + 1] < l) ++seg;
        const double t = static_cast<double>(l - pilot_l[seg]) /
                         static_cast<double>(pilot_l[seg + 1] - pilot_l[seg]);
        h_hat.at(k, l) = (1.0 - t) * ls[seg] + t * ls[seg + 1];
      }
    }
  }
  return h_hat;
}

std::vector<double> equalize_demod(const ResourceGrid& y, const ResourceGrid& h_hat,
                                   double noise_variance, const ReSet& pilot_set) {
  if (y.num_subcarriers() != h_hat.num_subcarriers() || y.num_symbols() != h_hat.num_symbols())
    throw std::invalid_argument("equalize_demod: grid dimensions mismatch");
  if (noise_variance < 0.0)
    throw std::invalid_argument("equalize_demod: negative noise variance");

  const double sqrt2 = std::numbers::sqrt2_v<double>;
  std::vector<double> llrs;
  llrs.reserve(2 * (y.size() - pilot_set.count()));
  for (int l = 0; l < y.num_symbols(); ++l) {
    for (int k = 0; k < y.num_subcarriers(); ++k) {
      if (pilot_set.contains(k, l)) continue;
      const Complex h = h_hat.at(k, l);
      const double h2 = std::norm(h);
      if (h2 == 0.0) {
        llrs.push_back(0.0);
        llrs.push_back(0.0);
        continue;
      }
      const Complex s = y.at(k, l) * std::conj(h) / h2;
      const double scale = noise_variance > 0.0 ? 2.0 * h2 / noise_variance : 2.0 * h2;
      llrs.push_back(scale * sqrt2 * s.real());
      llrs.push_back(scale * sqrt2 * s.imag());
    }
  }
  return llrs;
}

// ---- HARQ ------------------------------------------------------------------------

HarqOutcome harq_run_tb(const LinkContext& ctx, const McsEntry& mcs, Rng& rng,
                        const RoundObserver& observer) {
  if (!ctx.slot || !ctx.pilots || !ctx.channel)
    throw std::invalid_argument("harq_run_tb: incomplete link context");

  const SlotConfig& slot = *ctx.slot;
  const std::uint64_t n_data =
      static_cast<std::uint64_t>(slot.num_subcarriers) * slot.num_symbols -
      ctx.pilots->set.count();
  const std::size_t tx_bits = static_cast<std::size_t>(n_data) * mcs.modulation_order;
  const int payload_bits = tbs_compute(n_data, mcs);

  Bits payload(payload_bits);
  for (auto& b : payload) b = random_bit(rng);
  const Bits mother = conv_encode(crc24_attach(payload));

  HarqProcess harq;
  harq.soft_buffer.assign(mother.size(), 0.0);

  HarqOutcome outcome;
  for (int round = 1; round <= 4; ++round) {
    const int rv = harq.rv_sequence[round - 1];
    const Bits tx = rate_match(mother, rv, tx_bits);
    const std::vector<Complex> data_symbols = qpsk_modulate(tx);
    const ResourceGrid x = map_pusch(slot, *ctx.pilots, data_symbols);
    const ResourceGrid y = apply_channel(x, *ctx.channel, ctx.noise_variance, rng);

    const ResourceGrid h_hat = channel_estimate(y, *ctx.pilots);
    const std::vector<double> llrs = equalize_demod(y, h_hat, ctx.noise_variance, ctx.pilots->set);
    derate_match(llrs, rv, harq.soft_buffer);

    const DecodeResult res = decode_block(harq.soft_buffer, payload_bits);
    harq.round = round;
    harq.decoded = res.crc_ok;
    outcome.rounds_used = round;
    outcome.round_crc_ok[round - 1] = res.crc_ok;
    outcome.decoded = res.crc_ok;

    if (observer) observer(RoundObservation{round, x, y, res.crc_ok});
    if (res.crc_ok) break;
  }
  return outcome;
}

}  // namespace isac
