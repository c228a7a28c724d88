// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "isac/common.hpp"
#include "isac/grid.hpp"
#include "isac/rng.hpp"

namespace isac {

/// One propagation path: complex gain, delay, Doppler shift.
struct PathParams {
  Complex amplitude;
  double delay_s = 0.0;
  double doppler_hz = 0.0;
};

/// Frequency-domain channel h[k][l] = sum_p a_p exp(-j2pi k df tau_p) exp(+j2pi l Ts nu_p).
struct ChannelRealization {
  ResourceGrid h;
  std::vector<PathParams> paths;
};

/// SNR bookkeeping: SNR_1 is the reflected-path SNR; the LoS carries
/// `los_to_target_power_ratio` times the target-path power.
struct SnrSpec {
  double snr1_db = 0.0;
  double los_to_target_power_ratio = 9.0;
};

struct PowerSplit {
  double los_magnitude;     // |a_0|
  double target_magnitude;  // |a_1|
  double noise_variance;    // sigma^2
};

/// Throws std::invalid_argument on an empty path list.
ChannelRealization synthesize_channel(const std::vector<PathParams>& paths,
                                      const SlotConfig& slot);

/// y = h o x + w with w ~ CN(0, sigma^2) i.i.d. per RE. sigma^2 = 0 adds nothing.
ResourceGrid apply_channel(const ResourceGrid& x, const ChannelRealization& channel,
                           double noise_variance, Rng& rng);

/// Subtracts the static LoS contribution a_0 exp(-j2pi k df tau_0) x[k][l]
/// (LoS Doppler is zero by model assumption; los.doppler_hz is ignored).
ResourceGrid remove_los(const ResourceGrid& y, const ResourceGrid& x,
                        const PathParams& los, const SlotConfig& slot);

/// Power normalization |a_0|^2 + |a_1|^2 = 1 with the configured LoS/target
/// ratio, and sigma^2 = |a_1|^2 / SNR_1(linear).
PowerSplit sigma_from_snr(const SnrSpec& spec);

}  // namespace isac
