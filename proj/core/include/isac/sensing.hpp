// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "isac/common.hpp"
#include "isac/grid.hpp"

namespace isac {

enum class Scenario { DmrsOnly, AllRe };

/// Phase-compensated measurement grid; entries outside the mask are zero.
struct SensingMeasurement {
  ResourceGrid z;
  ReSet mask;
  Scenario scenario = Scenario::AllRe;
};

struct EstimatorConfig {
  int delay_oversampling = 4;    // O_f
  int doppler_oversampling = 4;  // O_t
  bool refine = true;            // sub-bin peak refinement
};

struct SensingEstimate {
  double tau_hat_s = 0.0;   // in [0, T)
  double nu_hat_hz = 0.0;   // in [-1/(2 Ts), 1/(2 Ts))
  Complex alpha_hat;
  double peak_value = 0.0;  // |correlation|^2 at the estimate
};

/// |correlation|^2 over the delay/Doppler lattice, delay-major storage.
struct PeriodogramGrid {
  int delay_bins = 0;    // O_f K
  int doppler_bins = 0;  // O_t L
  std::vector<double> power;
  std::size_t peak_delay_index = 0;
  std::size_t peak_doppler_index = 0;
  double delay_step_s = 0.0;       // T / (O_f K)
  double doppler_step_hz = 0.0;    // 1 / (O_t L Ts)

  double power_at(std::size_t a, std::size_t b) const { return power[a * doppler_bins + b]; }
  double delay_of_bin(std::size_t a) const { return static_cast<double>(a) * delay_step_s; }
  /// Signed Doppler in [-1/(2 Ts), 1/(2 Ts)).
  double doppler_of_bin(std::size_t b) const {
    const double signed_bin = (2 * static_cast<int>(b) < doppler_bins)
                                  ? static_cast<double>(b)
                                  : static_cast<double>(b) - doppler_bins;
    return signed_bin * doppler_step_hz;
  }
};

/// z[k][l] = residual[k][l] conj(x[k][l]) inside the mask, zero outside.
/// Throws std::invalid_argument when a masked symbol is not unit-modulus.
SensingMeasurement form_measurement(const ResourceGrid& residual,
                                    const ResourceGrid& known_symbols, const ReSet& mask);

/// P(tau_a, nu_b) = |sum_mask z exp(+j2pi k df tau_a) exp(-j2pi l Ts nu_b)|^2
/// on the zero-padded FFT lattice. Throws EstimationError on an empty mask.
PeriodogramGrid periodogram(const SensingMeasurement& measurement,
                            const EstimatorConfig& config, const SlotConfig& slot);

/// Peak of the periodogram, optionally refined to the continuous maximum
/// (parabolic seed + Newton ascent on the exact correlation surface), with
/// the least-squares amplitude at the refined point.
SensingEstimate estimate_ml(const SensingMeasurement& measurement,
                            const EstimatorConfig& config, const SlotConfig& slot);

/// Scenario 2 (all REs) after a CRC pass, otherwise the DMRS-only set.
std::pair<ReSet, Scenario> select_scenario(bool decoded, const ReSet& dmrs_set);

}  // namespace isac
