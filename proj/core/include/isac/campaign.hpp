// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "isac/bounds.hpp"
#include "isac/channel.hpp"
#include "isac/grid.hpp"
#include "isac/harq_link.hpp"
#include "isac/sensing.hpp"

namespace isac {

/// How the per-slot sensing measurement is produced.
///  - Independent (default): synthesized on the masked REs from the target
///    path plus a fresh noise draw at SNR_1.
///  - Coupled: reuses the communication slot's received grid after ideal LoS
///    cancellation, so the sensing noise is the slot noise.
enum class MeasurementMode { Independent, Coupled };

struct CampaignConfig {
  SlotConfig slot;
  int dmrs_additional_position = 1;
  std::uint64_t dmrs_seed = 1;
  int mcs_index = 0;
  std::vector<double> snr1_db = {-10, -5, 0, 5, 10, 15, 20, 25, 30};
  int trials = 2000;
  // Target draw: delay uniform in [delay_min_frac, delay_max_frac) * T,
  // Doppler uniform in [doppler_min_frac, doppler_max_frac) / Ts.
  double delay_min_frac = 0.05;
  double delay_max_frac = 0.8;
  double doppler_min_frac = -0.3;
  double doppler_max_frac = 0.3;
  EstimatorConfig estimator;
  double los_to_target_power_ratio = 9.0;
  double los_delay_s = 0.0;
  MeasurementMode measurement_mode = MeasurementMode::Independent;
  std::uint64_t master_seed = 1;

  /// Throws ConfigError on invalid settings.
  void validate() const;
};

/// Squared-error accumulators for one scenario (sum and sum-of-squares of the
/// squared errors, for MSE and its standard error).
struct ScenarioErrorStats {
  std::uint64_t slots = 0;
  double sum_sq_range_m2 = 0.0;
  double sum_quad_range_m4 = 0.0;
  double sum_sq_doppler_hz2 = 0.0;
  double sum_quad_doppler_hz4 = 0.0;

  double mse_range_m2() const;
  double mse_doppler_hz2() const;
  /// Standard error of the MSE estimate.
  double se_mse_range_m2() const;
  double se_mse_doppler_hz2() const;
};

struct SnrPointResult {
  double snr1_db = 0.0;
  double snrc_db = 0.0;
  double rmse_range_m = 0.0;
  double rmse_doppler_hz = 0.0;
  double throughput_bits_per_slot = 0.0;
  double throughput_analytic = 0.0;
  std::array<double, 4> bler_round{};  // conditional on reaching the round
  double rho = 0.0;
  // Reciprocal-diagonal bound family, RMSE units.
  double crlb_range_m_s1 = 0.0, crlb_range_m_s2 = 0.0, crlb_range_m_mix = 0.0;
  double crlb_doppler_hz_s1 = 0.0, crlb_doppler_hz_s2 = 0.0, crlb_doppler_hz_mix = 0.0;
  // Full matrix-inverse CRLB family, RMSE units (JSON only).
  double crlb_full_range_m_s1 = 0.0, crlb_full_range_m_s2 = 0.0, crlb_full_range_m_mix = 0.0;
  double crlb_full_doppler_hz_s1 = 0.0, crlb_full_doppler_hz_s2 = 0.0,
         crlb_full_doppler_hz_mix = 0.0;
  std::uint64_t trials = 0;
  double scenario2_fraction = 0.0;

  // Supplementary counters (JSON only).
  std::array<std::uint64_t, 4> round_reached{};
  std::array<std::uint64_t, 4> round_failed{};
  std::uint64_t total_slots = 0;
  std::uint64_t decoded_tbs = 0;
  std::array<ScenarioErrorStats, 2> scenario_stats{};  // [0] scenario 1, [1] scenario 2
};

struct CampaignResult {
  CampaignConfig config;
  std::vector<SnrPointResult> points;
};

/// Monte-Carlo campaign over the SNR sweep. Deterministic in
/// (config, master_seed) regardless of `workers` (0 = hardware concurrency):
/// every trial draws from a substream seeded by (master_seed, snr_index,
/// trial_index) and aggregation runs in trial order.
CampaignResult run_campaign(const CampaignConfig& config, int workers = 0);

/// One row of the standalone bound table.
struct CrlbRow {
  double snr1_db = 0.0;
  double range_m_s1 = 0.0, range_m_s2 = 0.0, range_m_mix = 0.0;
  double doppler_hz_s1 = 0.0, doppler_hz_s2 = 0.0, doppler_hz_mix = 0.0;
  double full_range_m_s1 = 0.0, full_range_m_s2 = 0.0, full_range_m_mix = 0.0;
  double full_doppler_hz_s1 = 0.0, full_doppler_hz_s2 = 0.0, full_doppler_hz_mix = 0.0;
};

/// Scenario-1, Scenario-2 and HARQ-mixed bounds across the sweep.
/// `bler_per_snr` must hold one entry (applied to every SNR) or one entry per
/// swept SNR; an empty vector raises ConfigError naming the dependency.
std::vector<CrlbRow> run_crlb_table(const CampaignConfig& config,
                                    const std::vector<std::array<double, 4>>& bler_per_snr);

}  // namespace isac
