// SPDX-License-Identifier: Apache-2.0
#include "isac/campaign.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "isac/errors.hpp"

namespace isac {

namespace {

double mean_or_nan(double sum, std::uint64_t n) {
  return n ? sum / static_cast<double>(n) : std::numeric_limits<double>::quiet_NaN();
}

double se_of_mse(double sum_sq, double sum_quad, std::uint64_t n) {
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  const double dn = static_cast<double>(n);
  const double mean = sum_sq / dn;
  const double var = std::max(0.0, sum_quad / dn - mean * mean);
  return std::sqrt(var / dn);
}

}  // namespace

double ScenarioErrorStats::mse_range_m2() const { return mean_or_nan(sum_sq_range_m2, slots); }
double ScenarioErrorStats::mse_doppler_hz2() const {
  return mean_or_nan(sum_sq_doppler_hz2, slots);
}
double ScenarioErrorStats::se_mse_range_m2() const {
  return se_of_mse(sum_sq_range_m2, sum_quad_range_m4, slots);
}
double ScenarioErrorStats::se_mse_doppler_hz2() const {
  return se_of_mse(sum_sq_doppler_hz2, sum_quad_doppler_hz4, slots);
}

void CampaignConfig::validate() const {
  try {
    slot.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("slot: ") + e.what());
  }
  dmrs_symbol_positions(dmrs_additional_position);  // throws on bad position
  mcs_from_index(mcs_index);
  if (trials <= 0) throw ConfigError("sweep: trials must be > 0");
  if (snr1_db.empty()) throw ConfigError("sweep: snr1_db list must not be empty");
  for (double v : snr1_db)
    if (!std::isfinite(v)) throw ConfigError("sweep: snr1_db entries must be finite");
  if (!(delay_min_frac >= 0.0 && delay_min_frac < delay_max_frac && delay_max_frac < 1.0))
    throw ConfigError("target: need 0 <= delay_min_frac < delay_max_frac < 1");
  if (!(doppler_min_frac > -0.5 && doppler_min_frac < doppler_max_frac &&
        doppler_max_frac < 0.5))
    throw ConfigError("target: need -0.5 < doppler_min_frac < doppler_max_frac < 0.5");
  if (estimator.delay_oversampling < 1 || estimator.doppler_oversampling < 1)
    throw ConfigError("estimator: oversampling factors must be >= 1");
  if (!(los_to_target_power_ratio > 0.0))
    throw ConfigError("channel: los_to_target_power_ratio must be > 0");
  if (!(los_delay_s >= 0.0 && los_delay_s < slot.data_duration_s()))
    throw ConfigError("channel: los_delay_s must lie in [0, T)");
  const std::uint64_t n_data =
      static_cast<std::uint64_t>(slot.num_subcarriers) * slot.num_symbols -
      static_cast<std::uint64_t>(slot.num_subcarriers) *
          dmrs_symbol_positions(dmrs_additional_position).size();
  tbs_compute(n_data, mcs_from_index(mcs_index));  // throws when degenerate
}

namespace {

struct SlotSenseRecord {
  bool scenario2 = false;
  double range_err_m = 0.0;
  double doppler_err_hz = 0.0;
};

struct TrialRecord {
  std::uint8_t rounds_used = 0;
  bool decoded = false;
  std::array<std::uint8_t, 4> failed{};  // reached-and-failed flags
  std::array<SlotSenseRecord, 4> slots{};
};

/// Campaign-wide immutable context shared by all workers.
struct CampaignContext {
  const CampaignConfig& config;
  PilotMap pilots;
  ReSet full_set;
  McsEntry mcs;
  double nominal_bits_per_tb;  // N_d Q R, credited once per decoded TB
  std::uint64_t num_data_res;
};

CampaignContext make_context(const CampaignConfig& config) {
  const DmrsConfig dmrs = DmrsConfig::make(config.dmrs_additional_position, config.dmrs_seed);
  PilotMap pilots = generate_dmrs(dmrs, config.slot);
  ReSet full = ReSet::full(config.slot.num_subcarriers, config.slot.num_symbols);
  const McsEntry mcs = mcs_from_index(config.mcs_index);
  const std::uint64_t n_data =
      static_cast<std::uint64_t>(config.slot.num_subcarriers) * config.slot.num_symbols -
      pilots.set.count();
  const double nominal = static_cast<double>(n_data) * mcs.modulation_order * mcs.code_rate;
  return CampaignContext{config, std::move(pilots), std::move(full), mcs, nominal, n_data};
}

/// Independent-mode measurement: target phasor plus a fresh noise draw on the
/// masked REs, zero elsewhere.
SensingMeasurement synthesize_measurement(const PathParams& target, double noise_variance,
                                          const ReSet& mask, Scenario scenario,
                                          const SlotConfig& slot, Rng& rng) {
  const int K = slot.num_subcarriers;
  const int L = slot.num_symbols;
  const double df = slot.subcarrier_spacing_hz;
  const double ts = slot.symbol_duration_s();

  std::vector<Complex> col(K), row(L);
  for (int k = 0; k < K; ++k) {
    const double phase = -kTwoPi * df * target.delay_s * k;
    col[k] = Complex(std::cos(phase), std::sin(phase));
  }
  for (int l = 0; l < L; ++l) {
    const double phase = kTwoPi * ts * target.doppler_hz * l;
    row[l] = Complex(std::cos(phase), std::sin(phase));
  }

  SensingMeasurement m{ResourceGrid(K, L), mask, scenario};
  for (int l = 0; l < L; ++l)
    for (int k = 0; k < K; ++k)
      if (mask.contains(k, l))
        m.z.at(k, l) = target.amplitude * col[k] * row[l] + complex_gaussian(rng, noise_variance);
  return m;
}

TrialRecord run_trial(const CampaignContext& ctx, std::size_t snr_index,
                      std::size_t trial_index) {
  const CampaignConfig& cfg = ctx.config;
  Rng rng = make_trial_rng(cfg.master_seed, snr_index, trial_index);

  const double t_window = cfg.slot.data_duration_s();
  const double nu_unit = 1.0 / cfg.slot.symbol_duration_s();
  const double tau1 =
      uniform_range(rng, cfg.delay_min_frac * t_window, cfg.delay_max_frac * t_window);
  const double nu1 =
      uniform_range(rng, cfg.doppler_min_frac * nu_unit, cfg.doppler_max_frac * nu_unit);

  const PowerSplit split =
      sigma_from_snr(SnrSpec{cfg.snr1_db[snr_index], cfg.los_to_target_power_ratio});
  const double phi0 = uniform_range(rng, 0.0, kTwoPi);
  const double phi1 = uniform_range(rng, 0.0, kTwoPi);
  const PathParams los{split.los_magnitude * Complex(std::cos(phi0), std::sin(phi0)),
                       cfg.los_delay_s, 0.0};
  const PathParams target{split.target_magnitude * Complex(std::cos(phi1), std::sin(phi1)),
                          tau1, nu1};

  const ChannelRealization channel = synthesize_channel({los, target}, cfg.slot);
  const LinkContext link{&cfg.slot, &ctx.pilots, &channel, split.noise_variance};

  TrialRecord rec;
  const auto observer = [&](const RoundObservation& obs) {
    auto [mask, scenario] = select_scenario(obs.crc_ok, ctx.pilots.set);

    SensingMeasurement z =
        cfg.measurement_mode == MeasurementMode::Independent
            ? synthesize_measurement(target, split.noise_variance, mask, scenario, cfg.slot, rng)
            : form_measurement(remove_los(obs.received, obs.transmitted, los, cfg.slot),
                               obs.transmitted, mask);

    const SensingEstimate est = estimate_ml(z, cfg.estimator, cfg.slot);
    SlotSenseRecord& slot_rec = rec.slots[obs.round - 1];
    slot_rec.scenario2 = scenario == Scenario::AllRe;
    slot_rec.range_err_m = kSpeedOfLight * (est.tau_hat_s - tau1);
    slot_rec.doppler_err_hz = est.nu_hat_hz - nu1;
  };

  const HarqOutcome outcome = harq_run_tb(link, ctx.mcs, rng, observer);
  rec.rounds_used = static_cast<std::uint8_t>(outcome.rounds_used);
  rec.decoded = outcome.decoded;
  for (int r = 0; r < outcome.rounds_used; ++r)
    rec.failed[r] = outcome.round_crc_ok[r] ? 0 : 1;
  return rec;
}

struct BoundSet {
  // Variances; diag = reciprocal-diagonal form, full = inverse diagonal.
  double diag_tau, diag_nu, full_tau, full_nu;
};

BoundSet bound_set(double amplitude, double noise_variance, const ReSums& sums,
                   const SlotConfig& slot) {
  const FisherMatrix f = fisher_matrix(amplitude, noise_variance, sums,
                                       slot.subcarrier_spacing_hz, slot.symbol_duration_s());
  const SensingBounds b = crlb(f);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  return BoundSet{
      b.diag(SensingParam::Delay), b.diag(SensingParam::Doppler),
      b.full_bound ? (*b.full_bound)[static_cast<int>(SensingParam::Delay)] : nan,
      b.full_bound ? (*b.full_bound)[static_cast<int>(SensingParam::Doppler)] : nan};
}

double range_rmse_of(double delay_variance) {
  return kSpeedOfLight * std::sqrt(delay_variance);
}

void fill_bounds(SnrPointResult& point, const CampaignConfig& cfg, const ReSums& sums_s1,
                 const ReSums& sums_s2, double amplitude, double noise_variance,
                 const std::array<double, 4>& bler) {
  const BoundSet s1 = bound_set(amplitude, noise_variance, sums_s1, cfg.slot);
  const BoundSet s2 = bound_set(amplitude, noise_variance, sums_s2, cfg.slot);

  point.crlb_range_m_s1 = range_rmse_of(s1.diag_tau);
  point.crlb_range_m_s2 = range_rmse_of(s2.diag_tau);
  point.crlb_range_m_mix = range_rmse_of(mse_mix(s1.diag_tau, s2.diag_tau, bler));
  point.crlb_doppler_hz_s1 = std::sqrt(s1.diag_nu);
  point.crlb_doppler_hz_s2 = std::sqrt(s2.diag_nu);
  point.crlb_doppler_hz_mix = std::sqrt(mse_mix(s1.diag_nu, s2.diag_nu, bler));

  point.crlb_full_range_m_s1 = range_rmse_of(s1.full_tau);
  point.crlb_full_range_m_s2 = range_rmse_of(s2.full_tau);
  point.crlb_full_range_m_mix = range_rmse_of(mse_mix(s1.full_tau, s2.full_tau, bler));
  point.crlb_full_doppler_hz_s1 = std::sqrt(s1.full_nu);
  point.crlb_full_doppler_hz_s2 = std::sqrt(s2.full_nu);
  point.crlb_full_doppler_hz_mix = std::sqrt(mse_mix(s1.full_nu, s2.full_nu, bler));
}

SnrPointResult aggregate_point(const CampaignContext& ctx, std::size_t snr_index,
                               const std::vector<TrialRecord>& records,
                               const ReSums& sums_s1, const ReSums& sums_s2) {
  const CampaignConfig& cfg = ctx.config;
  SnrPointResult point;
  point.snr1_db = cfg.snr1_db[snr_index];
  point.snrc_db = point.snr1_db + linear_to_db(1.0 + cfg.los_to_target_power_ratio);
  point.trials = records.size();

  double credited_bits = 0.0;
  double sum_sq_range = 0.0, sum_sq_doppler = 0.0;
  for (const TrialRecord& rec : records) {
    for (int r = 0; r < rec.rounds_used; ++r) {
      point.round_reached[r] += 1;
      point.round_failed[r] += rec.failed[r];

      const SlotSenseRecord& s = rec.slots[r];
      ScenarioErrorStats& stats = point.scenario_stats[s.scenario2 ? 1 : 0];
      const double sq_r = s.range_err_m * s.range_err_m;
      const double sq_d = s.doppler_err_hz * s.doppler_err_hz;
      stats.slots += 1;
      stats.sum_sq_range_m2 += sq_r;
      stats.sum_quad_range_m4 += sq_r * sq_r;
      stats.sum_sq_doppler_hz2 += sq_d;
      stats.sum_quad_doppler_hz4 += sq_d * sq_d;
      sum_sq_range += sq_r;
      sum_sq_doppler += sq_d;
    }
    point.total_slots += rec.rounds_used;
    if (rec.decoded) {
      point.decoded_tbs += 1;
      credited_bits += ctx.nominal_bits_per_tb;
    }
  }

  point.rmse_range_m = std::sqrt(sum_sq_range / static_cast<double>(point.total_slots));
  point.rmse_doppler_hz = std::sqrt(sum_sq_doppler / static_cast<double>(point.total_slots));
  point.throughput_bits_per_slot = credited_bits / static_cast<double>(point.total_slots);
  point.scenario2_fraction = static_cast<double>(point.scenario_stats[1].slots) /
                             static_cast<double>(point.total_slots);

  for (int r = 0; r < 4; ++r)
    point.bler_round[r] = point.round_reached[r]
                              ? static_cast<double>(point.round_failed[r]) /
                                    static_cast<double>(point.round_reached[r])
                              : 0.0;
  point.rho = rho(point.bler_round);
  point.throughput_analytic = throughput_analytic(point.bler_round, ctx.num_data_res, ctx.mcs);

  const PowerSplit split =
      sigma_from_snr(SnrSpec{point.snr1_db, cfg.los_to_target_power_ratio});
  fill_bounds(point, cfg, sums_s1, sums_s2, split.target_magnitude, split.noise_variance,
              point.bler_round);
  return point;
}

}  // namespace

CampaignResult run_campaign(const CampaignConfig& config, int workers) {
  config.validate();
  const CampaignContext ctx = make_context(config);
  const ReSums sums_s1 = re_sums(ctx.pilots.set);
  const ReSums sums_s2 = re_sums(ctx.full_set);

  int n_workers = workers > 0 ? workers : static_cast<int>(std::thread::hardware_concurrency());
  if (n_workers < 1) n_workers = 1;

  CampaignResult result{config, {}};
  result.points.reserve(config.snr1_db.size());

  for (std::size_t snr_index = 0; snr_index < config.snr1_db.size(); ++snr_index) {
    std::vector<TrialRecord> records(config.trials);
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= records.size()) return;
        records[i] = run_trial(ctx, snr_index, i);
      }
    };

    if (n_workers == 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      pool.reserve(n_workers);
      for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
      for (auto& t : pool) t.join();
    }

    result.points.push_back(aggregate_point(ctx, snr_index, records, sums_s1, sums_s2));
  }
  return result;
}

std::vector<CrlbRow> run_crlb_table(const CampaignConfig& config,
                                    const std::vector<std::array<double, 4>>& bler_per_snr) {
  config.validate();
  if (bler_per_snr.empty())
    throw ConfigError(
        "the HARQ-mixed bound requires per-round error probabilities: "
        "pass them explicitly or load them from a prior campaign's results");
  if (bler_per_snr.size() != 1 && bler_per_snr.size() != config.snr1_db.size())
    throw ConfigError("expected 1 or " + std::to_string(config.snr1_db.size()) +
                      " BLER quadruples, got " + std::to_string(bler_per_snr.size()));

  const DmrsConfig dmrs = DmrsConfig::make(config.dmrs_additional_position, config.dmrs_seed);
  const ReSums sums_s1 =
      re_sums(ReSet::from_symbols(config.slot.num_subcarriers, config.slot.num_symbols,
                                  dmrs.symbol_positions));
  const ReSums sums_s2 =
      ReSums::full_grid(config.slot.num_subcarriers, config.slot.num_symbols);

  std::vector<CrlbRow> rows;
  rows.reserve(config.snr1_db.size());
  for (std::size_t i = 0; i < config.snr1_db.size(); ++i) {
    const std::array<double, 4>& bler =
        bler_per_snr.size() == 1 ? bler_per_snr.front() : bler_per_snr[i];
    const PowerSplit split =
        sigma_from_snr(SnrSpec{config.snr1_db[i], config.los_to_target_power_ratio});

    SnrPointResult tmp;
    fill_bounds(tmp, config, sums_s1, sums_s2, split.target_magnitude, split.noise_variance,
                bler);

    CrlbRow row;
    row.snr1_db = config.snr1_db[i];
    row.range_m_s1 = tmp.crlb_range_m_s1;
    row.range_m_s2 = tmp.crlb_range_m_s2;
    row.range_m_mix = tmp.crlb_range_m_mix;
    row.doppler_hz_s1 = tmp.crlb_doppler_hz_s1;
    row.doppler_hz_s2 = tmp.crlb_doppler_hz_s2;
    row.doppler_hz_mix = tmp.crlb_doppler_hz_mix;
    row.full_range_m_s1 = tmp.crlb_full_range_m_s1;
    row.full_range_m_s2 = tmp.crlb_full_range_m_s2;
    row.full_range_m_mix = tmp.crlb_full_range_m_mix;
    row.full_doppler_hz_s1 = tmp.crlb_full_doppler_hz_s1;
    row.full_doppler_hz_s2 = tmp.crlb_full_doppler_hz_s2;
    row.full_doppler_hz_mix = tmp.crlb_full_doppler_hz_mix;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace isac
