// SPDX-License-Identifier: Apache-2.0
#include "isac/result_io.hpp"

#include <cstdio>
#include <fstream>

#include <nlohmann/json.hpp>

#include "isac/errors.hpp"

namespace isac {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string fmt9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

const char* mode_name(MeasurementMode mode) {
  return mode == MeasurementMode::Independent ? "independent" : "coupled";
}

ordered_json config_json(const CampaignConfig& c) {
  ordered_json j;
  j["master_seed"] = c.master_seed;
  j["slot"] = {{"subcarrier_spacing_hz", c.slot.subcarrier_spacing_hz},
               {"num_subcarriers", c.slot.num_subcarriers},
               {"num_symbols", c.slot.num_symbols},
               {"cp_duration_s", c.slot.cp_duration_s},
               {"carrier_frequency_hz", c.slot.carrier_frequency_hz}};
  j["dmrs"] = {{"additional_position", c.dmrs_additional_position}, {"seed", c.dmrs_seed}};
  j["mcs"] = {{"index", c.mcs_index}};
  j["sweep"] = {{"snr1_db", c.snr1_db}, {"trials", c.trials}};
  j["target"] = {{"delay_min_frac", c.delay_min_frac},
                 {"delay_max_frac", c.delay_max_frac},
                 {"doppler_min_frac", c.doppler_min_frac},
                 {"doppler_max_frac", c.doppler_max_frac}};
  j["estimator"] = {{"delay_oversampling", c.estimator.delay_oversampling},
                    {"doppler_oversampling", c.estimator.doppler_oversampling},
                    {"refine", c.estimator.refine}};
  j["channel"] = {{"los_to_target_power_ratio", c.los_to_target_power_ratio},
                  {"los_delay_s", c.los_delay_s},
                  {"measurement_mode", mode_name(c.measurement_mode)}};
  return j;
}

ordered_json stats_json(const ScenarioErrorStats& s) {
  return ordered_json{{"slots", s.slots},
                      {"sum_sq_range_m2", s.sum_sq_range_m2},
                      {"sum_quad_range_m4", s.sum_quad_range_m4},
                      {"sum_sq_doppler_hz2", s.sum_sq_doppler_hz2},
                      {"sum_quad_doppler_hz4", s.sum_quad_doppler_hz4}};
}

ordered_json point_json(const SnrPointResult& p) {
  ordered_json j;
  j["snr1_db"] = p.snr1_db;
  j["snrc_db"] = p.snrc_db;
  j["rmse_range_m"] = p.rmse_range_m;
  j["rmse_doppler_hz"] = p.rmse_doppler_hz;
  j["throughput_bits_per_slot"] = p.throughput_bits_per_slot;
  j["throughput_analytic"] = p.throughput_analytic;
  j["bler_round"] = p.bler_round;
  j["rho"] = p.rho;
  j["crlb_range_m"] = {{"s1", p.crlb_range_m_s1}, {"s2", p.crlb_range_m_s2},
                       {"mix", p.crlb_range_m_mix}};
  j["crlb_doppler_hz"] = {{"s1", p.crlb_doppler_hz_s1}, {"s2", p.crlb_doppler_hz_s2},
                          {"mix", p.crlb_doppler_hz_mix}};
  j["crlb_full_range_m"] = {{"s1", p.crlb_full_range_m_s1}, {"s2", p.crlb_full_range_m_s2},
                            {"mix", p.crlb_full_range_m_mix}};
  j["crlb_full_doppler_hz"] = {{"s1", p.crlb_full_doppler_hz_s1},
                               {"s2", p.crlb_full_doppler_hz_s2},
                               {"mix", p.crlb_full_doppler_hz_mix}};
  j["trials"] = p.trials;
  j["scenario2_fraction"] = p.scenario2_fraction;
  j["round_reached"] = p.round_reached;
  j["round_failed"] = p.round_failed;
  j["total_slots"] = p.total_slots;
  j["decoded_tbs"] = p.decoded_tbs;
  j["scenario_stats"] = {stats_json(p.scenario_stats[0]), stats_json(p.scenario_stats[1])};
  return j;
}

}  // namespace

std::string results_csv_header() {
  return "snr1_db,snrc_db,rmse_range_m,rmse_doppler_hz,throughput_bits_per_slot,"
         "throughput_analytic,bler_round1,bler_round2,bler_round3,bler_round4,rho,"
         "crlb_range_m_s1,crlb_range_m_s2,crlb_range_m_mix,"
         "crlb_doppler_hz_s1,crlb_doppler_hz_s2,crlb_doppler_hz_mix,"
         "trials,scenario2_fraction";
}

void write_results_csv(const CampaignResult& result, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << results_csv_header() << '\n';
  for (const SnrPointResult& p : result.points) {
    out << fmt9(p.snr1_db) << ',' << fmt9(p.snrc_db) << ',' << fmt9(p.rmse_range_m) << ','
        << fmt9(p.rmse_doppler_hz) << ',' << fmt9(p.throughput_bits_per_slot) << ','
        << fmt9(p.throughput_analytic) << ',' << fmt9(p.bler_round[0]) << ','
        << fmt9(p.bler_round[1]) << ',' << fmt9(p.bler_round[2]) << ','
        << fmt9(p.bler_round[3]) << ',' << fmt9(p.rho) << ',' << fmt9(p.crlb_range_m_s1)
        << ',' << fmt9(p.crlb_range_m_s2) << ',' << fmt9(p.crlb_range_m_mix) << ','
        << fmt9(p.crlb_doppler_hz_s1) << ',' << fmt9(p.crlb_doppler_hz_s2) << ','
        << fmt9(p.crlb_doppler_hz_mix) << ',' << p.trials << ','
        << fmt9(p.scenario2_fraction) << '\n';
  }
  if (!out) throw IoError("failed writing " + path.string());
}

void write_results_json(const CampaignResult& result, const std::filesystem::path& path) {
  ordered_json j;
  j["master_seed"] = result.config.master_seed;
  j["config"] = config_json(result.config);
  ordered_json points = ordered_json::array();
  for (const SnrPointResult& p : result.points) points.push_back(point_json(p));
  j["results"] = std::move(points);

  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw IoError("failed writing " + path.string());
}

void emit_results(const CampaignResult& result, const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory " + out_dir.string());
  write_results_csv(result, out_dir / "results.csv");
  write_results_json(result, out_dir / "results.json");
}

std::vector<std::array<double, 4>> read_campaign_blers(const std::filesystem::path& json_path,
                                                       std::vector<double>* snr1_db) {
  std::ifstream in(json_path);
  if (!in) throw IoError("cannot read " + json_path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("malformed campaign JSON " + json_path.string() + ": " + e.what());
  }

  std::vector<std::array<double, 4>> blers;
  if (snr1_db) snr1_db->clear();
  if (!j.contains("results") || !j["results"].is_array())
    throw IoError("campaign JSON lacks a results array: " + json_path.string());
  for (const auto& point : j["results"]) {
    std::array<double, 4> b{};
    const auto& arr = point.at("bler_round");
    for (int i = 0; i < 4; ++i) b[i] = arr.at(i).get<double>();
    blers.push_back(b);
    if (snr1_db) snr1_db->push_back(point.at("snr1_db").get<double>());
  }
  return blers;
}

}  // namespace isac
