// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "isac/campaign.hpp"
#include "isac/config_file.hpp"
#include "isac/errors.hpp"
#include "isac/result_io.hpp"

using namespace isac;

namespace {

// Reduced grid keeps campaign-level tests fast; L stays 14 for the DMRS table.
CampaignConfig tiny_config() {
  CampaignConfig cfg;
  cfg.slot.num_subcarriers = 48;
  cfg.snr1_db = {0.0, 10.0};
  cfg.trials = 20;
  cfg.estimator.delay_oversampling = 2;
  cfg.estimator.doppler_oversampling = 2;
  cfg.master_seed = 4242;
  return cfg;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::filesystem::path temp_dir(const std::string& leaf) {
  const auto dir = std::filesystem::temp_directory_path() / "isac_tests" / leaf;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_SUITE("campaign") {

TEST_CASE("config file parsing") {
  const std::string text = R"(
# campaign configuration
master_seed = 7

[slot]
subcarrier_spacing_hz = 30e3
num_subcarriers = 96
num_symbols = 14
cp_duration_s = 2.34375e-6
carrier_frequency_hz = 3.5e9

[dmrs]
additional_position = 3
seed = 11

[mcs]
index = 1

[sweep]
snr1_db = -10, -5, 0   ; swept as SNR_1
trials = 50

[target]
delay_min_frac = 0.1
delay_max_frac = 0.7
doppler_min_frac = -0.25
doppler_max_frac = 0.25

[estimator]
delay_oversampling = 2
doppler_oversampling = 8
refine = false

[channel]
los_to_target_power_ratio = 4.0
los_delay_s = 0
measurement_mode = coupled
)";

  const CampaignConfig cfg = parse_campaign_config(text);
  CHECK(cfg.master_seed == 7);
  CHECK(cfg.slot.num_subcarriers == 96);
  CHECK(cfg.dmrs_additional_position == 3);
  CHECK(cfg.dmrs_seed == 11);
  CHECK(cfg.mcs_index == 1);
  CHECK(cfg.snr1_db == std::vector<double>{-10, -5, 0});
  CHECK(cfg.trials == 50);
  CHECK(cfg.delay_min_frac == 0.1);
  CHECK(cfg.doppler_max_frac == 0.25);
  CHECK(cfg.estimator.doppler_oversampling == 8);
  CHECK(cfg.estimator.refine == false);
  CHECK(cfg.los_to_target_power_ratio == 4.0);
  CHECK(cfg.measurement_mode == MeasurementMode::Coupled);
}

TEST_CASE("config rejection: unknown keys, sections, duplicates, bad values") {
  CHECK_THROWS_AS(parse_campaign_config("[slot]\nbandwidth = 5\n"), ConfigError);
  CHECK_THROWS_AS(parse_campaign_config("[radio]\nx = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_campaign_config("[mcs]\nindex = 1\nindex = 2\n"), ConfigError);
  CHECK_THROWS_AS(parse_campaign_config("[sweep]\ntrials = many\n"), ConfigError);
  CHECK_THROWS_AS(parse_campaign_config("[sweep]\ntrials\n"), ConfigError);
  CHECK_THROWS_AS(parse_campaign_config("seed = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_campaign_config("[channel]\nmeasurement_mode = magic\n"), ConfigError);
  CHECK_THROWS_AS(load_campaign_config("/nonexistent/isac.conf"), IoError);
}

TEST_CASE("config validation") {
  CampaignConfig cfg = tiny_config();
  cfg.trials = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);

  cfg = tiny_config();
  cfg.snr1_db.clear();
  CHECK_THROWS_AS(cfg.validate(), ConfigError);

  cfg = tiny_config();
  cfg.delay_max_frac = 1.2;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);

  cfg = tiny_config();
  cfg.doppler_min_frac = -0.6;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);

  cfg = tiny_config();
  cfg.dmrs_additional_position = 9;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);

  cfg = tiny_config();
  cfg.mcs_index = 42;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);

  tiny_config().validate();  // the baseline passes
}

TEST_CASE("campaign outputs are byte-identical across worker counts") {
  const CampaignConfig cfg = tiny_config();
  const CampaignResult serial = run_campaign(cfg, 1);
  const CampaignResult parallel = run_campaign(cfg, 3);

  const auto dir1 = temp_dir("serial");
  const auto dir3 = temp_dir("parallel");
  emit_results(serial, dir1);
  emit_results(parallel, dir3);

  CHECK(read_file(dir1 / "results.csv") == read_file(dir3 / "results.csv"));
  CHECK(read_file(dir1 / "results.json") == read_file(dir3 / "results.json"));
  CHECK(!read_file(dir1 / "results.csv").empty());
}

TEST_CASE("noise-free campaign reaches the exact nominal throughput") {
  CampaignConfig cfg = tiny_config();
  cfg.snr1_db = {200.0};  // effectively noiseless
  cfg.trials = 10;
  const CampaignResult result = run_campaign(cfg, 1);
  REQUIRE(result.points.size() == 1);
  const SnrPointResult& p = result.points.front();

  // N_d Q R = (48*12)*2*(120/1024) = 135 bits/slot, met exactly at zero BLER.
  CHECK(p.throughput_bits_per_slot == 135.0);
  CHECK(p.throughput_analytic == 135.0);
  CHECK(p.scenario2_fraction == 1.0);
  CHECK(p.bler_round[0] == 0.0);
  CHECK(p.rho == 1.0);
  CHECK(p.total_slots == 10);
}

TEST_CASE("coupled measurement mode reuses the slot noise and still estimates") {
  CampaignConfig cfg = tiny_config();
  cfg.measurement_mode = MeasurementMode::Coupled;
  cfg.snr1_db = {30.0};
  cfg.trials = 15;
  const CampaignResult coupled = run_campaign(cfg, 1);
  REQUIRE(coupled.points.size() == 1);
  const SnrPointResult& p = coupled.points.front();
  CHECK(p.scenario2_fraction == 1.0);
  // At 30 dB the target is nailed well inside one lattice step.
  const double delay_step = cfg.slot.data_duration_s() /
                            (cfg.estimator.delay_oversampling * cfg.slot.num_subcarriers);
  CHECK(p.rmse_range_m < kSpeedOfLight * delay_step);

  // The coupled draw differs from the synthesized-measurement draw.
  cfg.measurement_mode = MeasurementMode::Independent;
  const CampaignResult faithful = run_campaign(cfg, 1);
  CHECK(faithful.points.front().rmse_range_m != p.rmse_range_m);
  CHECK(faithful.points.front().throughput_bits_per_slot == p.throughput_bits_per_slot);
}

TEST_CASE("emitted files carry the documented header, the seed and round-trip") {
  const CampaignConfig cfg = tiny_config();
  const CampaignResult result = run_campaign(cfg, 2);
  const auto dir = temp_dir("emit");
  emit_results(result, dir);

  const std::string csv = read_file(dir / "results.csv");
  const std::string expected_header =
      "snr1_db,snrc_db,rmse_range_m,rmse_doppler_hz,throughput_bits_per_slot,"
      "throughput_analytic,bler_round1,bler_round2,bler_round3,bler_round4,rho,"
      "crlb_range_m_s1,crlb_range_m_s2,crlb_range_m_mix,"
      "crlb_doppler_hz_s1,crlb_doppler_hz_s2,crlb_doppler_hz_mix,"
      "trials,scenario2_fraction";
  CHECK(results_csv_header() == expected_header);
  CHECK(csv.substr(0, expected_header.size()) == expected_header);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 2);  // header + one row per SNR

  const nlohmann::json j = nlohmann::json::parse(read_file(dir / "results.json"));
  CHECK(j.at("master_seed").get<std::uint64_t>() == cfg.master_seed);
  CHECK(j.at("config").at("master_seed").get<std::uint64_t>() == cfg.master_seed);
  CHECK(j.at("config").at("sweep").at("trials").get<int>() == cfg.trials);
  CHECK(j.at("results").size() == cfg.snr1_db.size());

  const auto blers = read_campaign_blers(dir / "results.json");
  REQUIRE(blers.size() == result.points.size());
  for (std::size_t i = 0; i < blers.size(); ++i)
    for (int r = 0; r < 4; ++r) CHECK(blers[i][r] == result.points[i].bler_round[r]);
}

TEST_CASE("crlb table: dependency, mixtures and scaling") {
  const CampaignConfig cfg = tiny_config();
  CHECK_THROWS_AS(run_crlb_table(cfg, {}), ConfigError);
  CHECK_THROWS_WITH_AS(run_crlb_table(cfg, {}),
                       doctest::Contains("requires per-round error probabilities"),
                       ConfigError);

  // Always-decode probabilities collapse the mixture onto the scenario-2 bound.
  const auto rows = run_crlb_table(cfg, {{{0.0, 0.0, 0.0, 0.0}}});
  REQUIRE(rows.size() == cfg.snr1_db.size());
  for (const CrlbRow& r : rows) {
    CHECK(r.range_m_mix == r.range_m_s2);
    CHECK(r.doppler_hz_mix == r.doppler_hz_s2);
    CHECK(r.full_range_m_mix == r.full_range_m_s2);
    CHECK(r.range_m_s1 > r.range_m_s2);     // fewer REs loosen the bound
    CHECK(r.doppler_hz_s1 > r.doppler_hz_s2);
  }

  // +10 dB SNR_1 scales every RMSE-domain bound by sqrt(10).
  CHECK(rows[0].doppler_hz_s2 / rows[1].doppler_hz_s2 ==
        doctest::Approx(std::sqrt(10.0)).epsilon(1e-9));
  CHECK(rows[0].full_range_m_s2 / rows[1].full_range_m_s2 ==
        doctest::Approx(std::sqrt(10.0)).epsilon(1e-9));

  CHECK_THROWS_AS(run_crlb_table(cfg, {{{0, 0, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 0}}}),
                  ConfigError);
}

TEST_CASE("more pilot symbols tighten the scenario-1 doppler bound") {
  CampaignConfig pos1 = tiny_config();
  pos1.dmrs_additional_position = 1;
  CampaignConfig pos3 = tiny_config();
  pos3.dmrs_additional_position = 3;

  const auto rows1 = run_crlb_table(pos1, {{{1, 1, 1, 1}}});
  const auto rows3 = run_crlb_table(pos3, {{{1, 1, 1, 1}}});
  for (std::size_t i = 0; i < rows1.size(); ++i) {
    CHECK(rows3[i].doppler_hz_s1 < rows1[i].doppler_hz_s1);
    CHECK(rows3[i].full_doppler_hz_s1 < rows1[i].full_doppler_hz_s1);
  }
}

}  // TEST_SUITE
