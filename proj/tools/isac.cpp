// SPDX-License-Identifier: Apache-2.0
//
// isac - bistatic OFDM uplink sensing/communication simulator CLI.
//
// Subcommands:
//   sim         run a Monte-Carlo campaign and emit results.csv / results.json
//   crlb        print the sensing lower-bound table for a config
//   geometry    localize a target from excess delay and AoA
//   throughput  evaluate the analytic HARQ throughput for given round BLERs

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "isac/campaign.hpp"
#include "isac/config_file.hpp"
#include "isac/errors.hpp"
#include "isac/geometry.hpp"
#include "isac/result_io.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 2;
constexpr int kExitRuntimeError = 3;

std::array<double, 4> parse_bler(const std::string& text) {
  std::array<double, 4> p{};
  std::size_t start = 0;
  int found = 0;
  while (start <= text.size() && found < 5) {
    std::size_t comma = text.find(',', start);
    if (comma == std::string::npos) comma = text.size();
    const std::string item = text.substr(start, comma - start);
    if (found == 4 || item.empty())
      throw isac::ConfigError("--bler expects exactly four comma-separated probabilities");
    try {
      p[found++] = std::stod(item);
    } catch (const std::exception&) {
      throw isac::ConfigError("--bler: cannot parse '" + item + "'");
    }
    start = comma + 1;
    if (comma == text.size()) break;
  }
  if (found != 4)
    throw isac::ConfigError("--bler expects exactly four comma-separated probabilities");
  for (double v : p)
    if (!(v >= 0.0 && v <= 1.0))
      throw isac::ConfigError("--bler probabilities must lie in [0, 1]");
  return p;
}

void warn_if_not_monotone(const std::array<double, 4>& p) {
  if (!isac::round_probabilities_monotone(p))
    std::cerr << "warning: round error probabilities are not non-increasing\n";
}

int run_sim(const std::string& config_path, const std::string& out_dir, bool seed_set,
            std::uint64_t seed, int workers) {
  isac::CampaignConfig cfg = isac::load_campaign_config(config_path);
  if (seed_set) cfg.master_seed = seed;
  const isac::CampaignResult result = isac::run_campaign(cfg, workers);
  isac::emit_results(result, out_dir);
  std::cout << "wrote " << (std::filesystem::path(out_dir) / "results.csv").string() << " and "
            << (std::filesystem::path(out_dir) / "results.json").string() << "\n";
  return kExitOk;
}

int run_crlb(const std::string& config_path, const std::string& bler_text,
             const std::string& campaign_json) {
  const isac::CampaignConfig cfg = isac::load_campaign_config(config_path);

  std::vector<std::array<double, 4>> blers;
  if (!bler_text.empty()) {
    blers.push_back(parse_bler(bler_text));
    warn_if_not_monotone(blers.front());
  } else if (!campaign_json.empty()) {
    std::vector<double> campaign_snrs;
    blers = isac::read_campaign_blers(campaign_json, &campaign_snrs);
    if (campaign_snrs != cfg.snr1_db)
      std::cerr << "warning: campaign SNR list differs from the config sweep\n";
  }

  const std::vector<isac::CrlbRow> rows = isac::run_crlb_table(cfg, blers);
  std::cout << "snr1_db,crlb_range_m_s1,crlb_range_m_s2,crlb_range_m_mix,"
               "crlb_doppler_hz_s1,crlb_doppler_hz_s2,crlb_doppler_hz_mix,"
               "crlb_full_range_m_s1,crlb_full_range_m_s2,crlb_full_range_m_mix,"
               "crlb_full_doppler_hz_s1,crlb_full_doppler_hz_s2,crlb_full_doppler_hz_mix\n";
  for (const isac::CrlbRow& r : rows) {
    std::printf("%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g\n",
                r.snr1_db, r.range_m_s1, r.range_m_s2, r.range_m_mix, r.doppler_hz_s1,
                r.doppler_hz_s2, r.doppler_hz_mix, r.full_range_m_s1, r.full_range_m_s2,
                r.full_range_m_mix, r.full_doppler_hz_s1, r.full_doppler_hz_s2,
                r.full_doppler_hz_mix);
  }
  return kExitOk;
}

int run_geometry(double d0, double dtau, double theta) {
  const isac::Localization loc = isac::localize(dtau, theta, d0);
  const double dp = isac::kSpeedOfLight * dtau + d0;
  std::printf("path_distance_m = %.9g\n", dp);
  std::printf("range_m = %.9g\n", loc.range_m);
  std::printf("position_m = (%.9g, %.9g)  # gNB at origin, UE at (%.9g, 0)\n", loc.position.x,
              loc.position.y, d0);
  return kExitOk;
}

int run_throughput(const std::string& bler_text, int mcs_index, int dmrs_add_pos) {
  const std::array<double, 4> p = parse_bler(bler_text);
  warn_if_not_monotone(p);

  const isac::SlotConfig slot;  // Table-I defaults
  const std::size_t n_pilot_symbols = isac::dmrs_symbol_positions(dmrs_add_pos).size();
  const std::uint64_t n_data =
      static_cast<std::uint64_t>(slot.num_subcarriers) * slot.num_symbols -
      static_cast<std::uint64_t>(slot.num_subcarriers) * n_pilot_symbols;
  const isac::McsEntry mcs = isac::mcs_from_index(mcs_index);

  std::printf("num_data_res = %llu\n", static_cast<unsigned long long>(n_data));
  std::printf("expected_rounds = %.9g\n", isac::expected_rounds(p));
  std::printf("rho = %.9g\n", isac::rho(p));
  std::printf("throughput_bits_per_slot = %.9g\n",
              isac::throughput_analytic(p, n_data, mcs));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bistatic OFDM uplink sensing and communication simulator"};
  app.require_subcommand(1);

  std::string config_path, out_dir, bler_text, campaign_json;
  std::uint64_t seed = 0;
  int workers = 0, mcs_index = 0, dmrs_add_pos = 1;
  double d0 = 0.0, dtau = 0.0, theta = 0.0;

  CLI::App* sim = app.add_subcommand("sim", "run a Monte-Carlo campaign");
  sim->add_option("--config", config_path, "campaign config file")->required();
  sim->add_option("--out", out_dir, "output directory for results.csv/results.json")->required();
  CLI::Option* seed_opt = sim->add_option("--seed", seed, "override the config master seed");
  sim->add_option("--workers", workers, "worker threads (0 = hardware concurrency)");

  CLI::App* crlb = app.add_subcommand("crlb", "print the sensing lower-bound table");
  crlb->add_option("--config", config_path, "campaign config file")->required();
  CLI::Option* bler_opt = crlb->add_option("--bler", bler_text, "p1,p2,p3,p4 round BLERs");
  CLI::Option* from_opt =
      crlb->add_option("--from-campaign", campaign_json, "results.json of a prior campaign");
  bler_opt->excludes(from_opt);

  CLI::App* geometry = app.add_subcommand("geometry", "ellipse-based target localization");
  geometry->add_option("--d0", d0, "gNB-UE baseline (m)")->required();
  geometry->add_option("--dtau", dtau, "excess delay (s)")->required();
  geometry->add_option("--theta", theta, "angle of arrival (rad)")->required();

  CLI::App* throughput = app.add_subcommand("throughput", "analytic HARQ throughput");
  throughput->add_option("--bler", bler_text, "p1,p2,p3,p4 round BLERs")->required();
  throughput->add_option("--mcs", mcs_index, "MCS index (QPSK rows 0..9)");
  throughput->add_option("--dmrs-add-pos", dmrs_add_pos, "DMRS additional position (0..3)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfigError;
  }

  try {
    if (sim->parsed())
      return run_sim(config_path, out_dir, seed_opt->count() > 0, seed, workers);
    if (crlb->parsed()) return run_crlb(config_path, bler_text, campaign_json);
    if (geometry->parsed()) return run_geometry(d0, dtau, theta);
    if (throughput->parsed()) return run_throughput(bler_text, mcs_index, dmrs_add_pos);
  } catch (const isac::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntimeError;
  }
  return kExitConfigError;
}
