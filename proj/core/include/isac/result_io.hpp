// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "isac/campaign.hpp"

namespace isac {

/// The fixed CSV column list, one row per SNR point.
std::string results_csv_header();

void write_results_csv(const CampaignResult& result, const std::filesystem::path& path);
void write_results_json(const CampaignResult& result, const std::filesystem::path& path);

/// Writes results.csv and results.json into `out_dir` (created if missing).
void emit_results(const CampaignResult& result, const std::filesystem::path& out_dir);

/// Measured per-round BLER quadruples (and optionally the SNR list) from a
/// previously emitted results.json.
std::vector<std::array<double, 4>> read_campaign_blers(const std::filesystem::path& json_path,
                                                       std::vector<double>* snr1_db = nullptr);

}  // namespace isac
