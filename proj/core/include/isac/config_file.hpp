// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string_view>

#include "isac/campaign.hpp"

namespace isac {

/// Parses the sectioned key/value campaign format:
///
///   master_seed = 1
///   [slot]
///   subcarrier_spacing_hz = 30e3
///   ...
///
/// Keys mirror the CampaignConfig fields; unknown sections or keys, duplicate
/// keys and malformed values raise ConfigError with the offending line.
CampaignConfig parse_campaign_config(std::string_view text);

/// Reads and parses a config file; raises IoError when unreadable.
CampaignConfig load_campaign_config(const std::filesystem::path& path);

}  // namespace isac
