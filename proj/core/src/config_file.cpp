// SPDX-License-Identifier: Apache-2.0
#include "isac/config_file.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "isac/errors.hpp"

namespace isac {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

[[noreturn]] void fail(int line, const std::string& message) {
  throw ConfigError("config line " + std::to_string(line) + ": " + message);
}

double parse_double(std::string_view value, int line) {
  const std::string buf(value);
  char* end = nullptr;
  const double v = std::strtod(buf.c_str(), &end);
  if (end != buf.c_str() + buf.size() || buf.empty()) fail(line, "expected a number, got '" + buf + "'");
  return v;
}

long long parse_int(std::string_view value, int line) {
  long long v = 0;
  const auto res = std::from_chars(value.data(), value.data() + value.size(), v);
  if (res.ec != std::errc{} || res.ptr != value.data() + value.size())
    fail(line, "expected an integer, got '" + std::string(value) + "'");
  return v;
}

std::uint64_t parse_uint(std::string_view value, int line) {
  std::uint64_t v = 0;
  const auto res = std::from_chars(value.data(), value.data() + value.size(), v);
  if (res.ec != std::errc{} || res.ptr != value.data() + value.size())
    fail(line, "expected a non-negative integer, got '" + std::string(value) + "'");
  return v;
}

bool parse_bool(std::string_view value, int line) {
  if (value == "true") return true;
  if (value == "false") return false;
  fail(line, "expected true/false, got '" + std::string(value) + "'");
}

std::vector<double> parse_double_list(std::string_view value, int line) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= value.size()) {
    std::size_t comma = value.find(',', start);
    if (comma == std::string_view::npos) comma = value.size();
    const std::string_view item = trim(value.substr(start, comma - start));
    if (item.empty()) fail(line, "empty list entry");
    out.push_back(parse_double(item, line));
    start = comma + 1;
    if (comma == value.size()) break;
  }
  return out;
}

}  // namespace

CampaignConfig parse_campaign_config(std::string_view text) {
  CampaignConfig cfg;
  std::string section;
  std::set<std::string> seen;

  std::istringstream stream{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(stream, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const std::size_t hash = line.find_first_of("#;"); hash != std::string_view::npos)
      line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') fail(line_no, "unterminated section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      static const std::set<std::string> kSections{
          "slot", "dmrs", "mcs", "sweep", "target", "estimator", "channel"};
      if (!kSections.contains(section)) fail(line_no, "unknown section [" + section + "]");
      continue;
    }

    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) fail(line_no, "expected key = value");
    const std::string key = std::string(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    if (key.empty()) fail(line_no, "empty key");
    if (value.empty()) fail(line_no, "empty value for '" + key + "'");

    const std::string qualified = section.empty() ? key : section + "." + key;
    if (!seen.insert(qualified).second) fail(line_no, "duplicate key '" + qualified + "'");

    if (section.empty()) {
      if (key == "master_seed") cfg.master_seed = parse_uint(value, line_no);
      else fail(line_no, "unknown top-level key '" + key + "'");
    } else if (section == "slot") {
      if (key == "subcarrier_spacing_hz") cfg.slot.subcarrier_spacing_hz = parse_double(value, line_no);
      else if (key == "num_subcarriers") cfg.slot.num_subcarriers = static_cast<int>(parse_int(value, line_no));
      else if (key == "num_symbols") cfg.slot.num_symbols = static_cast<int>(parse_int(value, line_no));
      else if (key == "cp_duration_s") cfg.slot.cp_duration_s = parse_double(value, line_no);
      else if (key == "carrier_frequency_hz") cfg.slot.carrier_frequency_hz = parse_double(value, line_no);
      else fail(line_no, "unknown key '" + key + "' in [slot]");
    } else if (section == "dmrs") {
      if (key == "additional_position") cfg.dmrs_additional_position = static_cast<int>(parse_int(value, line_no));
      else if (key == "seed") cfg.dmrs_seed = parse_uint(value, line_no);
      else fail(line_no, "unknown key '" + key + "' in [dmrs]");
    } else if (section == "mcs") {
      if (key == "index") cfg.mcs_index = static_cast<int>(parse_int(value, line_no));
      else fail(line_no, "unknown key '" + key + "' in [mcs]");
    } else if (section == "sweep") {
      if (key == "snr1_db") cfg.snr1_db = parse_double_list(value, line_no);
      else if (key == "trials") cfg.trials = static_cast<int>(parse_int(value, line_no));
      else fail(line_no, "unknown key '" + key + "' in [sweep]");
    } else if (section == "target") {
      if (key == "delay_min_frac") cfg.delay_min_frac = parse_double(value, line_no);
      else if (key == "delay_max_frac") cfg.delay_max_frac = parse_double(value, line_no);
      else if (key == "doppler_min_frac") cfg.doppler_min_frac = parse_double(value, line_no);
      else if (key == "doppler_max_frac") cfg.doppler_max_frac = parse_double(value, line_no);
      else fail(line_no, "unknown key '" + key + "' in [target]");
    } else if (section == "estimator") {
      if (key == "delay_oversampling") cfg.estimator.delay_oversampling = static_cast<int>(parse_int(value, line_no));
      else if (key == "doppler_oversampling") cfg.estimator.doppler_oversampling = static_cast<int>(parse_int(value, line_no));
      else if (key == "refine") cfg.estimator.refine = parse_bool(value, line_no);
      else fail(line_no, "unknown key '" + key + "' in [estimator]");
    } else if (section == "channel") {
      if (key == "los_to_target_power_ratio") cfg.los_to_target_power_ratio = parse_double(value, line_no);
      else if (key == "los_delay_s") cfg.los_delay_s = parse_double(value, line_no);
      else if (key == "measurement_mode") {
        if (value == "independent") cfg.measurement_mode = MeasurementMode::Independent;
        else if (value == "coupled") cfg.measurement_mode = MeasurementMode::Coupled;
        else fail(line_no, "measurement_mode must be independent or coupled");
      } else fail(line_no, "unknown key '" + key + "' in [channel]");
    }
  }

  cfg.validate();
  return cfg;
}

CampaignConfig load_campaign_config(const std::filesystem::path& path) {
  std::ifstream file(path);
  if (!file) throw IoError("cannot read config file: " + path.string());
  std::ostringstream buf;
  buf << file.rdbuf();
  return parse_campaign_config(buf.str());
}

}  // namespace isac
