// SPDX-License-Identifier: Apache-2.0
#include "isac/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace isac {

ChannelRealization synthesize_channel(const std::vector<PathParams>& paths,
                                      const SlotConfig& slot) {
  if (paths.empty()) throw std::invalid_argument("synthesize_channel: empty path list");
  slot.validate();
  for (const PathParams& p : paths) {
    // Identifiability region of the grid model.
    if (!(p.delay_s >= 0.0 && p.delay_s < slot.data_duration_s()))
      throw std::invalid_argument("synthesize_channel: path delay outside [0, T)");
    if (!(std::abs(p.doppler_hz) < slot.subcarrier_spacing_hz))
      throw std::invalid_argument("synthesize_channel: path Doppler magnitude >= subcarrier spacing");
  }

  const int K = slot.num_subcarriers;
  const int L = slot.num_symbols;
  const double df = slot.subcarrier_spacing_hz;
  const double ts = slot.symbol_duration_s();

  ChannelRealization out{ResourceGrid(K, L), paths};
  std::vector<Complex> col(K), row(L);
  for (const PathParams& p : paths) {
    for (int k = 0; k < K; ++k) {
      double phase = -kTwoPi * df * p.delay_s * k;
      col[k] = Complex(std::cos(phase), std::sin(phase));
    }
    for (int l = 0; l < L; ++l) {
      double phase = kTwoPi * ts * p.doppler_hz * l;
      row[l] = Complex(std::cos(phase), std::sin(phase));
    }
    for (int l = 0; l < L; ++l)
      for (int k = 0; k < K; ++k) out.h.at(k, l) += p.amplitude * col[k] * row[l];
  }
  return out;
}

ResourceGrid apply_channel(const ResourceGrid& x, const ChannelRealization& channel,
                           double noise_variance, Rng& rng) {
  if (x.num_subcarriers() != channel.h.num_subcarriers() ||
      x.num_symbols() != channel.h.num_symbols())
    throw std::invalid_argument("apply_channel: grid dimensions mismatch");
  if (noise_variance < 0.0)
    throw std::invalid_argument("apply_channel: negative noise variance");

  ResourceGrid y(x.num_subcarriers(), x.num_symbols());
  for (std::size_t i = 0; i < y.size(); ++i) {
    y.entries()[i] = channel.h.entries()[i] * x.entries()[i];
    if (noise_variance > 0.0) y.entries()[i] += complex_gaussian(rng, noise_variance);
  }
  return y;
}

ResourceGrid remove_los(const ResourceGrid& y, const ResourceGrid& x,
                        const PathParams& los, const SlotConfig& slot) {
  if (y.num_subcarriers() != x.num_subcarriers() || y.num_symbols() != x.num_symbols())
    throw std::invalid_argument("remove_los: grid dimensions mismatch");

  const double df = slot.subcarrier_spacing_hz;
  ResourceGrid residual(y.num_subcarriers(), y.num_symbols());
  std::vector<Complex> col(y.num_subcarriers());
  for (int k = 0; k < y.num_subcarriers(); ++k) {
    double phase = -kTwoPi * df * los.delay_s * k;
    col[k] = los.amplitude * Complex(std::cos(phase), std::sin(phase));
  }
  for (int l = 0; l < y.num_symbols(); ++l)
    for (int k = 0; k < y.num_subcarriers(); ++k)
      residual.at(k, l) = y.at(k, l) - col[k] * x.at(k, l);
  return residual;
}

PowerSplit sigma_from_snr(const SnrSpec& spec) {
  if (!(spec.los_to_target_power_ratio > 0.0))
    throw std::invalid_argument("sigma_from_snr: LoS/target power ratio must be > 0");
  if (!std::isfinite(spec.snr1_db))
    throw std::invalid_argument("sigma_from_snr: SNR_1 must be finite");

  const double snr1 = db_to_linear(spec.snr1_db);
  if (!(snr1 > 0.0)) throw std::invalid_argument("sigma_from_snr: SNR_1 must be positive");

  const double target_power = 1.0 / (1.0 + spec.los_to_target_power_ratio);
  const double los_power = spec.los_to_target_power_ratio * target_power;
  return PowerSplit{std::sqrt(los_power), std::sqrt(target_power), target_power / snr1};
}

}  // namespace isac
