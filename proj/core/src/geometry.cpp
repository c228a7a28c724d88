// SPDX-License-Identifier: Apache-2.0
#include "isac/geometry.hpp"

#include <algorithm>

#include "isac/errors.hpp"

namespace isac {

BistaticDelay bistatic_delay(const BistaticScene& scene) {
  const double d0 = norm(scene.ue_position - scene.gnb_position);
  if (!(d0 > 0.0)) throw GeometryError("bistatic_delay: gNB and UE coincide");

  const double d1 = norm(scene.target_position - scene.gnb_position);
  const double d2 = norm(scene.target_position - scene.ue_position);
  const double dp = d1 + d2;
  // Triangle inequality guarantees dp >= d0; clamp rounding residue.
  const double delta = std::max(0.0, dp - d0);
  return BistaticDelay{d0 / kSpeedOfLight, delta / kSpeedOfLight, dp};
}

double target_range(double path_distance_m, double baseline_m, double aoa_rad) {
  if (!(baseline_m > 0.0)) throw GeometryError("target_range: baseline must be > 0");
  if (path_distance_m < baseline_m)
    throw GeometryError("target_range: path distance below the baseline is not an ellipse");
  if (path_distance_m == baseline_m) return 0.0;

  const double denom = path_distance_m + baseline_m * std::sin(aoa_rad);
  if (!(denom > 0.0))
    throw GeometryError("target_range: degenerate AoA, non-positive denominator");
  return (path_distance_m * path_distance_m - baseline_m * baseline_m) / (2.0 * denom);
}

double doppler_from_velocity(double speed_mps, double range_m, double baseline_m,
                             double aoa_rad, double carrier_frequency_hz) {
  if (range_m < 0.0) throw GeometryError("doppler_from_velocity: negative range");
  const double s = std::sin(aoa_rad);
  const double radicand =
      range_m * range_m + baseline_m * baseline_m + 2.0 * range_m * baseline_m * s;
  if (radicand < 0.0) throw GeometryError("doppler_from_velocity: negative radicand");
  const double dist = std::sqrt(radicand);
  if (!(dist > 0.0))
    throw GeometryError("doppler_from_velocity: target coincident with both nodes");
  // The inner factor lies in [0, 1]; clamp rounding residue.
  const double factor = std::clamp(0.5 + (range_m + baseline_m * s) / (2.0 * dist), 0.0, 1.0);
  return (2.0 * carrier_frequency_hz / kSpeedOfLight) * speed_mps * std::sqrt(factor);
}

double aoa_of_target(const BistaticScene& scene) {
  const Vec2 baseline = scene.ue_position - scene.gnb_position;
  const double d0 = norm(baseline);
  if (!(d0 > 0.0)) throw GeometryError("aoa_of_target: gNB and UE coincide");

  const Vec2 u{baseline.x / d0, baseline.y / d0};
  const Vec2 n{-u.y, u.x};
  const Vec2 dir = scene.target_position - scene.gnb_position;
  const double along = dot(dir, u);
  const double across = dot(dir, n);
  if (along == 0.0 && across == 0.0) return 0.0;  // target at the gNB
  // dir = d1 (cos(theta) n - sin(theta) u)
  return std::atan2(-along, across);
}

Localization localize(double delta_tau_s, double aoa_rad, double baseline_m) {
  if (delta_tau_s < 0.0) throw GeometryError("localize: negative excess delay");
  const double dp = kSpeedOfLight * delta_tau_s + baseline_m;
  const double d1 = target_range(dp, baseline_m, aoa_rad);
  return Localization{d1, Vec2{-d1 * std::sin(aoa_rad), d1 * std::cos(aoa_rad)}};
}

}  // namespace isac
