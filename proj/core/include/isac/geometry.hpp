// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>

#include "isac/common.hpp"

namespace isac {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }

/// Planar bistatic scene: static gNB and UE, one point target.
struct BistaticScene {
  Vec2 gnb_position;
  Vec2 ue_position;
  Vec2 target_position;
  double target_speed_mps = 0.0;
  double carrier_frequency_hz = 3.5e9;
};

struct BistaticDelay {
  double tau0_s;            // LoS delay d0/c
  double delta_tau_s;       // excess delay (d1 + d2 - d0)/c
  double path_distance_m;   // d_p = d1 + d2
};

struct Localization {
  double range_m;  // d1, gNB-to-target
  Vec2 position;   // relative to the gNB, UE on the +x axis
};

/// LoS and reflected-path delays of a scene. Throws GeometryError when the
/// gNB and UE coincide.
BistaticDelay bistatic_delay(const BistaticScene& scene);

/// d1 = (d_p^2 - d0^2) / (2 (d_p + d0 sin theta)); d_p == d0 collapses to 0.
/// Throws GeometryError on invalid ellipse (d_p < d0) or non-positive denominator.
double target_range(double path_distance_m, double baseline_m, double aoa_rad);

/// Doppler magnitude of a target with speed v at range d1 and AoA theta:
/// nu = (2 f_c / c) v sqrt(1/2 + (d1 + d0 sin t) / (2 sqrt(d1^2 + d0^2 + 2 d1 d0 sin t))).
double doppler_from_velocity(double speed_mps, double range_m, double baseline_m,
                             double aoa_rad, double carrier_frequency_hz);

/// Intersects the iso-delay ellipse with the AoA ray. The returned position is
/// in the canonical frame (gNB at origin, UE at (d0, 0)).
///
/// AoA convention (fixed by the round-trip identity with target_range):
/// theta is measured at the gNB from the perpendicular of the gNB->UE
/// baseline, positive rotating away from the UE.  With unit baseline
/// direction u and left normal n, the target direction is
/// dir(theta) = cos(theta) n - sin(theta) u:
///
///        n (theta = 0)
///        ^    * target
///        |   /
///        |  / theta < 0 here (leaning toward the UE)
///        | /
///   gNB  o----------------> u   UE
///
double aoa_of_target(const BistaticScene& scene);

/// Throws GeometryError on negative delta_tau or degenerate denominator.
Localization localize(double delta_tau_s, double aoa_rad, double baseline_m);

}  // namespace isac
