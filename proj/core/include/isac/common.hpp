// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <complex>

namespace isac {

using Complex = std::complex<double>;

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s
inline constexpr double kTwoPi = 6.28318530717958647692528676655900577;

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }

}  // namespace isac
