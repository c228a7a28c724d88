// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <optional>

#include "isac/grid.hpp"

namespace isac {

/// Index sums over a resource-element set, exact integers.
struct ReSums {
  std::uint64_t n = 0;    // |set|
  std::uint64_t s_k = 0;  // sum k
  std::uint64_t s_l = 0;  // sum l
  std::uint64_t s_kk = 0; // sum k^2
  std::uint64_t s_ll = 0; // sum l^2
  std::uint64_t s_kl = 0; // sum k*l

  /// Closed forms for the full K x L grid.
  static ReSums full_grid(int num_subcarriers, int num_symbols);
};

/// Parameter order of the 4x4 information matrix and the derived bounds.
enum class SensingParam : int { Amplitude = 0, Phase = 1, Delay = 2, Doppler = 3 };

struct FisherMatrix {
  std::array<std::array<double, 4>, 4> m{};  // symmetric, (h, phi, tau, nu)

  double operator()(int i, int j) const { return m[i][j]; }
  double operator()(SensingParam i, SensingParam j) const {
    return m[static_cast<int>(i)][static_cast<int>(j)];
  }
};

/// Per-parameter lower bounds in natural units (s^2 for delay, Hz^2 for Doppler).
/// diag_bound is the reciprocal-diagonal form; full_bound the diagonal of the
/// matrix inverse (absent when the matrix is singular).
struct SensingBounds {
  std::array<double, 4> diag_bound{};
  std::optional<std::array<double, 4>> full_bound;

  double diag(SensingParam p) const { return diag_bound[static_cast<int>(p)]; }
};

/// Throws std::invalid_argument on an empty set.
ReSums re_sums(const ReSet& set);

/// Information matrix for a unit-modulus single-path observation with
/// amplitude h over the RE set described by `sums`.
/// Throws std::invalid_argument unless h > 0 and sigma^2 > 0.
FisherMatrix fisher_matrix(double amplitude, double noise_variance, const ReSums& sums,
                           double subcarrier_spacing_hz, double symbol_duration_s);

SensingBounds crlb(const FisherMatrix& fisher);

/// Expected HARQ rounds E[X] = 1 + P1 + P1 P2 + P1 P2 P3.
double expected_rounds(const std::array<double, 4>& round_error_prob);

/// Fraction of slots whose TB decodes in that slot: (1 - prod P_i) / E[X].
double rho(const std::array<double, 4>& round_error_prob);

/// True when the per-round error probabilities are non-increasing.
bool round_probabilities_monotone(const std::array<double, 4>& round_error_prob);

/// HARQ-weighted MSE mixture (1 - rho) mse1 + rho mse2.
double mse_mix(double mse_scenario1, double mse_scenario2,
               const std::array<double, 4>& round_error_prob);

struct McsEntry;  // harq_link.hpp

/// Average bits/slot: N_d Q R (1 - prod P_i) / E[X].
double throughput_analytic(const std::array<double, 4>& round_error_prob,
                           std::uint64_t num_data_res, const McsEntry& mcs);

}  // namespace isac
