// SPDX-License-Identifier: Apache-2.0
#include "isac/bounds.hpp"

#include <cmath>
#include <stdexcept>

#include "isac/errors.hpp"
#include "isac/harq_link.hpp"

namespace isac {

ReSums ReSums::full_grid(int num_subcarriers, int num_symbols) {
  const std::uint64_t K = static_cast<std::uint64_t>(num_subcarriers);
  const std::uint64_t L = static_cast<std::uint64_t>(num_symbols);
  ReSums s;
  s.n = K * L;
  s.s_k = L * (K * (K - 1) / 2);
  s.s_l = K * (L * (L - 1) / 2);
  s.s_kk = L * ((K - 1) * K * (2 * K - 1) / 6);
  s.s_ll = K * ((L - 1) * L * (2 * L - 1) / 6);
  s.s_kl = (K * (K - 1) / 2) * (L * (L - 1) / 2);
  return s;
}

ReSums re_sums(const ReSet& set) {
  if (set.count() == 0) throw std::invalid_argument("re_sums: empty RE set");
  ReSums s;
  for (int l = 0; l < set.num_symbols(); ++l) {
    for (int k = 0; k < set.num_subcarriers(); ++k) {
      if (!set.contains(k, l)) continue;
      const std::uint64_t uk = static_cast<std::uint64_t>(k);
      const std::uint64_t ul = static_cast<std::uint64_t>(l);
      ++s.n;
      s.s_k += uk;
      s.s_l += ul;
      s.s_kk += uk * uk;
      s.s_ll += ul * ul;
      s.s_kl += uk * ul;
    }
  }
  return s;
}

FisherMatrix fisher_matrix(double amplitude, double noise_variance, const ReSums& sums,
                           double subcarrier_spacing_hz, double symbol_duration_s) {
  if (!(amplitude > 0.0)) throw std::invalid_argument("fisher_matrix: amplitude must be > 0");
  if (!(noise_variance > 0.0))
    throw std::invalid_argument("fisher_matrix: noise variance must be > 0");

  const double c = 2.0 / noise_variance;
  const double h2 = amplitude * amplitude;
  const double df = subcarrier_spacing_hz;
  const double ts = symbol_duration_s;
  const double n = static_cast<double>(sums.n);
  const double sk = static_cast<double>(sums.s_k);
  const double sl = static_cast<double>(sums.s_l);
  const double skk = static_cast<double>(sums.s_kk);
  const double sll = static_cast<double>(sums.s_ll);
  const double skl = static_cast<double>(sums.s_kl);

  FisherMatrix f;
  f.m[0][0] = c * n;
  f.m[1][1] = c * h2 * n;
  f.m[1][2] = f.m[2][1] = -c * kTwoPi * h2 * df * sk;
  f.m[1][3] = f.m[3][1] = c * kTwoPi * h2 * ts * sl;
  f.m[2][2] = c * kTwoPi * kTwoPi * h2 * df * df * skk;
  f.m[2][3] = f.m[3][2] = -c * kTwoPi * kTwoPi * h2 * df * ts * skl;
  f.m[3][3] = c * kTwoPi * kTwoPi * h2 * ts * ts * sll;
  return f;
}

namespace {

// Gauss-Jordan inverse of the diagonally-rescaled matrix; returns false when a
// pivot collapses (singular input).
bool invert4(const std::array<std::array<double, 4>, 4>& in,
             std::array<std::array<double, 4>, 4>& out) {
  double a[4][8];
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      a[i][j] = in[i][j];
      a[i][j + 4] = (i == j) ? 1.0 : 0.0;
    }

  for (int col = 0; col < 4; ++col) {
    int pivot = col;
    for (int r = col + 1; r < 4; ++r)
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    if (std::abs(a[pivot][col]) < 1e-12) return false;
    if (pivot != col)
      for (int j = 0; j < 8; ++j) std::swap(a[pivot][j], a[col][j]);

    const double inv = 1.0 / a[col][col];
    for (int j = 0; j < 8; ++j) a[col][j] *= inv;
    for (int r = 0; r < 4; ++r) {
      if (r == col) continue;
      const double factor = a[r][col];
      if (factor == 0.0) continue;
      for (int j = 0; j < 8; ++j) a[r][j] -= factor * a[col][j];
    }
  }
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) out[i][j] = a[i][j + 4];
  return true;
}

}  // namespace

SensingBounds crlb(const FisherMatrix& fisher) {
  SensingBounds out;
  std::array<double, 4> scale{};
  for (int i = 0; i < 4; ++i) {
    if (!(fisher.m[i][i] > 0.0))
      throw std::invalid_argument("crlb: non-positive Fisher diagonal entry");
    out.diag_bound[i] = 1.0 / fisher.m[i][i];
    scale[i] = 1.0 / std::sqrt(fisher.m[i][i]);
  }

  // Rescale to unit diagonal before inverting; pivots then measure true rank.
  std::array<std::array<double, 4>, 4> balanced{}, inv{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) balanced[i][j] = fisher.m[i][j] * scale[i] * scale[j];

  if (invert4(balanced, inv)) {
    std::array<double, 4> full{};
    for (int i = 0; i < 4; ++i) full[i] = inv[i][i] * scale[i] * scale[i];
    out.full_bound = full;
  }
  return out;
}

namespace {

void check_probabilities(const std::array<double, 4>& p) {
  for (double v : p)
    if (!(v >= 0.0 && v <= 1.0))
      throw std::invalid_argument("round error probabilities must lie in [0, 1]");
}

}  // namespace

double expected_rounds(const std::array<double, 4>& p) {
  check_probabilities(p);
  return 1.0 + p[0] + p[0] * p[1] + p[0] * p[1] * p[2];
}

double rho(const std::array<double, 4>& p) {
  check_probabilities(p);
  const double all_fail = p[0] * p[1] * p[2] * p[3];
  return (1.0 - all_fail) / expected_rounds(p);
}

bool round_probabilities_monotone(const std::array<double, 4>& p) {
  return p[0] >= p[1] && p[1] >= p[2] && p[2] >= p[3];
}

double mse_mix(double mse_scenario1, double mse_scenario2,
               const std::array<double, 4>& p) {
  const double r = rho(p);
  return (1.0 - r) * mse_scenario1 + r * mse_scenario2;
}

double throughput_analytic(const std::array<double, 4>& p, std::uint64_t num_data_res,
                           const McsEntry& mcs) {
  const double r = rho(p);
  return static_cast<double>(num_data_res) * mcs.modulation_order * mcs.code_rate * r;
}

}  // namespace isac
