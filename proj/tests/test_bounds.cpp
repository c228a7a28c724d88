// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <array>
#include <cmath>
#include <vector>

#include "isac/bounds.hpp"
#include "isac/errors.hpp"
#include "isac/harq_link.hpp"
#include "isac/rng.hpp"

using namespace isac;

namespace {

ReSums brute_sums(const ReSet& set) {
  ReSums s;
  for (int l = 0; l < set.num_symbols(); ++l)
    for (int k = 0; k < set.num_subcarriers(); ++k)
      if (set.contains(k, l)) {
        ++s.n;
        s.s_k += k;
        s.s_l += l;
        s.s_kk += static_cast<std::uint64_t>(k) * k;
        s.s_ll += static_cast<std::uint64_t>(l) * l;
        s.s_kl += static_cast<std::uint64_t>(k) * l;
      }
  return s;
}

bool sums_equal(const ReSums& a, const ReSums& b) {
  return a.n == b.n && a.s_k == b.s_k && a.s_l == b.s_l && a.s_kk == b.s_kk &&
         a.s_ll == b.s_ll && a.s_kl == b.s_kl;
}

// Finite-difference oracle: the information matrix from central differences of
// the per-RE signal s(h, phi, tau, nu) = h e^{j phi} e^{-j2pi k df tau} e^{j2pi l ts nu}.
FisherMatrix fisher_by_finite_differences(double h, double phi, double tau, double nu,
                                          double sigma2, const ReSet& set, double df,
                                          double ts, double rel_step = 1e-6) {
  const auto signal = [&](const std::array<double, 4>& p) {
    std::vector<Complex> s;
    s.reserve(set.count());
    for (int l = 0; l < set.num_symbols(); ++l)
      for (int k = 0; k < set.num_subcarriers(); ++k) {
        if (!set.contains(k, l)) continue;
        const double phase = p[1] - kTwoPi * df * p[2] * k + kTwoPi * ts * p[3] * l;
        s.push_back(p[0] * Complex(std::cos(phase), std::sin(phase)));
      }
    return s;
  };

  const std::array<double, 4> center{h, phi, tau, nu};
  std::array<std::vector<Complex>, 4> derivative;
  for (int i = 0; i < 4; ++i) {
    const double step = rel_step * std::max(std::abs(center[i]), 1.0);
    std::array<double, 4> plus = center, minus = center;
    plus[i] += step;
    minus[i] -= step;
    const auto sp = signal(plus);
    const auto sm = signal(minus);
    derivative[i].resize(sp.size());
    for (std::size_t idx = 0; idx < sp.size(); ++idx)
      derivative[i][idx] = (sp[idx] - sm[idx]) / (2.0 * step);
  }

  FisherMatrix f;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      double acc = 0.0;
      for (std::size_t idx = 0; idx < derivative[i].size(); ++idx)
        acc += std::real(std::conj(derivative[i][idx]) * derivative[j][idx]);
      f.m[i][j] = 2.0 / sigma2 * acc;
    }
  return f;
}

void check_fisher_close(const FisherMatrix& a, const FisherMatrix& b, double tol) {
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      const double scale = std::sqrt(a.m[i][i] * a.m[j][j]);
      CHECK(std::abs(a.m[i][j] - b.m[i][j]) <= tol * scale);
    }
}

}  // namespace

TEST_SUITE("bounds") {

TEST_CASE("re_sums on a 4x2 grid and a single RE") {
  const ReSet full = ReSet::full(4, 2);
  const ReSums s = re_sums(full);
  CHECK(s.n == 8);
  CHECK(s.s_k == 12);
  CHECK(s.s_l == 4);
  CHECK(s.s_kk == 28);
  CHECK(s.s_ll == 4);
  CHECK(s.s_kl == 6);
  CHECK(sums_equal(s, ReSums::full_grid(4, 2)));

  ReSet single(8, 8);
  single.set(3, 5, true);
  const ReSums one = re_sums(single);
  CHECK(one.n == 1);
  CHECK(one.s_k == 3);
  CHECK(one.s_l == 5);
  CHECK(one.s_kk == 9);
  CHECK(one.s_ll == 25);
  CHECK(one.s_kl == 15);

  CHECK_THROWS_AS(re_sums(ReSet(4, 4)), std::invalid_argument);
}

TEST_CASE("full-grid closed forms match enumeration at Table-I size") {
  CHECK(sums_equal(ReSums::full_grid(1272, 14), brute_sums(ReSet::full(1272, 14))));
}

TEST_CASE("fisher matrix entries on the 4x2 grid") {
  const FisherMatrix f = fisher_matrix(1.0, 1.0, re_sums(ReSet::full(4, 2)), 1.0, 1.0);
  CHECK(f(SensingParam::Delay, SensingParam::Delay) ==
        doctest::Approx(2.0 * kTwoPi * kTwoPi * 28.0).epsilon(1e-12));
  CHECK(f(SensingParam::Amplitude, SensingParam::Amplitude) == doctest::Approx(16.0));
  // Row/column of the amplitude decouples.
  for (int j = 1; j < 4; ++j) {
    CHECK(f(0, j) == 0.0);
    CHECK(f(j, 0) == 0.0);
  }
  // Symmetry.
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) CHECK(f(i, j) == f(j, i));

  CHECK_THROWS_AS(fisher_matrix(0.0, 1.0, re_sums(ReSet::full(4, 2)), 1.0, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(fisher_matrix(1.0, 0.0, re_sums(ReSet::full(4, 2)), 1.0, 1.0),
                  std::invalid_argument);
}

TEST_CASE("fisher closed form matches the finite-difference definition") {
  const double h = 0.8, phi = 0.9, tau = 0.37, nu = 0.21, sigma2 = 0.5;
  const double df = 1.0, ts = 1.25;

  SUBCASE("full 8x4 grid") {
    const ReSet set = ReSet::full(8, 4);
    const FisherMatrix closed = fisher_matrix(h, sigma2, re_sums(set), df, ts);
    const FisherMatrix fd = fisher_by_finite_differences(h, phi, tau, nu, sigma2, set, df, ts);
    check_fisher_close(closed, fd, 1e-6);
  }

  SUBCASE("two-symbol pilot subset") {
    const ReSet set = ReSet::from_symbols(8, 4, {1, 3});
    const FisherMatrix closed = fisher_matrix(h, sigma2, re_sums(set), df, ts);
    const FisherMatrix fd = fisher_by_finite_differences(h, phi, tau, nu, sigma2, set, df, ts);
    check_fisher_close(closed, fd, 1e-6);
  }
}

TEST_CASE("fisher matrix is positive semidefinite") {
  Rng rng(41);
  const ReSet set = ReSet::from_symbols(16, 8, {1, 4, 6});
  const FisherMatrix f = fisher_matrix(0.7, 0.3, re_sums(set), 1.1, 0.9);
  for (int trial = 0; trial < 200; ++trial) {
    std::array<double, 4> x{};
    for (double& v : x) v = uniform_range(rng, -1.0, 1.0);
    // balance the wildly different parameter scales; quad is then O(1)
    for (int i = 0; i < 4; ++i) x[i] /= std::sqrt(f.m[i][i]);
    double quad = 0.0;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) quad += x[i] * f.m[i][j] * x[j];
    CHECK(quad >= -1e-12);
  }
}

TEST_CASE("delay information scales with the squared amplitude") {
  const ReSums sums = ReSums::full_grid(16, 8);
  const FisherMatrix f1 = fisher_matrix(1.0, 1.0, sums, 1.0, 1.0);
  const FisherMatrix f2 = fisher_matrix(2.0, 1.0, sums, 1.0, 1.0);
  CHECK(f2(SensingParam::Delay, SensingParam::Delay) /
            f1(SensingParam::Delay, SensingParam::Delay) ==
        doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("crlb: inverse-matrix dominance, noise scaling, singular sets") {
  SlotConfig slot;  // Table-I
  const double df = slot.subcarrier_spacing_hz;
  const double ts = slot.symbol_duration_s();
  const ReSums full = ReSums::full_grid(slot.num_subcarriers, slot.num_symbols);

  const SensingBounds b = crlb(fisher_matrix(0.316, 0.1, full, df, ts));
  REQUIRE(b.full_bound.has_value());
  // Equality holds for the decoupled amplitude row; allow rounding there.
  for (int i = 0; i < 4; ++i) CHECK((*b.full_bound)[i] >= b.diag_bound[i] * (1.0 - 1e-12));

  // Halving sigma^2 halves every bound.
  const SensingBounds half = crlb(fisher_matrix(0.316, 0.05, full, df, ts));
  for (int i = 0; i < 4; ++i) {
    CHECK(b.diag_bound[i] / half.diag_bound[i] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK((*b.full_bound)[i] / (*half.full_bound)[i] == doctest::Approx(2.0).epsilon(1e-12));
  }

  // A single RE cannot jointly identify (phi, tau, nu): full bound unavailable.
  ReSet single(8, 8);
  single.set(3, 5, true);
  const SensingBounds degenerate = crlb(fisher_matrix(1.0, 1.0, re_sums(single), 1.0, 1.0));
  CHECK(!degenerate.full_bound.has_value());
  CHECK(degenerate.diag_bound[0] > 0.0);
}

TEST_CASE("fewer, clustered pilot symbols loosen the Doppler bound") {
  SlotConfig slot;
  const double df = slot.subcarrier_spacing_hz;
  const double ts = slot.symbol_duration_s();
  const ReSet dmrs = ReSet::from_symbols(slot.num_subcarriers, slot.num_symbols, {2, 11});
  const ReSet full = ReSet::full(slot.num_subcarriers, slot.num_symbols);

  const SensingBounds b_dmrs = crlb(fisher_matrix(0.316, 0.1, re_sums(dmrs), df, ts));
  const SensingBounds b_full = crlb(fisher_matrix(0.316, 0.1, re_sums(full), df, ts));

  const int nu = static_cast<int>(SensingParam::Doppler);
  CHECK(b_dmrs.diag_bound[nu] > b_full.diag_bound[nu]);
  CHECK((*b_dmrs.full_bound)[nu] > (*b_full.full_bound)[nu]);

  // Enlarging the RE set never loosens any bound.
  for (int i = 0; i < 4; ++i) {
    CHECK(b_full.diag_bound[i] <= b_dmrs.diag_bound[i]);
    CHECK((*b_full.full_bound)[i] <= (*b_dmrs.full_bound)[i]);
  }
}

TEST_CASE("harq round statistics: rho, expected rounds, throughput") {
  CHECK(expected_rounds({0.0, 0.9, 0.9, 0.9}) == 1.0);
  CHECK(rho({0.0, 0.9, 0.9, 0.9}) == 1.0);
  CHECK(expected_rounds({1.0, 1.0, 1.0, 1.0}) == 4.0);
  CHECK(rho({1.0, 1.0, 1.0, 1.0}) == 0.0);

  const std::array<double, 4> p{0.5, 0.25, 0.1, 0.05};
  CHECK(expected_rounds(p) == doctest::Approx(1.6375).epsilon(1e-15));
  CHECK(rho(p) == doctest::Approx(0.6103053435114504).epsilon(1e-12));

  CHECK(round_probabilities_monotone(p));
  CHECK(!round_probabilities_monotone({0.1, 0.5, 0.1, 0.05}));

  CHECK_THROWS_AS(rho({1.5, 0, 0, 0}), std::invalid_argument);
  CHECK_THROWS_AS(rho({-0.1, 0, 0, 0}), std::invalid_argument);

  const McsEntry mcs0 = mcs_from_index(0);
  CHECK(throughput_analytic({0, 0, 0, 0}, 15264, mcs0) == 3577.5);
  CHECK(throughput_analytic({1, 1, 1, 1}, 15264, mcs0) == 0.0);
  CHECK(throughput_analytic(p, 15264, mcs0) ==
        doctest::Approx(3577.5 * 0.6103053435114504).epsilon(1e-12));
}

TEST_CASE("mse mixture interpolates between the scenario values") {
  const std::array<double, 4> p{0.5, 0.25, 0.1, 0.05};
  CHECK(mse_mix(4.0, 1.0, p) == doctest::Approx(2.1690839694656489).epsilon(1e-12));
  CHECK(mse_mix(4.0, 1.0, {0, 0, 0, 0}) == 1.0);
  CHECK(mse_mix(4.0, 1.0, {1, 1, 1, 1}) == 4.0);

  Rng rng(3);
  for (int i = 0; i < 500; ++i) {
    std::array<double, 4> q{};
    for (double& v : q) v = uniform01(rng);
    const double mse1 = 1.0 + 9.0 * uniform01(rng);
    const double mse2 = uniform_range(rng, 0.0, mse1);
    const double mixed = mse_mix(mse1, mse2, q);
    CHECK(mixed >= mse2 - 1e-12);
    CHECK(mixed <= mse1 + 1e-12);
  }
}

}  // TEST_SUITE
