// SPDX-License-Identifier: Apache-2.0
#include "isac/sensing.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

#include "isac/errors.hpp"

namespace isac {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

// One forward-2D plan per (nf, nt) per thread. FFTW_ESTIMATE keeps the plan
// choice (and thus the output bits) independent of runtime timing.
class FftEngine {
 public:
  ~FftEngine() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    for (auto& [dims, entry] : plans_) {
      fftw_destroy_plan(entry.plan);
      fftw_free(entry.in);
      fftw_free(entry.out);
    }
  }

  // Transforms `input` (nf x nt row-major) forward in place of the internal
  // buffers and returns the output buffer.
  const fftw_complex* forward(int nf, int nt, const std::vector<Complex>& input) {
    Entry& e = entry_for(nf, nt);
    auto* in = reinterpret_cast<Complex*>(e.in);
    std::copy(input.begin(), input.end(), in);
    fftw_execute(e.plan);
    return e.out;
  }

 private:
  struct Entry {
    fftw_complex* in = nullptr;
    fftw_complex* out = nullptr;
    fftw_plan plan = nullptr;
  };

  Entry& entry_for(int nf, int nt) {
    auto it = plans_.find({nf, nt});
    if (it != plans_.end()) return it->second;

    std::lock_guard<std::mutex> lock(planner_mutex());
    Entry e;
    const std::size_t n = static_cast<std::size_t>(nf) * nt;
    e.in = fftw_alloc_complex(n);
    e.out = fftw_alloc_complex(n);
    e.plan = fftw_plan_dft_2d(nf, nt, e.in, e.out, FFTW_FORWARD, FFTW_ESTIMATE);
    return plans_.emplace(std::make_pair(nf, nt), e).first->second;
  }

  std::map<std::pair<int, int>, Entry> plans_;
};

FftEngine& fft_engine() {
  thread_local FftEngine engine;
  return engine;
}

struct MaskedEntry {
  int k;
  int l;
  Complex z;
};

std::vector<MaskedEntry> collect_masked(const SensingMeasurement& m) {
  std::vector<MaskedEntry> entries;
  entries.reserve(m.mask.count());
  for (int l = 0; l < m.z.num_symbols(); ++l)
    for (int k = 0; k < m.z.num_subcarriers(); ++k)
      if (m.mask.contains(k, l)) entries.push_back({k, l, m.z.at(k, l)});
  return entries;
}

// Correlation C(a, b) = sum z exp(j 2pi (k a / nf - l b / nt)) together with
// the index-weighted sums needed for its first and second derivatives.
struct CorrelationSums {
  Complex c, ck, cl, ckk, ckl, cll;
};

CorrelationSums correlation_sums(const std::vector<MaskedEntry>& entries, int K, int L,
                                 int nf, int nt, double a, double b) {
  std::vector<Complex> col(K), row(L);
  for (int k = 0; k < K; ++k) {
    const double phase = kTwoPi * a * k / nf;
    col[k] = Complex(std::cos(phase), std::sin(phase));
  }
  for (int l = 0; l < L; ++l) {
    const double phase = -kTwoPi * b * l / nt;
    row[l] = Complex(std::cos(phase), std::sin(phase));
  }

  CorrelationSums s{};
  for (const MaskedEntry& e : entries) {
    const Complex term = e.z * col[e.k] * row[e.l];
    const double k = e.k;
    const double l = e.l;
    s.c += term;
    s.ck += k * term;
    s.cl += l * term;
    s.ckk += k * k * term;
    s.ckl += k * l * term;
    s.cll += l * l * term;
  }
  return s;
}

double power_of(const CorrelationSums& s) { return std::norm(s.c); }

// Log-domain three-point parabolic offset, clamped to half a bin.
double parabolic_offset(double p_minus, double p_center, double p_plus) {
  if (!(p_minus > 0.0) || !(p_center > 0.0) || !(p_plus > 0.0)) return 0.0;
  const double lm = std::log(p_minus);
  const double lc = std::log(p_center);
  const double lp = std::log(p_plus);
  const double denom = lm - 2.0 * lc + lp;
  if (!(denom < 0.0)) return 0.0;  // not a local maximum
  return std::clamp(0.5 * (lm - lp) / denom, -0.5, 0.5);
}

// Newton ascent on |C|^2 in continuous bin coordinates. Starts at the
// parabolic seed and converges to the local maximum of the correlation
// surface; each iteration costs one pass over the masked entries.
void newton_refine(const std::vector<MaskedEntry>& entries, int K, int L, int nf, int nt,
                   double& a, double& b) {
  const double wf = kTwoPi / nf;
  const double wt = kTwoPi / nt;
  constexpr int kMaxIterations = 40;
  constexpr double kTolerance = 1e-10;  // bins

  CorrelationSums s = correlation_sums(entries, K, L, nf, nt, a, b);
  double q = power_of(s);

  for (int iter = 0; iter < kMaxIterations; ++iter) {
    const Complex c = s.c;
    const Complex ca = Complex(0, wf) * s.ck;
    const Complex cb = Complex(0, -wt) * s.cl;
    const Complex caa = -wf * wf * s.ckk;
    const Complex cbb = -wt * wt * s.cll;
    const Complex cab = wf * wt * s.ckl;

    const double ga = 2.0 * std::real(ca * std::conj(c));
    const double gb = 2.0 * std::real(cb * std::conj(c));
    const double haa = 2.0 * std::real(caa * std::conj(c)) + 2.0 * std::norm(ca);
    const double hbb = 2.0 * std::real(cbb * std::conj(c)) + 2.0 * std::norm(cb);
    const double hab = 2.0 * std::real(cab * std::conj(c)) + 2.0 * std::real(ca * std::conj(cb));

    const double det = haa * hbb - hab * hab;
    if (!(haa < 0.0) || !(det > 0.0)) break;  // not negative definite here

    double da = -(hbb * ga - hab * gb) / det;
    double db = -(haa * gb - hab * ga) / det;

    const double mag = std::max(std::abs(da), std::abs(db));
    if (mag > 0.75) {  // keep steps inside the current mainlobe
      da *= 0.75 / mag;
      db *= 0.75 / mag;
    }

    bool improved = false;
    for (int halving = 0; halving < 6; ++halving) {
      const CorrelationSums trial = correlation_sums(entries, K, L, nf, nt, a + da, b + db);
      const double q_trial = power_of(trial);
      if (q_trial >= q) {
        a += da;
        b += db;
        s = trial;
        q = q_trial;
        improved = true;
        break;
      }
      da *= 0.5;
      db *= 0.5;
    }
    if (!improved) break;
    if (std::abs(da) < kTolerance && std::abs(db) < kTolerance) break;
  }
}

}  // namespace

SensingMeasurement form_measurement(const ResourceGrid& residual,
                                    const ResourceGrid& known_symbols, const ReSet& mask) {
  if (residual.num_subcarriers() != known_symbols.num_subcarriers() ||
      residual.num_symbols() != known_symbols.num_symbols())
    throw std::invalid_argument("form_measurement: grid dimensions mismatch");
  if (mask.num_subcarriers() != residual.num_subcarriers() ||
      mask.num_symbols() != residual.num_symbols())
    throw std::invalid_argument("form_measurement: mask dimensions mismatch");

  const int K = residual.num_subcarriers();
  const int L = residual.num_symbols();
  SensingMeasurement out{ResourceGrid(K, L), mask,
                         mask.count() == static_cast<std::size_t>(K) * L ? Scenario::AllRe
                                                                         : Scenario::DmrsOnly};
  for (int l = 0; l < L; ++l) {
    for (int k = 0; k < K; ++k) {
      if (!mask.contains(k, l)) continue;
      const Complex x = known_symbols.at(k, l);
      if (std::abs(std::abs(x) - 1.0) > 1e-9)
        throw std::invalid_argument("form_measurement: non-unit-modulus symbol inside mask");
      out.z.at(k, l) = residual.at(k, l) * std::conj(x);
    }
  }
  return out;
}

PeriodogramGrid periodogram(const SensingMeasurement& measurement,
                            const EstimatorConfig& config, const SlotConfig& slot) {
  if (config.delay_oversampling < 1 || config.doppler_oversampling < 1)
    throw std::invalid_argument("periodogram: oversampling factors must be >= 1");
  if (measurement.mask.count() == 0)
    throw EstimationError("periodogram: empty measurement mask");
  if (measurement.z.num_subcarriers() != slot.num_subcarriers ||
      measurement.z.num_symbols() != slot.num_symbols)
    throw std::invalid_argument("periodogram: measurement does not match slot dimensions");

  const int K = slot.num_subcarriers;
  const int L = slot.num_symbols;
  const int nf = config.delay_oversampling * K;
  const int nt = config.doppler_oversampling * L;

  std::vector<Complex> padded(static_cast<std::size_t>(nf) * nt, Complex(0, 0));
  for (int l = 0; l < L; ++l)
    for (int k = 0; k < K; ++k)
      if (measurement.mask.contains(k, l))
        padded[static_cast<std::size_t>(k) * nt + l] = measurement.z.at(k, l);

  const fftw_complex* out = fft_engine().forward(nf, nt, padded);

  PeriodogramGrid grid;
  grid.delay_bins = nf;
  grid.doppler_bins = nt;
  grid.delay_step_s = slot.data_duration_s() / nf;
  grid.doppler_step_hz = 1.0 / (static_cast<double>(nt) * slot.symbol_duration_s());
  grid.power.resize(static_cast<std::size_t>(nf) * nt);

  double best = -1.0;
  for (int a = 0; a < nf; ++a) {
    // The delay correlation uses e^{+j...}: read the forward FFT mirrored.
    const std::size_t src_row = static_cast<std::size_t>((nf - a) % nf) * nt;
    const std::size_t dst_row = static_cast<std::size_t>(a) * nt;
    for (int b = 0; b < nt; ++b) {
      const fftw_complex& v = out[src_row + b];
      const double p = v[0] * v[0] + v[1] * v[1];
      grid.power[dst_row + b] = p;
      if (p > best) {
        best = p;
        grid.peak_delay_index = a;
        grid.peak_doppler_index = b;
      }
    }
  }
  return grid;
}

SensingEstimate estimate_ml(const SensingMeasurement& measurement,
                            const EstimatorConfig& config, const SlotConfig& slot) {
  const PeriodogramGrid grid = periodogram(measurement, config, slot);
  const int nf = grid.delay_bins;
  const int nt = grid.doppler_bins;
  const int K = slot.num_subcarriers;
  const int L = slot.num_symbols;

  double a = static_cast<double>(grid.peak_delay_index);
  double b = (2 * static_cast<int>(grid.peak_doppler_index) < nt)
                 ? static_cast<double>(grid.peak_doppler_index)
                 : static_cast<double>(grid.peak_doppler_index) - nt;

  const std::vector<MaskedEntry> entries = collect_masked(measurement);

  if (config.refine) {
    const auto power_at = [&](int da, int db) {
      const std::size_t ia = (grid.peak_delay_index + nf + da) % nf;
      const std::size_t ib = (grid.peak_doppler_index + nt + db) % nt;
      return grid.power_at(ia, ib);
    };
    const double p0 = power_at(0, 0);
    a += parabolic_offset(power_at(-1, 0), p0, power_at(1, 0));
    b += parabolic_offset(power_at(0, -1), p0, power_at(0, 1));
    newton_refine(entries, K, L, nf, nt, a, b);
  }

  // Wrap into the canonical windows: delay in [0, nf), Doppler in [-nt/2, nt/2).
  a = std::fmod(a, static_cast<double>(nf));
  if (a < 0.0) a += nf;
  b = std::remainder(b, static_cast<double>(nt));
  if (b >= nt / 2.0) b -= nt;

  const CorrelationSums sums = correlation_sums(entries, K, L, nf, nt, a, b);

  SensingEstimate est;
  est.tau_hat_s = a * grid.delay_step_s;
  est.nu_hat_hz = b * grid.doppler_step_hz;
  est.alpha_hat = sums.c / static_cast<double>(entries.size());
  est.peak_value = power_of(sums);
  return est;
}

std::pair<ReSet, Scenario> select_scenario(bool decoded, const ReSet& dmrs_set) {
  if (decoded)
    return {ReSet::full(dmrs_set.num_subcarriers(), dmrs_set.num_symbols()), Scenario::AllRe};
  return {dmrs_set, Scenario::DmrsOnly};
}

}  // namespace isac
