#include "attractors/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <numeric>
#include <optional>

#include "attractors/error.hpp"

namespace attractors::spectral {

namespace {

constexpr std::size_t kMinSamples = 16;
constexpr std::size_t kMaxCombinationBases = 12;

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};
template <class T>
using FftwBuffer = std::unique_ptr<T[], FftwFree>;

template <class T>
FftwBuffer<T> fftw_buffer(std::size_t n) {
  auto* p = static_cast<T*>(fftw_malloc(sizeof(T) * n));
  if (!p) throw std::bad_alloc();
  return FftwBuffer<T>(p);
}

// Plan creation is not thread-safe in FFTW; plans are built on the calling
// thread and only executed (new-array execute) inside parallel regions.
class R2cPlan {
 public:
  explicit R2cPlan(std::size_t n) : n_(n) {
    auto in = fftw_buffer<double>(n);
    auto out = fftw_buffer<fftw_complex>(n / 2 + 1);
    plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), in.get(), out.get(), FFTW_ESTIMATE);
    if (!plan_) throw Error(ErrorCode::InvalidArgument, "FFTW could not plan a transform");
  }
  ~R2cPlan() { fftw_destroy_plan(plan_); }
  R2cPlan(const R2cPlan&) = delete;
  R2cPlan& operator=(const R2cPlan&) = delete;

  void execute(double* in, fftw_complex* out) const { fftw_execute_dft_r2c(plan_, in, out); }
  std::size_t size() const { return n_; }

 private:
  std::size_t n_;
  fftw_plan plan_ = nullptr;
};

void prepare_series(std::span<const double> series, bool detrend, Window window, double* out) {
  const std::size_t n = series.size();
  double mean = 0.0;
  if (detrend) {
    for (double v : series) mean += v;
    mean /= static_cast<double>(n);
  }
  for (std::size_t t = 0; t < n; ++t) {
    double v = series[t] - mean;
    if (window == Window::Hann)
      v *= 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(t) / static_cast<double>(n));
    out[t] = v;
  }
}

void power_from_transform(const fftw_complex* x, std::size_t n, double* power) {
  const std::size_t bins = n / 2 + 1;
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t k = 0; k < bins; ++k) {
    const double mag2 = x[k][0] * x[k][0] + x[k][1] * x[k][1];
    const bool unpaired = k == 0 || (n % 2 == 0 && k == n / 2);
    power[k] = (unpaired ? 1.0 : 2.0) * mag2 * inv_n;
  }
}

double refine_bin(const std::vector<double>& p, std::size_t k) {
  if (k == 0 || k + 1 >= p.size()) return static_cast<double>(k);
  const double a = p[k - 1], b = p[k], c = p[k + 1];
  if (!(a > 0.0 && b > 0.0 && c > 0.0)) return static_cast<double>(k);
  const double la = std::log(a), lb = std::log(b), lc = std::log(c);
  const double denom = la - 2.0 * lb + lc;
  if (!(denom < 0.0)) return static_cast<double>(k);
  const double delta = std::clamp(0.5 * (la - lc) / denom, -0.5, 0.5);
  return static_cast<double>(k) + delta;
}

// All integer combinations sum m_i f_i with |m_i| <= max_coeff over a block
// of base frequencies, sorted by value. Coefficients are stored flat.
struct CombinationTable {
  std::size_t width = 0;
  std::vector<double> sums;
  std::vector<int> coeffs;  // width entries per combination, same order as sums

  static CombinationTable build(const std::vector<double>& freqs, int max_coeff) {
    CombinationTable table;
    table.width = freqs.size();
    std::size_t count = 1;
    for (std::size_t i = 0; i < freqs.size(); ++i) count *= static_cast<std::size_t>(2 * max_coeff + 1);
    std::vector<double> sums(count);
    std::vector<int> coeffs(count * freqs.size());
    std::vector<int> m(freqs.size(), -max_coeff);
    for (std::size_t c = 0; c < count; ++c) {
      double s = 0.0;
      for (std::size_t i = 0; i < freqs.size(); ++i) {
        s += m[i] * freqs[i];
        coeffs[c * freqs.size() + i] = m[i];
      }
      sums[c] = s;
      for (std::size_t i = 0; i < m.size(); ++i) {
        if (++m[i] <= max_coeff) break;
        m[i] = -max_coeff;
      }
    }
    std::vector<std::size_t> order(count);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return sums[a] < sums[b]; });
    table.sums.resize(count);
    table.coeffs.resize(coeffs.size());
    for (std::size_t r = 0; r < count; ++r) {
      table.sums[r] = sums[order[r]];
      std::copy_n(coeffs.begin() + order[r] * freqs.size(), freqs.size(), table.coeffs.begin() + r * freqs.size());
    }
    return table;
  }

  bool all_zero(std::size_t row) const {
    for (std::size_t i = 0; i < width; ++i)
      if (coeffs[row * width + i] != 0) return false;
    return true;
  }
};

// Meet-in-the-middle search for the closest nontrivial combination of the
// given bases to `target`, within tol.
struct CombinationSearch {
  std::vector<std::size_t> base_peaks;
  std::vector<double> freqs;
  CombinationTable left, right;

  CombinationSearch(std::vector<std::size_t> peaks_idx, std::vector<double> f, int max_coeff)
      : base_peaks(std::move(peaks_idx)), freqs(std::move(f)) {
    const std::size_t half = freqs.size() / 2;
    left = CombinationTable::build({freqs.begin(), freqs.begin() + half}, max_coeff);
    right = CombinationTable::build({freqs.begin() + half, freqs.end()}, max_coeff);
  }

  std::optional<Explanation> explain(std::size_t peak, double target, double tol) const {
    double best_err = tol;
    std::optional<std::pair<std::size_t, std::size_t>> best;
    for (std::size_t r = 0; r < right.sums.size(); ++r) {
      const double need = target - right.sums[r];
      auto it = std::lower_bound(left.sums.begin(), left.sums.end(), need - tol);
      for (; it != left.sums.end() && *it <= need + tol; ++it) {
        const std::size_t l = static_cast<std::size_t>(it - left.sums.begin());
        if (left.all_zero(l) && right.all_zero(r)) continue;
        const double value = *it + right.sums[r];
        if (!(value > 0.0)) continue;
        const double err = std::abs(target - value);
        if (err <= best_err && (!best || err < best_err)) {
          best_err = err;
          best = {l, r};
        }
      }
    }
    if (!best) return std::nullopt;
    Explanation e;
    e.peak = peak;
    e.kind = Explanation::Kind::Combination;
    for (std::size_t i = 0; i < left.width; ++i)
      if (int m = left.coeffs[best->first * left.width + i]; m != 0) e.terms.emplace_back(base_peaks[i], m);
    for (std::size_t i = 0; i < right.width; ++i)
      if (int m = right.coeffs[best->second * right.width + i]; m != 0)
        e.terms.emplace_back(base_peaks[left.width + i], m);
    e.reconstructed = left.sums[best->first] + right.sums[best->second];
    return e;
  }
};

double median(std::vector<double> v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  if (v.size() % 2 == 1) return v[mid];
  const double upper = v[mid];
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

}  // namespace

std::vector<double> one_sided_power(std::span<const double> series, bool detrend, Window window) {
  if (series.size() < 2) throw Error(ErrorCode::TooShort, "series needs at least 2 samples");
  const std::size_t n = series.size();
  R2cPlan plan(n);
  auto in = fftw_buffer<double>(n);
  auto out = fftw_buffer<fftw_complex>(n / 2 + 1);
  prepare_series(series, detrend, window, in.get());
  plan.execute(in.get(), out.get());
  std::vector<double> power(n / 2 + 1);
  power_from_transform(out.get(), n, power.data());
  return power;
}

PowerSpectrum power_spectrum(const Trajectory& traj, const SpectrumOptions& opts) {
  const std::size_t n = traj.rows();
  const std::size_t d = traj.dim;
  if (n < kMinSamples)
    throw Error(ErrorCode::TooShort, "power spectrum needs at least 16 samples, got " + std::to_string(n));
  const double interval = opts.sample_interval > 0.0 ? opts.sample_interval : traj.dt;
  if (!(interval > 0.0)) throw Error(ErrorCode::InvalidArgument, "sample interval must be positive");

  const std::size_t bins = n / 2 + 1;
  std::vector<double> per_variable(d * bins);
  R2cPlan plan(n);

  const auto vars = static_cast<std::int64_t>(d);
#pragma omp parallel if (opts.parallel)
  {
    auto in = fftw_buffer<double>(n);
    auto out = fftw_buffer<fftw_complex>(bins);
    std::vector<double> column(n);
#pragma omp for schedule(static)
    for (std::int64_t j = 0; j < vars; ++j) {
      for (std::size_t t = 0; t < n; ++t) column[t] = traj.states[t * d + static_cast<std::size_t>(j)];
      prepare_series(column, opts.detrend, opts.window, in.get());
      plan.execute(in.get(), out.get());
      power_from_transform(out.get(), n, per_variable.data() + static_cast<std::size_t>(j) * bins);
    }
  }

  PowerSpectrum spec;
  spec.n_samples = n;
  spec.detrended = opts.detrend;
  spec.window = opts.window;
  spec.freqs.resize(bins);
  spec.power.assign(bins, 0.0);
  for (std::size_t k = 0; k < bins; ++k)
    spec.freqs[k] = static_cast<double>(k) / (static_cast<double>(n) * interval);
  // Fixed variable order keeps the average bit-stable under any thread count.
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t k = 0; k < bins; ++k) spec.power[k] += per_variable[j * bins + k];
  for (auto& p : spec.power) p /= static_cast<double>(d);

  spec.peak_raw_power = *std::max_element(spec.power.begin() + 1, spec.power.end());
  if (spec.peak_raw_power > 0.0)
    for (auto& p : spec.power) p /= spec.peak_raw_power;
  return spec;
}

std::vector<double> PeakSet::base_freqs() const {
  std::vector<double> f;
  for (std::size_t b : bases) f.push_back(peaks[b].freq);
  return f;
}

std::vector<std::size_t> PeakSet::candidates() const {
  if (filtered) return bases;
  std::vector<std::size_t> all(peaks.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return all;
}

PeakSet find_peaks(const PowerSpectrum& spec, double min_power) {
  if (!(min_power > 0.0 && min_power <= 1.0))
    throw Error(ErrorCode::InvalidArgument, "min_power must lie in (0, 1]");
  PeakSet set;
  const auto& p = spec.power;
  const double width = spec.bin_width();
  for (std::size_t k = 1; k + 1 < p.size(); ++k) {
    if (p[k] > p[k - 1] && p[k] > p[k + 1] && p[k] >= min_power)
      set.peaks.push_back({refine_bin(p, k) * width, p[k], k});
  }
  std::stable_sort(set.peaks.begin(), set.peaks.end(),
                   [](const Peak& a, const Peak& b) { return a.power > b.power; });
  set.tolerance = kDefaultToleranceBins * width;
  return set;
}

PeakSet filter_harmonics(PeakSet set, double tol) {
  if (!(tol >= 0.0)) throw Error(ErrorCode::InvalidArgument, "tolerance must be non-negative");
  std::vector<std::size_t> bases;
  for (std::size_t idx : set.candidates()) {
    const double f = set.peaks[idx].freq;
    bool explained = false;
    for (std::size_t b : bases) {
      const double fb = set.peaks[b].freq;
      const double m = std::round(f / fb);
      if (m >= 2.0 && std::abs(f - m * fb) <= tol) {
        set.explanations.push_back({idx, Explanation::Kind::Harmonic, {{b, static_cast<int>(m)}}, m * fb});
        explained = true;
        break;
      }
    }
    if (!explained) bases.push_back(idx);
  }
  set.bases = std::move(bases);
  set.tolerance = tol;
  set.filtered = true;
  return set;
}

PeakSet filter_linear_combinations(PeakSet set, double tol, int max_coeff) {
  if (!(tol >= 0.0)) throw Error(ErrorCode::InvalidArgument, "tolerance must be non-negative");
  if (max_coeff < 1) throw Error(ErrorCode::InvalidArgument, "max_coeff must be >= 1");
  std::vector<std::size_t> bases;
  std::optional<CombinationSearch> search;
  for (std::size_t idx : set.candidates()) {
    std::optional<Explanation> why;
    if (!bases.empty()) {
      if (!search) {
        std::vector<std::size_t> used(bases.begin(), bases.begin() + std::min(bases.size(), kMaxCombinationBases));
        std::vector<double> freqs;
        for (std::size_t b : used) freqs.push_back(set.peaks[b].freq);
        search.emplace(std::move(used), std::move(freqs), max_coeff);
      }
      why = search->explain(idx, set.peaks[idx].freq, tol);
    }
    if (why) {
      set.explanations.push_back(std::move(*why));
    } else {
      bases.push_back(idx);
      if (bases.size() <= kMaxCombinationBases) search.reset();
    }
  }
  set.bases = std::move(bases);
  set.tolerance = tol;
  set.filtered = true;
  return set;
}

std::string SpectrumClass::label() const {
  switch (kind) {
    case SpectrumKind::FixedPointLike: return "fixed_point_like";
    case SpectrumKind::Periodic: return "periodic";
    case SpectrumKind::QuasiPeriodic: return "quasi_periodic(" + std::to_string(order) + ")";
    case SpectrumKind::BroadbandChaotic: return "broadband_chaotic";
  }
  return "fixed_point_like";
}

double broadband_fraction(const PowerSpectrum& spec, const PeakSet& peaks, const BroadbandOptions& opts,
                          std::size_t* line_count) {
  const auto& p = spec.power;
  const double total = std::accumulate(p.begin() + 1, p.end(), 0.0);
  if (line_count) *line_count = 0;
  if (!(total > 0.0)) return 0.0;

  std::vector<std::uint8_t> covered(p.size(), 0);
  const auto bins = static_cast<std::ptrdiff_t>(p.size());
  for (const auto& peak : peaks.peaks) {
    const auto k = static_cast<std::ptrdiff_t>(peak.bin);
    const auto lo = std::max<std::ptrdiff_t>(1, k - opts.background_bins);
    const auto hi = std::min<std::ptrdiff_t>(bins - 1, k + opts.background_bins);
    const double background = median(std::vector<double>(p.begin() + lo, p.begin() + hi + 1));
    if (!(p[k] >= opts.line_contrast * background)) continue;
    if (line_count) ++*line_count;
    for (auto j = std::max<std::ptrdiff_t>(1, k - opts.neighbourhood_bins);
         j <= std::min<std::ptrdiff_t>(bins - 1, k + opts.neighbourhood_bins); ++j)
      covered[j] = 1;
  }
  double outside = 0.0;
  for (std::size_t k = 1; k < p.size(); ++k)
    if (!covered[k]) outside += p[k];
  return outside / total;
}

SpectrumClass classify_spectrum(const PowerSpectrum& spec, const PeakSet& peaks, const BroadbandOptions& opts) {
  SpectrumClass cls;
  cls.broadband_fraction = broadband_fraction(spec, peaks, opts, &cls.line_count);
  const std::size_t bases = peaks.filtered ? peaks.bases.size() : peaks.peaks.size();
  if (cls.broadband_fraction > opts.threshold) {
    cls.kind = SpectrumKind::BroadbandChaotic;
  } else if (bases == 0) {
    cls.kind = SpectrumKind::FixedPointLike;
  } else if (bases == 1) {
    cls.kind = SpectrumKind::Periodic;
  } else {
    cls.kind = SpectrumKind::QuasiPeriodic;
    cls.order = static_cast<int>(bases);
  }
  return cls;
}

}  // namespace attractors::spectral
