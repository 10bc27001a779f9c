#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>

#include "attractors/dynsys.hpp"
#include "attractors/error.hpp"
#include "attractors/rng.hpp"
#include "attractors/spectral.hpp"

using namespace attractors;
using namespace attractors::spectral;

namespace {

constexpr double kPi = std::numbers::pi;

Trajectory tones(std::size_t T, const std::vector<std::pair<double, double>>& freq_amp, std::size_t dim = 1) {
  Trajectory t(T, dim);
  for (std::size_t i = 0; i < T; ++i)
    for (std::size_t d = 0; d < dim; ++d) {
      double v = 0.0;
      for (auto [f, a] : freq_amp) v += a * std::sin(2 * kPi * f * static_cast<double>(i) + 0.3 * d);
      t.states[i * dim + d] = v;
    }
  return t;
}

// Direct O(N^2) transform, independent of the FFT backend.
std::vector<double> naive_one_sided(const std::vector<double>& x) {
  const std::size_t N = x.size();
  std::vector<double> p(N / 2 + 1);
  for (std::size_t k = 0; k <= N / 2; ++k) {
    std::complex<double> s{0, 0};
    for (std::size_t n = 0; n < N; ++n)
      s += x[n] * std::polar(1.0, -2 * kPi * static_cast<double>(k * n % N) / static_cast<double>(N));
    const double m = std::norm(s) / static_cast<double>(N);
    p[k] = (k == 0 || (N % 2 == 0 && k == N / 2)) ? m : 2 * m;
  }
  return p;
}

PeakSet synthetic(const std::vector<double>& freqs) {
  PeakSet p;
  double power = 1.0;
  for (double f : freqs) {
    p.peaks.push_back(Peak{f, power, 0});
    power *= 0.8;
  }
  return p;
}

}  // namespace

TEST_SUITE("spectral") {

TEST_CASE("one-sided power matches a direct transform") {
  Rng rng(4);
  for (std::size_t N : {16u, 17u, 64u, 101u}) {
    std::vector<double> x(N);
    for (auto& v : x) v = rng.gaussian();
    const auto want = naive_one_sided(x);
    const auto got = one_sided_power(x, false);
    REQUIRE(got.size() == want.size());
    for (std::size_t k = 0; k < got.size(); ++k) CHECK(got[k] == doctest::Approx(want[k]).epsilon(1e-9));
  }
}

TEST_CASE("parseval: one-sided power sums to the series energy") {
  Rng rng(9);
  for (std::size_t N : {16u, 255u, 1024u, 1000u}) {
    std::vector<double> x(N);
    for (auto& v : x) v = 3.0 + rng.gaussian();
    const double energy = std::inner_product(x.begin(), x.end(), x.begin(), 0.0);
    const auto p = one_sided_power(x, false);
    const double total = std::accumulate(p.begin(), p.end(), 0.0);
    CHECK(std::abs(total - energy) <= 1e-9 * energy);

    double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(N);
    double centred = 0.0;
    for (double v : x) centred += (v - mean) * (v - mean);
    const auto pd = one_sided_power(x, true);
    CHECK(std::abs(std::accumulate(pd.begin(), pd.end(), 0.0) - centred) <= 1e-9 * centred);
    CHECK(std::abs(pd[0]) <= 1e-9 * centred);
  }
}

TEST_CASE("spectrum shape and normalisation") {
  const auto spec = power_spectrum(tones(1000, {{0.1, 1.0}}, 2));
  CHECK(spec.freqs.size() == 501);
  CHECK(spec.power.size() == 501);
  CHECK(spec.n_samples == 1000);
  CHECK(spec.freqs.front() == 0.0);
  CHECK(spec.freqs.back() == doctest::Approx(0.5));
  for (std::size_t k = 1; k < spec.freqs.size(); ++k) CHECK(spec.freqs[k] > spec.freqs[k - 1]);
  double mx = 0.0;
  for (std::size_t k = 1; k < spec.power.size(); ++k) {
    CHECK(spec.power[k] >= 0.0);
    mx = std::max(mx, spec.power[k]);
  }
  CHECK(mx == 1.0);
}

TEST_CASE("single tone is located within one bin and is periodic") {
  const auto spec = power_spectrum(tones(1000, {{0.1, 1.0}}));
  const auto peaks = find_peaks(spec, 0.01);
  REQUIRE(peaks.peaks.size() >= 1);
  CHECK(std::abs(peaks.peaks[0].freq - 0.1) <= 1.0 / 1000);
  const auto f = filter_linear_combinations(filter_harmonics(peaks, 2 * spec.bin_width()), 2 * spec.bin_width());
  CHECK(classify_spectrum(spec, f).label() == "periodic");
}

TEST_CASE("sample interval rescales frequencies") {
  SpectrumOptions o;
  o.sample_interval = 0.01;
  const auto spec = power_spectrum(tones(1000, {{0.1, 1.0}}), o);
  CHECK(spec.freqs.back() == doctest::Approx(50.0));
  const auto peaks = find_peaks(spec, 0.01);
  CHECK(std::abs(peaks.peaks[0].freq - 10.0) <= spec.bin_width());
}

TEST_CASE("constant series with detrending has no non-dc power") {
  Trajectory t(64, 2);
  for (auto& v : t.states) v = 4.2;
  const auto spec = power_spectrum(t);
  for (std::size_t k = 1; k < spec.power.size(); ++k) CHECK(spec.power[k] == 0.0);
  const auto peaks = find_peaks(spec, 0.01);
  CHECK(peaks.peaks.empty());
  CHECK(classify_spectrum(spec, filter_harmonics(peaks, 0.01)).label() == "fixed_point_like");
}

TEST_CASE("too short") {
  try {
    power_spectrum(Trajectory(15, 1));
    FAIL("expected TooShort");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TooShort);
  }
}

TEST_CASE("two tones come out in power order") {
  // Amplitudes 1 and sqrt(0.5) give power ratio 0.5.
  const auto spec = power_spectrum(tones(2048, {{0.05, 1.0}, {0.2, std::sqrt(0.5)}}));
  const auto peaks = find_peaks(spec, 0.01);
  REQUIRE(peaks.peaks.size() >= 2);
  CHECK(std::abs(peaks.peaks[0].freq - 0.05) <= 1.0 / 2048);
  CHECK(std::abs(peaks.peaks[1].freq - 0.2) <= 1.0 / 2048);
  CHECK(peaks.peaks[1].power == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("weak noise stays under the threshold") {
  Rng rng(1);
  Trajectory t(4096, 1);
  for (std::size_t i = 0; i < 4096; ++i) t.states[i] = std::sin(2 * kPi * 0.1 * i) + 1e-4 * rng.gaussian();
  const auto peaks = find_peaks(power_spectrum(t), 0.01);
  CHECK(peaks.peaks.size() == 1);
}

TEST_CASE("harmonic filter keeps the base") {
  const auto p = filter_harmonics(synthetic({0.144, 0.432, 0.720, 0.856, 1.008}), 0.01);
  CHECK(p.base_freqs() == std::vector<double>{0.144});
  CHECK(p.explanations.size() == 4);
  CHECK(filter_harmonics(synthetic({0.3}), 0.01).base_freqs() == std::vector<double>{0.3});
  CHECK(filter_harmonics(synthetic({0.1, 0.25}), 0.01).base_freqs().size() == 2);
}

TEST_CASE("linear-combination filter") {
  const auto p = filter_linear_combinations(synthetic({0.4125, 1.0125, 1.425, 2.4}), 0.02, 5);
  CHECK(p.base_freqs() == std::vector<double>{0.4125, 1.0125});
  CHECK(filter_linear_combinations(synthetic({0.06, 0.097, 0.157}), 0.001, 5).base_freqs().size() == 2);
  CHECK(filter_linear_combinations(synthetic({0.3}), 0.01, 5).base_freqs().size() == 1);
}

TEST_CASE("explanations reproduce their peak within tolerance") {
  const double tol = 0.005;
  const auto p = filter_linear_combinations(
      filter_harmonics(synthetic({0.11, 0.173, 0.22, 0.283, 0.33, 0.063, 0.456, 0.049}), tol), tol, 5);
  CHECK(p.bases.size() <= p.peaks.size());
  CHECK(p.bases.size() + p.explanations.size() == p.peaks.size());
  for (const auto& e : p.explanations) {
    double f = 0.0;
    for (auto [b, m] : e.terms) f += m * p.peaks[b].freq;
    CHECK(std::abs(f - p.peaks[e.peak].freq) <= tol);
    CHECK(f == doctest::Approx(e.reconstructed));
  }
}

TEST_CASE("filters are idempotent") {
  const double tol = 0.004;
  const auto once = filter_linear_combinations(
      filter_harmonics(synthetic({0.0126, 0.0141, 0.0422, 0.0760, 0.0267, 0.0252, 0.0899, 0.1}), tol), tol, 5);
  const auto h2 = filter_harmonics(once, tol);
  const auto l2 = filter_linear_combinations(once, tol, 5);
  CHECK(h2.base_freqs() == once.base_freqs());
  CHECK(l2.base_freqs() == once.base_freqs());
}

TEST_CASE("harmonic stack reduces to one base") {
  const auto spec = power_spectrum(tones(4096, {{0.03, 1.0}, {0.06, 0.5}, {0.09, 0.3}}));
  const double tol = 2 * spec.bin_width();
  const auto p = filter_linear_combinations(filter_harmonics(find_peaks(spec, 0.01), tol), tol, 5);
  CHECK(p.bases.size() == 1);
  CHECK(classify_spectrum(spec, p).label() == "periodic");
}

TEST_CASE("two incommensurate tones and their sum give two bases") {
  const double f1 = 0.06, f2 = 0.06 * std::numbers::phi;
  const auto spec = power_spectrum(tones(8192, {{f1, 1.0}, {f2, 0.8}, {f1 + f2, 0.3}}));
  const double tol = 2 * spec.bin_width();
  const auto p = filter_linear_combinations(filter_harmonics(find_peaks(spec, 0.01), tol), tol, 5);
  CHECK(p.bases.size() == 2);
  CHECK(classify_spectrum(spec, p).label() == "quasi_periodic(2)");
}

TEST_CASE("torus oracle shows its two angle frequencies") {
  const auto sys = make_oracle("torus");
  const auto traj = evolve(*sys, sys->initial_state(), 8191, 1);
  const auto spec = power_spectrum(traj);
  const double tol = 2 * spec.bin_width();
  const auto p = filter_linear_combinations(filter_harmonics(find_peaks(spec, 0.01), tol), tol, 5);
  auto bases = p.base_freqs();
  REQUIRE(bases.size() == 2);
  std::sort(bases.begin(), bases.end());
  CHECK(std::abs(bases[0] - 0.06) <= spec.bin_width());
  CHECK(std::abs(bases[1] - 0.06 * std::numbers::phi) <= spec.bin_width());
  CHECK(classify_spectrum(spec, p).label() == "quasi_periodic(2)");
}

TEST_CASE("white noise is broadband") {
  Rng rng(2);
  Trajectory t(4096, 3);
  for (auto& v : t.states) v = rng.gaussian();
  const auto spec = power_spectrum(t);
  const auto p = filter_harmonics(find_peaks(spec, 0.01), 2 * spec.bin_width());
  CHECK(classify_spectrum(spec, p).label() == "broadband_chaotic");
}

TEST_CASE("parallel and serial spectra agree bitwise") {
  const auto sys = make_oracle("lorenz");
  const auto traj = evolve(*sys, burn_in(*sys, StateVector{1, 1, 1}, 500), 2047, 1);
  SpectrumOptions a, b;
  b.parallel = false;
  CHECK(power_spectrum(traj, a).power == power_spectrum(traj, b).power);
}

TEST_CASE("hann window still finds the tone") {
  SpectrumOptions o;
  o.window = Window::Hann;
  const auto spec = power_spectrum(tones(1000, {{0.123, 1.0}}), o);
  const auto peaks = find_peaks(spec, 0.01);
  REQUIRE(!peaks.peaks.empty());
  CHECK(std::abs(peaks.peaks[0].freq - 0.123) <= 1.0 / 1000);
}

}  // TEST_SUITE
