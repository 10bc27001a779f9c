#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "attractors/dynsys.hpp"

namespace attractors::spectral {

inline constexpr double kDefaultMinPower = 0.01;
inline constexpr double kDefaultToleranceBins = 2.0;
inline constexpr int kDefaultMaxCoeff = 5;
inline constexpr double kDefaultBroadbandFraction = 0.5;

enum class Window { None, Hann };

struct SpectrumOptions {
  bool detrend = true;
  Window window = Window::None;
  /// Time between rows in output frequency units; 0 means use traj.dt
  /// (cycles per map step). Pass dt * h for ODE-discretized systems to get
  /// cycles per unit time.
  double sample_interval = 0.0;
  bool parallel = true;
};

struct PowerSpectrum {
  std::vector<double> freqs;
  /// Variable-averaged one-sided power scaled so the largest non-DC bin is 1.
  std::vector<double> power;
  std::size_t n_samples = 0;
  bool detrended = true;
  Window window = Window::None;
  /// Raw averaged power of the largest non-DC bin (the normalisation divisor).
  double peak_raw_power = 0.0;

  double bin_width() const { return freqs.size() > 1 ? freqs[1] - freqs[0] : 0.0; }
};

/// One-sided power of a single series, unnormalised: P[0] = |X0|^2/N,
/// interior bins 2|Xk|^2/N, Nyquist |X_{N/2}|^2/N. Sums to the energy of the
/// (detrended, windowed) series.
std::vector<double> one_sided_power(std::span<const double> series, bool detrend,
                                    Window window = Window::None);

/// Averages one_sided_power over every variable (index order) and normalises.
/// Output has N/2 + 1 bins. Throws TooShort when T < 16.
PowerSpectrum power_spectrum(const Trajectory& traj, const SpectrumOptions& opts = {});

struct Peak {
  double freq = 0.0;  ///< refined by log-parabolic interpolation over the 3 bins
  double power = 0.0;
  std::size_t bin = 0;
};

/// Why a peak was dropped: either m * base (harmonic) or sum of m_i * base_i.
struct Explanation {
  enum class Kind { Harmonic, Combination };
  std::size_t peak = 0;
  Kind kind = Kind::Harmonic;
  /// (index into PeakSet::peaks of a base, integer coefficient), nonzero coefficients only.
  std::vector<std::pair<std::size_t, int>> terms;
  double reconstructed = 0.0;
};

struct PeakSet {
  /// Sorted by power descending.
  std::vector<Peak> peaks;
  /// Indices into `peaks` of the surviving base frequencies, in power order.
  /// Only meaningful once `filtered` is set.
  std::vector<std::size_t> bases;
  std::vector<Explanation> explanations;
  double tolerance = 0.0;
  bool filtered = false;

  std::vector<double> base_freqs() const;
  /// Peaks a filter considers: the current bases once filtered, else every peak.
  std::vector<std::size_t> candidates() const;
};

/// Strict local maxima (DC excluded) with normalised power >= min_power,
/// strongest first.
PeakSet find_peaks(const PowerSpectrum& spec, double min_power = kDefaultMinPower);

/// Greedy in power order: a candidate within tol of m * f_base (m >= 2) for an
/// already accepted base is explained, otherwise it becomes a base.
PeakSet filter_harmonics(PeakSet peaks, double tol);

/// Greedy in power order: a candidate within tol of sum m_i f_i over the
/// current bases (|m_i| <= max_coeff, not all zero) is explained, otherwise it
/// becomes a base. Combinations are searched over the 12 strongest bases.
PeakSet filter_linear_combinations(PeakSet peaks, double tol, int max_coeff = kDefaultMaxCoeff);

enum class SpectrumKind { FixedPointLike, Periodic, QuasiPeriodic, BroadbandChaotic };

struct SpectrumClass {
  SpectrumKind kind = SpectrumKind::FixedPointLike;
  int order = 0;  ///< number of bases for quasi_periodic
  double broadband_fraction = 0.0;
  std::size_t line_count = 0;

  /// "fixed_point_like", "periodic", "quasi_periodic(k)" or "broadband_chaotic".
  std::string label() const;
};

/// Parameters of the broadband test. A detected peak counts as a spectral
/// line when it stands `line_contrast` times above the median power of the
/// surrounding +/- `background_bins`; line neighbourhoods are
/// +/- `neighbourhood_bins`. Power outside every line neighbourhood is the
/// broadband part.
struct BroadbandOptions {
  double threshold = kDefaultBroadbandFraction;
  double line_contrast = 100.0;
  int background_bins = 32;
  int neighbourhood_bins = 2;
};

/// Fraction of non-DC power outside line neighbourhoods; 0 for a silent spectrum.
double broadband_fraction(const PowerSpectrum& spec, const PeakSet& peaks,
                          const BroadbandOptions& opts, std::size_t* line_count = nullptr);

/// Broadband above the threshold wins; otherwise the base count decides:
/// 0 fixed_point_like, 1 periodic, k >= 2 quasi_periodic(k).
SpectrumClass classify_spectrum(const PowerSpectrum& spec, const PeakSet& peaks,
                                const BroadbandOptions& opts = {});

}  // namespace attractors::spectral
