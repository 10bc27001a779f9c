#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "attractors/dynsys.hpp"

namespace attractors::lyapunov {

inline constexpr double kDefaultEpsilon = 1e-4;
inline constexpr double kDefaultTheta = 0.002;

enum class AttractorKind { FixedPoint, LimitCycle, QuasiPeriodic, Chaotic, Inconclusive };

/// Attractor type read off the signs of a spectrum. `order` is k for
/// quasi_periodic(k) and l for chaotic(l), 0 otherwise.
struct AttractorClass {
  AttractorKind kind = AttractorKind::Inconclusive;
  int order = 0;
  double zero_threshold = kDefaultTheta;

  /// "fixed_point", "limit_cycle", "quasi_periodic(k)", "chaotic(l)" or "inconclusive".
  std::string label() const;
  bool operator==(const AttractorClass&) const = default;
};

struct Options {
  double epsilon = kDefaultEpsilon;
  std::int64_t n_steps = 10000;
  std::uint64_t seed = 0;
  std::int64_t checkpoint_every = 100;
  /// Steps spent letting the direction vectors align before any log growth is
  /// counted. The state advances during these steps too.
  std::int64_t warmup = 100;
  /// Evolve the perturbed copies concurrently. Results are bit-identical either way.
  bool parallel = true;
};

struct LyapunovReport {
  /// Descending. Nats per step, or per unit time for ODE-discretized systems.
  std::vector<double> exponents;
  /// running_means[i][k] is the estimate of exponents[i] after checkpoint_steps[k].
  std::vector<std::vector<double>> running_means;
  std::vector<std::int64_t> checkpoint_steps;
  double epsilon = kDefaultEpsilon;
  std::int64_t n_steps = 0;
  std::int64_t warmup = 0;
  std::uint64_t seed = 0;
  std::string unit = "per_step";
  std::size_t dim = 0;
};

struct TopExponent {
  double value = 0.0;
  std::vector<double> running_mean;
  std::vector<std::int64_t> checkpoint_steps;
  double epsilon = kDefaultEpsilon;
  std::int64_t n_steps = 0;
  std::int64_t warmup = 0;
  std::uint64_t seed = 0;
  std::string unit = "per_step";
};

/// Largest exponent from one perturbed copy kept at distance epsilon.
///
/// Each step: d = f(x + s) - f(x), accumulate ln(|d| / |s|), then reset the
/// copy to f(x) + epsilon * d / |d|. `x_attr` should already be on the
/// attractor. Throws DegenerateSeparation if |d| underflows to zero.
TopExponent top_exponent(const System& sys, std::span<const double> x_attr, const Options& opts = {});

/// Leading `n_exponents` exponents from n perturbed copies re-orthonormalized
/// every step with modified Gram-Schmidt.
///
/// Per step the separations S = [x_i' - x] and their images D = [f(x_i') - f(x)]
/// are both orthogonalized in index order; exponent i accumulates
/// ln(R_D[i][i] / R_S[i][i]). Because R_S uses the separations actually
/// realised in floating point, maps with exact finite differences (identity,
/// diagonal linear maps) give exact logs. Copies are then reset to
/// f(x) + epsilon * q_i.
///
/// Throws DegenerateSeparation when an image difference is exactly zero and
/// RankCollapse when a Gram-Schmidt residual vanishes relative to its vector.
LyapunovReport spectrum(const System& sys, std::span<const double> x_attr, int n_exponents,
                        const Options& opts = {});

/// Table of characteristic spectra: |lambda| <= theta counts as zero; any
/// lambda > theta gives chaotic(#positive); otherwise k zeros give
/// fixed_point (0), limit_cycle (1) or quasi_periodic(k). When every computed
/// exponent is zero but fewer than `dim` were computed, the verdict is
/// inconclusive.
AttractorClass classify(std::span<const double> exponents, std::size_t dim, double theta);
AttractorClass classify(const LyapunovReport& report, double theta);

}  // namespace attractors::lyapunov
