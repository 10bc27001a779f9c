#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "attractors/dynsys.hpp"
#include "attractors/nca.hpp"

namespace attractors::perturb {

inline constexpr double kDefaultNoiseStd = 0.002;
inline constexpr int kDefaultCircleRadius = 8;
inline constexpr double kDefaultModeThreshold = 0.05;

enum class PerturbationKind { SmallNoise, CircleDamage };

std::string to_string(PerturbationKind kind);

struct PerturbationSpec {
  PerturbationKind kind = PerturbationKind::SmallNoise;
  double noise_std = kDefaultNoiseStd;
  int circle_radius = kDefaultCircleRadius;
  /// (y, x); drawn uniformly over the living bounding box when unset.
  std::optional<std::pair<int, int>> circle_center;
  std::uint64_t rng_seed = 0;
};

/// Adds N(0, noise_std^2) to every channel of every living cell, visiting
/// cells row-major and channels in order. Dead cells are untouched.
nca::Substrate apply_small_noise(const nca::Substrate& s, const PerturbationSpec& spec);

/// Flat-state variant for systems without a grid: every coordinate counts as living.
StateVector apply_small_noise(std::span<const double> x, const PerturbationSpec& spec);

/// The centre apply_circle_damage will use for this substrate and spec.
std::pair<int, int> damage_center(const nca::Substrate& s, const PerturbationSpec& spec);

/// Zeroes all channels where (y - cy)^2 + (x - cx)^2 < r^2.
nca::Substrate apply_circle_damage(const nca::Substrate& s, const PerturbationSpec& spec);

/// Dispatches on `spec.kind`, unflattening grid systems into substrates.
StateVector perturb_state(const System& sys, std::span<const double> x, const PerturbationSpec& spec);

enum class Verdict { OriginalMode, SecondaryMode };

std::string to_string(Verdict v);

struct RecoveryOptions {
  std::int64_t steps = 1500;
  std::int64_t tail = 500;
  double mode_threshold = kDefaultModeThreshold;
};

struct RecoveryResult {
  /// steps + 1 rows: the perturbed start followed by every evolved state.
  Trajectory trajectory;
  /// Exactly the last `tail` rows of `trajectory`.
  Trajectory converged_tail;
  double mode_distance = 0.0;
  Verdict verdict = Verdict::OriginalMode;
};

std::vector<double> mean_position(const Trajectory& traj);

/// |mean(tail) - mean(reference_tail)| on unscaled states.
double mode_distance(const Trajectory& tail, const Trajectory& reference_tail);

/// Evolves a perturbed state and compares its converged tail to the reference.
RecoveryResult recover(const System& sys, std::span<const double> perturbed, const Trajectory& reference_tail,
                       const RecoveryOptions& opts = {});

struct BatchOptions {
  int n_runs = 5;
  /// Run i uses rng_seed + i.
  PerturbationSpec spec;
  RecoveryOptions recovery;
  std::size_t pca_components = 3;
};

struct RunOutcome {
  std::uint64_t seed = 0;
  PerturbationSpec spec;
  std::optional<RecoveryResult> result;
  std::string error;
  /// Recovery trajectory in the study's shared transform.
  Trajectory projected;
  /// Converged tail in a scaler + PCA fitted on that tail alone.
  Trajectory tail_own_projection;
};

struct BatchStudy {
  Trajectory reference_tail;
  Trajectory reference_projected;
  /// "refit" (small noise: fitted on reference + recovered tails) or
  /// "original" (damage: fitted on the reference tail only).
  std::string transform;
  std::vector<RunOutcome> runs;
};

/// n_runs perturbation-recovery cycles from x_attr with distinct seeds.
/// A failing run records its error and the batch continues.
BatchStudy batch_perturbation_study(const System& sys, std::span<const double> x_attr, const BatchOptions& opts);

}  // namespace attractors::perturb
