#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "attractors/dynsys.hpp"

namespace attractors::reduce {

inline constexpr double kDefaultTau = 0.95;

/// Per-axis standardisation. Axes with zero spread keep scale 1 so they map
/// to exact zeros instead of dividing by zero.
struct ScalerModel {
  std::vector<double> mean;
  std::vector<double> scale;
};

/// Population mean and standard deviation per column. Needs T >= 2.
ScalerModel fit_scaler(const Trajectory& traj);
Trajectory apply_scaler(const ScalerModel& model, const Trajectory& traj);
Trajectory invert_scaler(const ScalerModel& model, const Trajectory& traj);

enum class FitBasis { Unscaled, Scaled };

struct PcaModel {
  std::size_t dim = 0;
  std::size_t n_components = 0;
  std::size_t n_samples = 0;
  std::vector<double> mean;
  /// n_components x dim, row-major, orthonormal rows in descending variance order.
  std::vector<double> components;
  std::vector<double> explained_variance;
  std::vector<double> explained_variance_ratio;
  std::vector<double> cumulative_ratio;
  double total_variance = 0.0;
  FitBasis fitted_on = FitBasis::Unscaled;

  std::span<const double> component(std::size_t i) const { return {components.data() + i * dim, dim}; }
};

/// Top-r principal directions of the centred data. Uses the smaller of the
/// T x T Gram matrix and the D x D scatter matrix, so D ~ 1e5 with T ~ 1e3
/// is cheap. Directions with no variance are completed to an orthonormal set
/// and carry ratio 0. Requires r <= min(T - 1, D).
PcaModel fit_pca(const Trajectory& traj, std::size_t r, FitBasis fitted_on = FitBasis::Unscaled,
                 bool parallel = true);

/// Coordinates of each (mean-centred) row in the component basis; dim r.
Trajectory project(const PcaModel& model, const Trajectory& traj);

/// Smallest d with cumulative_ratio[d - 1] >= tau. Throws InsufficientRank
/// naming the ratio reached when all components fall short.
std::size_t intrinsic_dimension(const PcaModel& model, double tau = kDefaultTau);

/// G = A A^T for a row-major rows x cols matrix. Each entry is one dot
/// product in column order, so the parallel and serial versions agree bitwise.
std::vector<double> gram_matrix(std::span<const double> a, std::size_t rows, std::size_t cols);
std::vector<double> gram_matrix_serial(std::span<const double> a, std::size_t rows, std::size_t cols);

struct VolumeWindow {
  std::size_t index = 0;
  std::int64_t t_start = 0;
  double sum_distance = 0.0;
};

struct VolumeReport {
  std::vector<VolumeWindow> windows;
  double mean = 0.0;
  double stddev = 0.0;
  /// Least-squares slope of the window sums against window index.
  double slope = 0.0;
  bool dissipative = false;
  std::string verdict;
  std::int64_t window = 0;
  std::int64_t total_steps = 0;
};

/// Trend statistics for a series of window sums. Dissipative when the slope
/// is negative and the fitted drop over the series, |slope| * n, exceeds both
/// twice the standard deviation and 1e-9 of the mean (round-off floor).
VolumeReport summarize_volume(std::vector<VolumeWindow> windows);

/// Splits `total_steps` states starting at x_attr into windows of `window`
/// states and reports, per window, the sum of Euclidean distances to that
/// window's centroid.
VolumeReport volume_proxy(const System& sys, std::span<const double> x_attr, std::int64_t total_steps,
                          std::int64_t window);

}  // namespace attractors::reduce
