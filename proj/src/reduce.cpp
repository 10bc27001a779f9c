#include "attractors/reduce.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

#include "attractors/error.hpp"

namespace attractors::reduce {

namespace {

// Eigenvalues below this fraction of the largest are treated as exact zeros.
constexpr double kRankTolerance = 1e-12;
// Above this many bytes volume_proxy re-evolves each window instead of storing it.
constexpr std::size_t kWindowBufferBytes = std::size_t{512} << 20;

void require_dim(const Trajectory& traj, std::size_t dim) {
  if (traj.dim != dim) throw Error(ErrorCode::InvalidArgument, "trajectory dimension does not match model");
}

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t k = 0; k < n; ++k) s += a[k] * b[k];
  return s;
}

// Orthogonalises `v` against the first `count` rows of `basis` (two MGS
// passes) and normalises it. Returns false when nothing is left.
bool orthonormalize_against(std::vector<double>& basis, std::size_t count, std::size_t dim, double* v) {
  const double original = std::sqrt(dot(v, v, dim));
  if (original == 0.0) return false;
  for (int pass = 0; pass < 2; ++pass)
    for (std::size_t j = 0; j < count; ++j) {
      const double* q = basis.data() + j * dim;
      const double proj = dot(v, q, dim);
      for (std::size_t k = 0; k < dim; ++k) v[k] -= proj * q[k];
    }
  const double r = std::sqrt(dot(v, v, dim));
  if (!(r > 1e-8 * original)) return false;
  for (std::size_t k = 0; k < dim; ++k) v[k] /= r;
  return true;
}

}  // namespace

ScalerModel fit_scaler(const Trajectory& traj) {
  const std::size_t n = traj.rows();
  const std::size_t d = traj.dim;
  if (n < 2) throw Error(ErrorCode::TooShort, "scaler needs at least 2 rows");
  ScalerModel m;
  m.mean.assign(d, 0.0);
  m.scale.assign(d, 0.0);
  for (std::size_t t = 0; t < n; ++t)
    for (std::size_t j = 0; j < d; ++j) m.mean[j] += traj.states[t * d + j];
  for (auto& v : m.mean) v /= static_cast<double>(n);
  for (std::size_t t = 0; t < n; ++t)
    for (std::size_t j = 0; j < d; ++j) {
      const double c = traj.states[t * d + j] - m.mean[j];
      m.scale[j] += c * c;
    }
  for (std::size_t j = 0; j < d; ++j) {
    const double sd = std::sqrt(m.scale[j] / static_cast<double>(n));
    // Constant columns can pick up round-off spread; treat those as constant too.
    const double floor = 10.0 * std::numeric_limits<double>::epsilon() * std::abs(m.mean[j]);
    m.scale[j] = sd > floor && sd > 0.0 ? sd : 1.0;
  }
  return m;
}

Trajectory apply_scaler(const ScalerModel& model, const Trajectory& traj) {
  require_dim(traj, model.mean.size());
  Trajectory out = traj;
  for (std::size_t t = 0; t < traj.rows(); ++t)
    for (std::size_t j = 0; j < traj.dim; ++j) {
      double& v = out.states[t * traj.dim + j];
      v = (v - model.mean[j]) / model.scale[j];
    }
  return out;
}

Trajectory invert_scaler(const ScalerModel& model, const Trajectory& traj) {
  require_dim(traj, model.mean.size());
  Trajectory out = traj;
  for (std::size_t t = 0; t < traj.rows(); ++t)
    for (std::size_t j = 0; j < traj.dim; ++j) {
      double& v = out.states[t * traj.dim + j];
      v = v * model.scale[j] + model.mean[j];
    }
  return out;
}

std::vector<double> gram_matrix(std::span<const double> a, std::size_t rows, std::size_t cols) {
  if (a.size() != rows * cols) throw Error(ErrorCode::InvalidArgument, "matrix size mismatch");
  std::vector<double> g(rows * rows);
  const auto n = static_cast<std::int64_t>(rows);
#pragma omp parallel for schedule(dynamic, 8)
  for (std::int64_t i = 0; i < n; ++i) {
    const double* ri = a.data() + static_cast<std::size_t>(i) * cols;
    for (std::int64_t j = 0; j <= i; ++j) {
      const double v = dot(ri, a.data() + static_cast<std::size_t>(j) * cols, cols);
      g[static_cast<std::size_t>(i * n + j)] = v;
      g[static_cast<std::size_t>(j * n + i)] = v;
    }
  }
  return g;
}

std::vector<double> gram_matrix_serial(std::span<const double> a, std::size_t rows, std::size_t cols) {
  if (a.size() != rows * cols) throw Error(ErrorCode::InvalidArgument, "matrix size mismatch");
  std::vector<double> g(rows * rows);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < cols; ++k) s += a[i * cols + k] * a[j * cols + k];
      g[i * rows + j] = s;
      g[j * rows + i] = s;
    }
  return g;
}

PcaModel fit_pca(const Trajectory& traj, std::size_t r, FitBasis fitted_on, bool parallel) {
  const std::size_t n = traj.rows();
  const std::size_t d = traj.dim;
  if (n < 2) throw Error(ErrorCode::TooShort, "PCA needs at least 2 rows");
  if (r < 1 || r > std::min(n - 1, d))
    throw Error(ErrorCode::InvalidArgument, "component count must lie in [1, min(T - 1, D)]");

  PcaModel model;
  model.dim = d;
  model.n_components = r;
  model.n_samples = n;
  model.fitted_on = fitted_on;
  model.mean.assign(d, 0.0);
  for (std::size_t t = 0; t < n; ++t)
    for (std::size_t j = 0; j < d; ++j) model.mean[j] += traj.states[t * d + j];
  for (auto& v : model.mean) v /= static_cast<double>(n);

  std::vector<double> centred(traj.states.size());
  for (std::size_t t = 0; t < n; ++t)
    for (std::size_t j = 0; j < d; ++j) centred[t * d + j] = traj.states[t * d + j] - model.mean[j];

  // Scatter route (D x D) when D <= T, Gram route (T x T) otherwise; both
  // share the nonzero spectrum of X^T X.
  const bool gram_route = d > n;
  const std::size_t m = gram_route ? n : d;
  std::vector<double> matrix;
  if (gram_route) {
    matrix = parallel ? gram_matrix(centred, n, d) : gram_matrix_serial(centred, n, d);
  } else {
    std::vector<double> transposed(d * n);
    for (std::size_t t = 0; t < n; ++t)
      for (std::size_t j = 0; j < d; ++j) transposed[j * n + t] = centred[t * d + j];
    matrix = parallel ? gram_matrix(transposed, d, n) : gram_matrix_serial(transposed, d, n);
  }

  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> mat(
      matrix.data(), static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(mat);
  if (solver.info() != Eigen::Success) throw Error(ErrorCode::RankCollapse, "eigendecomposition failed");
  const Eigen::VectorXd& evals = solver.eigenvalues();  // ascending
  const Eigen::MatrixXd& evecs = solver.eigenvectors();

  double trace = 0.0;
  for (std::size_t i = 0; i < m; ++i) trace += matrix[i * m + i];
  model.total_variance = trace / static_cast<double>(n - 1);
  const double largest = std::max(evals(static_cast<Eigen::Index>(m) - 1), 0.0);

  model.components.assign(r * d, 0.0);
  std::size_t filled = 0;
  std::vector<double> lambdas;
  for (std::size_t k = 0; k < r; ++k) {
    const auto col = static_cast<Eigen::Index>(m - 1 - k);
    const double lambda = evals(col);
    if (!(lambda > kRankTolerance * largest) || largest == 0.0) break;
    double* v = model.components.data() + filled * d;
    if (gram_route) {
      // v = X^T u / sqrt(lambda)
      const double inv = 1.0 / std::sqrt(lambda);
      for (std::size_t t = 0; t < n; ++t) {
        const double u = evecs(static_cast<Eigen::Index>(t), col) * inv;
        const double* row = centred.data() + t * d;
        for (std::size_t j = 0; j < d; ++j) v[j] += u * row[j];
      }
    } else {
      for (std::size_t j = 0; j < d; ++j) v[j] = evecs(static_cast<Eigen::Index>(j), col);
    }
    if (!orthonormalize_against(model.components, filled, d, v)) {
      std::fill_n(v, d, 0.0);
      break;
    }
    lambdas.push_back(lambda);
    ++filled;
  }
  // Complete the basis with coordinate directions for zero-variance components.
  for (std::size_t axis = 0; filled < r && axis < d; ++axis) {
    double* v = model.components.data() + filled * d;
    std::fill_n(v, d, 0.0);
    v[axis] = 1.0;
    if (orthonormalize_against(model.components, filled, d, v)) {
      lambdas.push_back(0.0);
      ++filled;
    }
  }

  double cumulative = 0.0;
  for (std::size_t k = 0; k < r; ++k) {
    const double var = lambdas[k] / static_cast<double>(n - 1);
    const double ratio = trace > 0.0 ? lambdas[k] / trace : 0.0;
    cumulative += ratio;
    model.explained_variance.push_back(var);
    model.explained_variance_ratio.push_back(ratio);
    model.cumulative_ratio.push_back(cumulative);
  }
  return model;
}

Trajectory project(const PcaModel& model, const Trajectory& traj) {
  require_dim(traj, model.dim);
  const std::size_t n = traj.rows();
  const std::size_t r = model.n_components;
  Trajectory out(n, r, traj.t_start, traj.dt);
  std::vector<double> centred(model.dim);
  for (std::size_t t = 0; t < n; ++t) {
    const auto row = traj.row(t);
    for (std::size_t j = 0; j < model.dim; ++j) centred[j] = row[j] - model.mean[j];
    for (std::size_t k = 0; k < r; ++k)
      out.states[t * r + k] = dot(centred.data(), model.components.data() + k * model.dim, model.dim);
  }
  return out;
}

std::size_t intrinsic_dimension(const PcaModel& model, double tau) {
  if (!(tau > 0.0 && tau < 1.0)) throw Error(ErrorCode::InvalidArgument, "tau must lie in (0, 1)");
  for (std::size_t k = 0; k < model.cumulative_ratio.size(); ++k)
    if (model.cumulative_ratio[k] >= tau) return k + 1;
  const double reached = model.cumulative_ratio.empty() ? 0.0 : model.cumulative_ratio.back();
  throw Error(ErrorCode::InsufficientRank,
              std::to_string(model.n_components) + " components explain only " + std::to_string(reached) +
                  " of the variance, below tau = " + std::to_string(tau));
}

VolumeReport summarize_volume(std::vector<VolumeWindow> windows) {
  VolumeReport rep;
  rep.windows = std::move(windows);
  const auto n = static_cast<double>(rep.windows.size());
  if (rep.windows.empty()) return rep;
  for (const auto& w : rep.windows) rep.mean += w.sum_distance;
  rep.mean /= n;
  for (const auto& w : rep.windows) rep.stddev += (w.sum_distance - rep.mean) * (w.sum_distance - rep.mean);
  rep.stddev = std::sqrt(rep.stddev / n);

  const double x_mean = (n - 1.0) / 2.0;
  double sxy = 0.0, sxx = 0.0;
  for (const auto& w : rep.windows) {
    const double dx = static_cast<double>(w.index) - x_mean;
    sxy += dx * (w.sum_distance - rep.mean);
    sxx += dx * dx;
  }
  rep.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  const double drop = std::abs(rep.slope) * n;
  rep.dissipative = rep.slope < 0.0 && drop > 2.0 * rep.stddev && drop > 1e-9 * std::abs(rep.mean);
  rep.verdict = rep.dissipative ? "dissipative" : "no clear downward trend";
  return rep;
}

VolumeReport volume_proxy(const System& sys, std::span<const double> x_attr, std::int64_t total_steps,
                          std::int64_t window) {
  if (window < 2) throw Error(ErrorCode::InvalidArgument, "window must be >= 2");
  if (total_steps < window || total_steps % window != 0)
    throw Error(ErrorCode::InvalidArgument, "total_steps must be a positive multiple of window");
  if (x_attr.size() != sys.dim()) throw Error(ErrorCode::InvalidArgument, "state dimension does not match system");

  const std::size_t d = sys.dim();
  const auto w = static_cast<std::size_t>(window);
  const bool buffered = w * d * sizeof(double) <= kWindowBufferBytes;
  std::vector<double> buffer(buffered ? w * d : 0);

  std::vector<double> start(x_attr.begin(), x_attr.end()), cur(d), next(d), centroid(d);
  std::int64_t t = 0;
  // Visits the window's states in order, leaving `cur` at the last one.
  auto walk = [&](auto&& visit) {
    cur = start;
    for (std::size_t i = 0; i < w; ++i) {
      if (i > 0) {
        sys.step_into(cur, next);
        if (!all_finite(next)) {
          for (std::size_t k = 0; k < d; ++k)
            if (!std::isfinite(next[k])) throw NumericalBlowup(k, t + static_cast<std::int64_t>(i));
        }
        std::swap(cur, next);
      }
      visit(i, std::span<const double>(cur));
    }
  };

  std::vector<VolumeWindow> windows;
  const std::int64_t count = total_steps / window;
  for (std::int64_t k = 0; k < count; ++k) {
    std::fill(centroid.begin(), centroid.end(), 0.0);
    walk([&](std::size_t i, std::span<const double> x) {
      for (std::size_t j = 0; j < d; ++j) centroid[j] += x[j];
      if (buffered) std::copy(x.begin(), x.end(), buffer.begin() + static_cast<std::ptrdiff_t>(i * d));
    });
    for (auto& c : centroid) c /= static_cast<double>(w);
    const std::vector<double> last = cur;

    double sum = 0.0;
    auto accumulate = [&](std::size_t, std::span<const double> x) {
      double s = 0.0;
      for (std::size_t j = 0; j < d; ++j) s += (x[j] - centroid[j]) * (x[j] - centroid[j]);
      sum += std::sqrt(s);
    };
    if (buffered) {
      for (std::size_t i = 0; i < w; ++i) accumulate(i, std::span<const double>(buffer.data() + i * d, d));
    } else {
      walk(accumulate);
    }
    windows.push_back({static_cast<std::size_t>(k), t, sum});

    // The next window starts one step after this window's last state.
    sys.step_into(last, start);
    if (!all_finite(start)) throw NumericalBlowup(0, t + window);
    t += window;
  }
  auto rep = summarize_volume(std::move(windows));
  rep.window = window;
  rep.total_steps = total_steps;
  return rep;
}

}  // namespace attractors::reduce
