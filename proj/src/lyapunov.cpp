#include "attractors/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "attractors/error.hpp"
#include "attractors/rng.hpp"

namespace attractors::lyapunov {

namespace {

// Gram-Schmidt residuals below this fraction of the original vector norm are
// treated as numerically dependent.
constexpr double kCollapseRatio = 1e-13;

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

void check_finite_step(std::span<const double> v, std::int64_t t) {
  for (std::size_t i = 0; i < v.size(); ++i)
    if (!std::isfinite(v[i])) throw NumericalBlowup(i, t);
}

void check_start(const System& sys, std::span<const double> x, const Options& opts) {
  if (x.size() != sys.dim()) throw Error(ErrorCode::InvalidArgument, "state dimension does not match system");
  if (!all_finite(x)) throw Error(ErrorCode::InvalidArgument, "start state is not finite");
  if (!(opts.epsilon > 0.0)) throw Error(ErrorCode::InvalidArgument, "epsilon must be positive");
  if (opts.n_steps < 1) throw Error(ErrorCode::InvalidArgument, "n_steps must be >= 1");
  if (opts.warmup < 0) throw Error(ErrorCode::InvalidArgument, "warmup must be >= 0");
  if (opts.checkpoint_every < 1) throw Error(ErrorCode::InvalidArgument, "checkpoint_every must be >= 1");
}

// In-place modified Gram-Schmidt over n row vectors of length d. Returns the
// diagonal of R. Rows become orthonormal.
std::vector<double> orthonormalize(std::vector<double>& rows, std::size_t n, std::size_t d,
                                   std::int64_t timestep) {
  std::vector<double> diag(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::span<double> vi(rows.data() + i * d, d);
    const double original = norm(vi);
    if (original == 0.0)
      throw Error(ErrorCode::DegenerateSeparation,
                  "separation vector " + std::to_string(i) + " collapsed to zero at step " +
                      std::to_string(timestep));
    for (std::size_t j = 0; j < i; ++j) {
      std::span<const double> qj(rows.data() + j * d, d);
      const double proj = dot(vi, qj);
      for (std::size_t k = 0; k < d; ++k) vi[k] -= proj * qj[k];
    }
    const double r = norm(vi);
    if (!(r > kCollapseRatio * original))
      throw Error(ErrorCode::RankCollapse,
                  "orthonormalization lost rank at vector " + std::to_string(i) + ", step " +
                      std::to_string(timestep));
    for (auto& v : vi) v /= r;
    diag[i] = r;
  }
  return diag;
}

double unit_scale(const System& sys) {
  return sys.reports_per_unit_time() ? 1.0 / sys.time_step() : 1.0;
}

std::string unit_name(const System& sys) {
  return sys.reports_per_unit_time() ? "per_unit_time" : "per_step";
}

}  // namespace

std::string AttractorClass::label() const {
  switch (kind) {
    case AttractorKind::FixedPoint: return "fixed_point";
    case AttractorKind::LimitCycle: return "limit_cycle";
    case AttractorKind::QuasiPeriodic: return "quasi_periodic(" + std::to_string(order) + ")";
    case AttractorKind::Chaotic: return "chaotic(" + std::to_string(order) + ")";
    case AttractorKind::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

TopExponent top_exponent(const System& sys, std::span<const double> x_attr, const Options& opts) {
  check_start(sys, x_attr, opts);
  const std::size_t d = sys.dim();
  const double scale = unit_scale(sys);

  Rng rng(opts.seed);
  std::vector<double> dir(d);
  double len = 0.0;
  while (len == 0.0) {
    for (auto& v : dir) v = rng.gaussian();
    len = norm(dir);
  }

  std::vector<double> x(x_attr.begin(), x_attr.end()), xp(d), y(d), yp(d);
  for (std::size_t k = 0; k < d; ++k) xp[k] = x[k] + opts.epsilon * dir[k] / len;

  TopExponent out;
  out.epsilon = opts.epsilon;
  out.n_steps = opts.n_steps;
  out.warmup = opts.warmup;
  out.seed = opts.seed;
  out.unit = unit_name(sys);

  double sum = 0.0;
  std::vector<double> sep(d), diff(d);
  for (std::int64_t u = 1 - opts.warmup; u <= opts.n_steps; ++u) {
    const std::int64_t t = u + opts.warmup;
    for (std::size_t k = 0; k < d; ++k) sep[k] = xp[k] - x[k];
    sys.step_into(x, y);
    check_finite_step(y, t);
    sys.step_into(xp, yp);
    check_finite_step(yp, t);
    for (std::size_t k = 0; k < d; ++k) diff[k] = yp[k] - y[k];
    const double before = norm(sep);
    const double after = norm(diff);
    if (after == 0.0 || before == 0.0)
      throw Error(ErrorCode::DegenerateSeparation, "separation collapsed to zero at step " + std::to_string(t));
    if (u > 0) sum += std::log(after / before);
    for (std::size_t k = 0; k < d; ++k) xp[k] = y[k] + diff[k] * (opts.epsilon / after);
    std::swap(x, y);
    if (u > 0 && (u % opts.checkpoint_every == 0 || u == opts.n_steps)) {
      out.checkpoint_steps.push_back(u);
      out.running_mean.push_back(sum / static_cast<double>(u) * scale);
    }
  }
  out.value = out.running_mean.back();
  return out;
}

LyapunovReport spectrum(const System& sys, std::span<const double> x_attr, int n_exponents,
                        const Options& opts) {
  check_start(sys, x_attr, opts);
  const std::size_t d = sys.dim();
  if (n_exponents < 1 || static_cast<std::size_t>(n_exponents) > d)
    throw Error(ErrorCode::InvalidArgument, "n_exponents must lie in [1, dim]");
  const auto n = static_cast<std::size_t>(n_exponents);
  const double scale = unit_scale(sys);

  // Orthonormal starting directions from the seeded sampler.
  Rng rng(opts.seed);
  std::vector<double> q(n * d);
  for (auto& v : q) v = rng.gaussian();
  orthonormalize(q, n, d, 0);

  std::vector<double> x(x_attr.begin(), x_attr.end()), y(d);
  std::vector<double> sep(n * d), img(n * d);
  std::vector<double> sums(n, 0.0);

  LyapunovReport report;
  report.epsilon = opts.epsilon;
  report.n_steps = opts.n_steps;
  report.warmup = opts.warmup;
  report.seed = opts.seed;
  report.unit = unit_name(sys);
  report.dim = d;
  std::vector<std::vector<double>> history(n);

  for (std::int64_t u = 1 - opts.warmup; u <= opts.n_steps; ++u) {
    const std::int64_t t = u + opts.warmup;
    sys.step_into(x, y);
    check_finite_step(y, t);

    const auto count = static_cast<std::int64_t>(n);
    bool blew_up = false;
#pragma omp parallel for schedule(static) if (opts.parallel && count > 1)
    for (std::int64_t i = 0; i < count; ++i) {
      std::vector<double> xp(d);
      double* s = sep.data() + i * d;
      double* im = img.data() + i * d;
      const double* qi = q.data() + i * d;
      for (std::size_t k = 0; k < d; ++k) {
        xp[k] = x[k] + opts.epsilon * qi[k];
        s[k] = xp[k] - x[k];
      }
      sys.step_into(xp, std::span<double>(im, d));
      for (std::size_t k = 0; k < d; ++k) {
        if (!std::isfinite(im[k])) {
#pragma omp atomic write
          blew_up = true;
        }
        im[k] -= y[k];
      }
    }
    if (blew_up) throw NumericalBlowup(0, t);

    const auto before = orthonormalize(sep, n, d, t);
    const auto after = orthonormalize(img, n, d, t);
    if (u > 0)
      for (std::size_t i = 0; i < n; ++i) sums[i] += std::log(after[i] / before[i]);

    std::swap(q, img);
    std::swap(x, y);
    if (u > 0 && (u % opts.checkpoint_every == 0 || u == opts.n_steps)) {
      report.checkpoint_steps.push_back(u);
      for (std::size_t i = 0; i < n; ++i)
        history[i].push_back(sums[i] / static_cast<double>(u) * scale);
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return history[a].back() > history[b].back(); });
  for (std::size_t i : order) {
    report.exponents.push_back(history[i].back());
    report.running_means.push_back(std::move(history[i]));
  }
  return report;
}

AttractorClass classify(std::span<const double> exponents, std::size_t dim, double theta) {
  if (exponents.empty()) throw Error(ErrorCode::InvalidArgument, "classification needs at least one exponent");
  if (!(theta > 0.0)) throw Error(ErrorCode::InvalidArgument, "theta must be positive");
  int positive = 0;
  int zero = 0;
  for (double l : exponents) {
    if (l > theta) ++positive;
    else if (std::abs(l) <= theta) ++zero;
  }
  AttractorClass cls;
  cls.zero_threshold = theta;
  if (positive > 0) {
    cls.kind = AttractorKind::Chaotic;
    cls.order = positive;
  } else if (static_cast<std::size_t>(zero) == exponents.size() && exponents.size() < dim) {
    cls.kind = AttractorKind::Inconclusive;
  } else if (zero == 0) {
    cls.kind = AttractorKind::FixedPoint;
  } else if (zero == 1) {
    cls.kind = AttractorKind::LimitCycle;
  } else {
    cls.kind = AttractorKind::QuasiPeriodic;
    cls.order = zero;
  }
  return cls;
}

AttractorClass classify(const LyapunovReport& report, double theta) {
  return classify(report.exponents, report.dim, theta);
}

}  // namespace attractors::lyapunov
