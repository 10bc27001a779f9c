#include "attractors/perturb.hpp"

#include <algorithm>
#include <cmath>

#include "attractors/error.hpp"
#include "attractors/reduce.hpp"
#include "attractors/rng.hpp"

namespace attractors::perturb {

std::string to_string(PerturbationKind kind) {
  return kind == PerturbationKind::SmallNoise ? "small_noise" : "circle_damage";
}

std::string to_string(Verdict v) { return v == Verdict::OriginalMode ? "original_mode" : "secondary_mode"; }

nca::Substrate apply_small_noise(const nca::Substrate& s, const PerturbationSpec& spec) {
  if (!(spec.noise_std >= 0.0)) throw Error(ErrorCode::InvalidArgument, "noise_std must be non-negative");
  nca::Substrate out = s;
  if (spec.noise_std == 0.0) return out;
  const auto mask = nca::living_mask(s);
  Rng rng(spec.rng_seed);
  for (int y = 0; y < s.height; ++y)
    for (int x = 0; x < s.width; ++x) {
      if (!mask.at(y, x)) continue;
      for (int c = 0; c < s.channels; ++c) out.at(y, x, c) += spec.noise_std * rng.gaussian();
    }
  return out;
}

StateVector apply_small_noise(std::span<const double> x, const PerturbationSpec& spec) {
  if (!(spec.noise_std >= 0.0)) throw Error(ErrorCode::InvalidArgument, "noise_std must be non-negative");
  StateVector out(x.begin(), x.end());
  if (spec.noise_std == 0.0) return out;
  Rng rng(spec.rng_seed);
  for (auto& v : out) v += spec.noise_std * rng.gaussian();
  return out;
}

std::pair<int, int> damage_center(const nca::Substrate& s, const PerturbationSpec& spec) {
  if (spec.circle_center) return *spec.circle_center;
  const auto mask = nca::living_mask(s);
  int y0 = s.height, y1 = -1, x0 = s.width, x1 = -1;
  for (int y = 0; y < s.height; ++y)
    for (int x = 0; x < s.width; ++x)
      if (mask.at(y, x)) {
        y0 = std::min(y0, y);
        y1 = std::max(y1, y);
        x0 = std::min(x0, x);
        x1 = std::max(x1, x);
      }
  if (y1 < 0) return {s.height / 2, s.width / 2};
  Rng rng(spec.rng_seed);
  const auto cy = static_cast<int>(rng.integer(y0, y1));
  const auto cx = static_cast<int>(rng.integer(x0, x1));
  return {cy, cx};
}

nca::Substrate apply_circle_damage(const nca::Substrate& s, const PerturbationSpec& spec) {
  if (spec.circle_radius < 1) throw Error(ErrorCode::InvalidArgument, "circle radius must be >= 1");
  const auto [cy, cx] = damage_center(s, spec);
  const long r2 = static_cast<long>(spec.circle_radius) * spec.circle_radius;
  nca::Substrate out = s;
  for (int y = 0; y < s.height; ++y)
    for (int x = 0; x < s.width; ++x) {
      const long dy = y - cy, dx = x - cx;
      if (dy * dy + dx * dx < r2)
        for (int c = 0; c < s.channels; ++c) out.at(y, x, c) = 0.0;
    }
  return out;
}

StateVector perturb_state(const System& sys, std::span<const double> x, const PerturbationSpec& spec) {
  const auto grid = sys.grid();
  if (!grid) {
    if (spec.kind == PerturbationKind::CircleDamage)
      throw Error(ErrorCode::InvalidArgument, "circle damage needs a grid system");
    return apply_small_noise(x, spec);
  }
  const auto s = nca::Substrate::from_flat(x, *grid);
  return spec.kind == PerturbationKind::SmallNoise ? apply_small_noise(s, spec).data
                                                   : apply_circle_damage(s, spec).data;
}

std::vector<double> mean_position(const Trajectory& traj) {
  if (traj.rows() == 0) throw Error(ErrorCode::InvalidArgument, "empty trajectory");
  std::vector<double> m(traj.dim, 0.0);
  for (std::size_t t = 0; t < traj.rows(); ++t) {
    const auto row = traj.row(t);
    for (std::size_t j = 0; j < traj.dim; ++j) m[j] += row[j];
  }
  for (auto& v : m) v /= static_cast<double>(traj.rows());
  return m;
}

double mode_distance(const Trajectory& tail, const Trajectory& reference_tail) {
  if (tail.dim != reference_tail.dim) throw Error(ErrorCode::InvalidArgument, "tail dimensions differ");
  const auto a = mean_position(tail);
  const auto b = mean_position(reference_tail);
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += (a[j] - b[j]) * (a[j] - b[j]);
  return std::sqrt(s);
}

RecoveryResult recover(const System& sys, std::span<const double> perturbed, const Trajectory& reference_tail,
                       const RecoveryOptions& opts) {
  if (opts.tail < 1 || opts.steps < opts.tail)
    throw Error(ErrorCode::InvalidArgument, "recovery needs steps >= tail >= 1");
  RecoveryResult res;
  res.trajectory = evolve(sys, perturbed, opts.steps, 1);
  const auto tail = static_cast<std::size_t>(opts.tail);
  res.converged_tail = res.trajectory.slice(res.trajectory.rows() - tail, tail);
  res.mode_distance = mode_distance(res.converged_tail, reference_tail);
  res.verdict = res.mode_distance > opts.mode_threshold ? Verdict::SecondaryMode : Verdict::OriginalMode;
  return res;
}

namespace {

struct Transform {
  reduce::ScalerModel scaler;
  reduce::PcaModel pca;

  static Transform fit(const Trajectory& data, std::size_t components) {
    Transform tf;
    tf.scaler = reduce::fit_scaler(data);
    const auto scaled = reduce::apply_scaler(tf.scaler, data);
    const std::size_t r = std::min({components, data.rows() - 1, data.dim});
    tf.pca = reduce::fit_pca(scaled, r, reduce::FitBasis::Scaled);
    return tf;
  }

  Trajectory operator()(const Trajectory& t) const {
    return reduce::project(pca, reduce::apply_scaler(scaler, t));
  }
};

Trajectory concatenate(const Trajectory& a, const Trajectory& b) {
  Trajectory out = a;
  out.states.insert(out.states.end(), b.states.begin(), b.states.end());
  return out;
}

}  // namespace

BatchStudy batch_perturbation_study(const System& sys, std::span<const double> x_attr, const BatchOptions& opts) {
  if (opts.n_runs < 1) throw Error(ErrorCode::InvalidArgument, "n_runs must be >= 1");
  if (opts.pca_components < 1) throw Error(ErrorCode::InvalidArgument, "pca_components must be >= 1");
  const auto& rec = opts.recovery;
  if (rec.tail < 2 || rec.steps < rec.tail)
    throw Error(ErrorCode::InvalidArgument, "recovery needs steps >= tail >= 2");

  BatchStudy study;
  const auto reference = evolve(sys, x_attr, rec.tail, 1);
  study.reference_tail = reference.slice(1, static_cast<std::size_t>(rec.tail));

  study.runs.resize(static_cast<std::size_t>(opts.n_runs));
  const auto runs = static_cast<std::int64_t>(opts.n_runs);
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < runs; ++i) {
    auto& run = study.runs[static_cast<std::size_t>(i)];
    run.spec = opts.spec;
    run.spec.rng_seed = opts.spec.rng_seed + static_cast<std::uint64_t>(i);
    run.seed = run.spec.rng_seed;
    try {
      const auto start = perturb_state(sys, x_attr, run.spec);
      run.result = recover(sys, start, study.reference_tail, rec);
    } catch (const std::exception& e) {
      run.error = e.what();
    }
  }

  Transform shared;
  if (opts.spec.kind == PerturbationKind::SmallNoise) {
    study.transform = "refit";
    Trajectory pooled = study.reference_tail;
    for (const auto& run : study.runs)
      if (run.result) pooled = concatenate(pooled, run.result->converged_tail);
    shared = Transform::fit(pooled, opts.pca_components);
  } else {
    study.transform = "original";
    shared = Transform::fit(study.reference_tail, opts.pca_components);
  }
  study.reference_projected = shared(study.reference_tail);
  for (auto& run : study.runs) {
    if (!run.result) continue;
    run.projected = shared(run.result->trajectory);
    const auto own = Transform::fit(run.result->converged_tail, opts.pca_components);
    run.tail_own_projection = own(run.result->converged_tail);
  }
  return study;
}

}  // namespace attractors::perturb
