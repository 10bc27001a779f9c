#include <doctest.h>

#include <cmath>

#include "attractors/dynsys.hpp"
#include "attractors/error.hpp"
#include "attractors/nca.hpp"
#include "attractors/perturb.hpp"

using namespace attractors;
using namespace attractors::perturb;

namespace {

nca::Substrate full_grid(int H, int W, double value) {
  nca::Substrate s(H, W);
  for (auto& v : s.data) v = value;
  return s;
}

}  // namespace

TEST_SUITE("perturb") {

TEST_CASE("noise has the requested spread") {
  const std::size_t n = 100000;
  PerturbationSpec spec;
  spec.noise_std = 0.002;
  spec.rng_seed = 17;
  const StateVector x(n, 1.0);
  const auto y = apply_small_noise(x, spec);
  double mean = 0.0, sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean += y[i] - 1.0;
  mean /= n;
  for (std::size_t i = 0; i < n; ++i) sq += std::pow(y[i] - 1.0 - mean, 2);
  const double sd = std::sqrt(sq / (n - 1));
  CHECK(std::abs(sd - 0.002) <= 0.05 * 0.002);
  CHECK(std::abs(mean) < 5 * 0.002 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("noise is seeded") {
  PerturbationSpec spec;
  spec.rng_seed = 3;
  const StateVector x(50, 0.0);
  CHECK(apply_small_noise(x, spec) == apply_small_noise(x, spec));
  auto other = spec;
  other.rng_seed = 4;
  CHECK(apply_small_noise(x, spec) != apply_small_noise(x, other));
}

TEST_CASE("noise touches living cells only") {
  auto s = nca::seed_state(12, 12);
  PerturbationSpec spec;
  spec.rng_seed = 1;
  const auto mask = nca::living_mask(s);
  const auto y = apply_small_noise(s, spec);
  for (int r = 0; r < 12; ++r)
    for (int c = 0; c < 12; ++c) {
      bool changed = false;
      for (int ch = 0; ch < 16; ++ch) changed |= y.at(r, c, ch) != s.at(r, c, ch);
      CHECK(changed == mask.at(r, c));
    }
}

TEST_CASE("circle damage zeroes strictly inside the radius") {
  const auto s = full_grid(20, 20, 0.5);
  PerturbationSpec spec;
  spec.kind = PerturbationKind::CircleDamage;
  spec.circle_radius = 4;
  spec.circle_center = std::pair{10, 7};
  const auto d = apply_circle_damage(s, spec);
  for (int y = 0; y < 20; ++y)
    for (int x = 0; x < 20; ++x) {
      const bool inside = (y - 10) * (y - 10) + (x - 7) * (x - 7) < 16;
      for (int c = 0; c < 16; ++c) CHECK(d.at(y, x, c) == (inside ? 0.0 : 0.5));
    }
  CHECK(d.at(10, 11, 0) == 0.5);  // exactly on the circle survives
  CHECK(apply_circle_damage(d, spec) == d);
}

TEST_CASE("random damage centre lies in the living bounding box") {
  auto s = nca::Substrate(30, 30);
  for (int y = 5; y <= 9; ++y)
    for (int x = 20; x <= 25; ++x) s.at(y, x, 3) = 1.0;
  const auto mask = nca::living_mask(s);
  int y0 = 30, y1 = -1, x0 = 30, x1 = -1;
  for (int y = 0; y < 30; ++y)
    for (int x = 0; x < 30; ++x)
      if (mask.at(y, x)) {
        y0 = std::min(y0, y);
        y1 = std::max(y1, y);
        x0 = std::min(x0, x);
        x1 = std::max(x1, x);
      }
  PerturbationSpec spec;
  spec.kind = PerturbationKind::CircleDamage;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    spec.rng_seed = seed;
    const auto [cy, cx] = damage_center(s, spec);
    CHECK(cy >= y0);
    CHECK(cy <= y1);
    CHECK(cx >= x0);
    CHECK(cx <= x1);
  }
}

TEST_CASE("perturb_state dispatch") {
  const auto sys = make_oracle("lorenz");
  PerturbationSpec spec;
  spec.kind = PerturbationKind::CircleDamage;
  CHECK_THROWS_AS(perturb_state(*sys, StateVector{1, 1, 1}, spec), Error);
  spec.kind = PerturbationKind::SmallNoise;
  CHECK(perturb_state(*sys, StateVector{1, 1, 1}, spec).size() == 3);
}

TEST_CASE("mode distance axioms") {
  const auto sys = make_oracle("lorenz");
  const auto t = evolve(*sys, burn_in(*sys, StateVector{1, 1, 1}, 1000), 300, 1);
  CHECK(mode_distance(t, t) == 0.0);
  auto shifted = t;
  const std::vector<double> v{0.3, -1.2, 2.0};
  for (std::size_t i = 0; i < t.rows(); ++i)
    for (std::size_t d = 0; d < 3; ++d) shifted.states[i * 3 + d] += v[d];
  const double len = std::sqrt(0.09 + 1.44 + 4.0);
  CHECK(std::abs(mode_distance(shifted, t) - len) <= 1e-12 * (1.0 + len) * 100);
  CHECK(mode_distance(shifted, t) == doctest::Approx(mode_distance(t, shifted)));
}

TEST_CASE("recovery on a contracting map returns to the original mode") {
  const auto sys = make_oracle(OracleSpec{"linear_diag", {}, {0.5, 0.9}});
  const auto ref = evolve(*sys, StateVector{0, 0}, 100, 1).slice(1, 100);
  RecoveryOptions o;
  o.steps = 400;
  o.tail = 100;
  const auto r = recover(*sys, StateVector{0.3, -0.2}, ref, o);
  CHECK(r.trajectory.rows() == 401);
  CHECK(r.converged_tail.rows() == 100);
  CHECK(std::equal(r.converged_tail.last().begin(), r.converged_tail.last().end(), r.trajectory.last().begin()));
  CHECK(r.verdict == Verdict::OriginalMode);
  CHECK(r.mode_distance < 1e-9);
}

TEST_CASE("recovery on the identity keeps the displacement") {
  const auto sys = make_oracle("identity", {{"dim", 2}});
  const auto ref = evolve(*sys, StateVector{0, 0}, 10, 1).slice(1, 10);
  RecoveryOptions o;
  o.steps = 20;
  o.tail = 10;
  const auto r = recover(*sys, StateVector{3, 4}, ref, o);
  CHECK(r.mode_distance == doctest::Approx(5.0));
  CHECK(r.verdict == Verdict::SecondaryMode);
}

TEST_CASE("batch study is deterministic and seeds runs consecutively") {
  const auto sys = make_oracle("torus");
  BatchOptions o;
  o.n_runs = 4;
  o.spec.rng_seed = 100;
  o.spec.noise_std = 0.01;
  o.recovery.steps = 200;
  o.recovery.tail = 50;
  o.pca_components = 2;
  const auto a = batch_perturbation_study(*sys, sys->initial_state(), o);
  const auto b = batch_perturbation_study(*sys, sys->initial_state(), o);
  REQUIRE(a.runs.size() == 4);
  CHECK(a.transform == "refit");
  CHECK(a.reference_tail.rows() == 50);
  for (int i = 0; i < 4; ++i) {
    CHECK(a.runs[i].seed == 100u + i);
    REQUIRE(a.runs[i].result.has_value());
    CHECK(a.runs[i].result->trajectory.states == b.runs[i].result->trajectory.states);
    CHECK(a.runs[i].projected.states == b.runs[i].projected.states);
    CHECK(a.runs[i].projected.dim == 2);
  }
}

TEST_CASE("batch records per-run failures and continues") {
  const auto sys = make_oracle("lorenz");
  BatchOptions o;
  o.n_runs = 2;
  o.spec.kind = PerturbationKind::CircleDamage;
  o.recovery.steps = 10;
  o.recovery.tail = 5;
  const auto s = batch_perturbation_study(*sys, StateVector{1, 1, 1}, o);
  REQUIRE(s.runs.size() == 2);
  for (const auto& r : s.runs) {
    CHECK(!r.result.has_value());
    CHECK(!r.error.empty());
  }
}

}  // TEST_SUITE
