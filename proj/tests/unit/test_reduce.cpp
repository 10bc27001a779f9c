#include <doctest.h>

#include <cmath>

#include "attractors/dynsys.hpp"
#include "attractors/error.hpp"
#include "attractors/reduce.hpp"
#include "attractors/rng.hpp"

using namespace attractors;
using namespace attractors::reduce;

namespace {

// Points on a random r-dimensional affine subspace of R^D.
Trajectory subspace_cloud(std::size_t T, std::size_t D, std::size_t r, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> basis(r * D), offset(D);
  for (auto& v : basis) v = rng.gaussian();
  for (auto& v : offset) v = 5.0 * rng.gaussian();
  Trajectory t(T, D);
  for (std::size_t i = 0; i < T; ++i) {
    std::vector<double> c(r);
    for (auto& v : c) v = rng.gaussian();
    for (std::size_t d = 0; d < D; ++d) {
      double s = offset[d];
      for (std::size_t k = 0; k < r; ++k) s += c[k] * basis[k * D + d];
      t.states[i * D + d] = s;
    }
  }
  return t;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

TEST_SUITE("reduce") {

TEST_CASE("scaler standardises and inverts") {
  const auto t = subspace_cloud(200, 6, 3, 1);
  const auto m = fit_scaler(t);
  const auto z = apply_scaler(m, t);
  for (std::size_t d = 0; d < 6; ++d) {
    const auto col = z.column(d);
    double mean = 0.0, sq = 0.0;
    for (double v : col) mean += v;
    mean /= col.size();
    for (double v : col) sq += (v - mean) * (v - mean);
    CHECK(std::abs(mean) < 1e-12);
    CHECK(std::sqrt(sq / col.size()) == doctest::Approx(1.0).epsilon(1e-12));
  }
  const auto back = invert_scaler(m, z);
  for (std::size_t i = 0; i < t.states.size(); ++i)
    CHECK(std::abs(back.states[i] - t.states[i]) <= 1e-10 * (1.0 + std::abs(t.states[i])));
}

TEST_CASE("constant axis maps to zeros") {
  Trajectory t(10, 2);
  for (std::size_t i = 0; i < 10; ++i) {
    t.states[i * 2] = static_cast<double>(i);
    t.states[i * 2 + 1] = 3.0;
  }
  const auto m = fit_scaler(t);
  CHECK(m.scale[1] == 1.0);
  const auto z = apply_scaler(m, t);
  for (std::size_t i = 0; i < 10; ++i) CHECK(z.states[i * 2 + 1] == 0.0);
}

TEST_CASE("intrinsic dimension of a rank-r cloud") {
  for (std::size_t r : {1u, 2u, 5u}) {
    const auto t = subspace_cloud(300, 12, r, 10 + r);
    const auto m = fit_pca(t, 8);
    CHECK(intrinsic_dimension(m, 0.95) <= r);
    CHECK(intrinsic_dimension(m, 0.999999) == r);
    CHECK(m.cumulative_ratio[r - 1] == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("components are orthonormal on both routes") {
  // T < D takes the Gram route, T > D the scatter route.
  for (auto [T, D] : {std::pair<std::size_t, std::size_t>{40, 100}, {400, 20}}) {
    const auto t = subspace_cloud(T, D, 6, T + D);
    const auto m = fit_pca(t, 10);
    for (std::size_t i = 0; i < 10; ++i)
      for (std::size_t j = 0; j < 10; ++j)
        CHECK(std::abs(dot(m.component(i), m.component(j)) - (i == j ? 1.0 : 0.0)) <= 1e-10);
    for (std::size_t i = 1; i < 10; ++i) CHECK(m.explained_variance[i] <= m.explained_variance[i - 1]);
    CHECK(m.cumulative_ratio.back() <= 1.0 + 1e-12);
  }
}

TEST_CASE("gram and scatter routes agree on the spectrum") {
  const auto t = subspace_cloud(60, 50, 4, 3);
  const auto wide = fit_pca(t, 4);
  // Same data with T > D through duplicated rows keeps the covariance.
  Trajectory doubled(120, 50);
  std::copy(t.states.begin(), t.states.end(), doubled.states.begin());
  std::copy(t.states.begin(), t.states.end(), doubled.states.begin() + t.states.size());
  const auto tall = fit_pca(doubled, 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(wide.explained_variance_ratio[i] == doctest::Approx(tall.explained_variance_ratio[i]).epsilon(1e-9));
    CHECK(std::abs(std::abs(dot(wide.component(i), tall.component(i))) - 1.0) < 1e-8);
  }
}

TEST_CASE("gram matrix parallel equals serial bitwise") {
  const auto t = subspace_cloud(37, 501, 7, 5);
  CHECK(gram_matrix(t.states, 37, 501) == gram_matrix_serial(t.states, 37, 501));
  const auto t2 = subspace_cloud(80, 40, 7, 6);
  const auto serial = fit_pca(t2, 5, FitBasis::Unscaled, false);
  const auto parallel = fit_pca(t2, 5, FitBasis::Unscaled, true);
  CHECK(serial.components == parallel.components);
}

TEST_CASE("projection never lengthens centred rows") {
  const auto t = subspace_cloud(100, 10, 10, 8);
  const auto m = fit_pca(t, 3);
  const auto p = project(m, t);
  CHECK(p.dim == 3);
  for (std::size_t i = 0; i < t.rows(); ++i) {
    double full = 0.0;
    for (std::size_t d = 0; d < 10; ++d) full += std::pow(t.states[i * 10 + d] - m.mean[d], 2);
    const auto row = p.row(i);
    CHECK(dot(row, row) <= full * (1 + 1e-12) + 1e-12);
  }
}

TEST_CASE("rank deficiency is reported, not hidden") {
  const auto t = subspace_cloud(100, 10, 10, 2);
  const auto m = fit_pca(t, 2);
  try {
    intrinsic_dimension(m, 0.95);
    FAIL("expected InsufficientRank");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InsufficientRank);
  }
  CHECK_THROWS_AS(fit_pca(t, 100), Error);
  CHECK_THROWS_AS(fit_pca(Trajectory(1, 3), 1), Error);
}

TEST_CASE("volume proxy of a fixed point is zero") {
  const auto sys = make_oracle("identity", {{"dim", 3}});
  const auto v = volume_proxy(*sys, StateVector{1, 2, 3}, 1000, 100);
  CHECK(v.windows.size() == 10);
  for (const auto& w : v.windows) CHECK(w.sum_distance == 0.0);
  CHECK(!v.dissipative);
}

TEST_CASE("volume proxy of a rotation is flat") {
  const auto sys = make_oracle("torus");
  const auto v = volume_proxy(*sys, sys->initial_state(), 40000, 2000);
  CHECK(std::abs(v.slope) <= 1e-6 * v.mean);
  CHECK(!v.dissipative);
  CHECK(v.verdict == "no clear downward trend");
}

TEST_CASE("volume proxy of a mild contraction shrinks") {
  const auto sys = make_oracle(OracleSpec{"linear_diag", {}, {0.9999, 0.9998}});
  const auto v = volume_proxy(*sys, StateVector{1, 1}, 40000, 2000);
  CHECK(v.slope < 0.0);
  CHECK(v.dissipative);
  for (std::size_t i = 1; i < v.windows.size(); ++i)
    CHECK(v.windows[i].sum_distance < v.windows[i - 1].sum_distance);
}

TEST_CASE("summary trend rule") {
  std::vector<VolumeWindow> down, flat;
  for (std::size_t i = 0; i < 10; ++i) {
    down.push_back({i, static_cast<std::int64_t>(i * 10), 100.0 - 5.0 * i});
    flat.push_back({i, static_cast<std::int64_t>(i * 10), 100.0 + (i % 2 ? 3.0 : -3.0)});
  }
  const auto d = summarize_volume(down);
  CHECK(d.slope == doctest::Approx(-5.0));
  CHECK(d.dissipative);
  CHECK(!summarize_volume(flat).dissipative);
}

}  // TEST_SUITE
