#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "attractors/dynsys.hpp"
#include "attractors/error.hpp"
#include "attractors/lyapunov.hpp"

using namespace attractors;
using namespace attractors::lyapunov;

namespace {

SystemHandle diag_map(std::vector<double> d) { return make_oracle(OracleSpec{"linear_diag", {}, std::move(d)}); }

Options steps(std::int64_t n, std::uint64_t seed = 0) {
  Options o;
  o.n_steps = n;
  o.seed = seed;
  return o;
}

}  // namespace

TEST_SUITE("lyapunov") {

TEST_CASE("diagonal map recovers log of each entry") {
  // Analytic: the linearisation of x -> Dx is D, so lambda_i = ln |d_i|.
  const auto sys = diag_map({2.0, 0.5});
  const auto r = spectrum(*sys, StateVector{0, 0}, 2, steps(1000));
  REQUIRE(r.exponents.size() == 2);
  CHECK(std::abs(r.exponents[0] - std::log(2.0)) <= 1e-6);
  CHECK(std::abs(r.exponents[1] - std::log(0.5)) <= 1e-6);
  const double sum = r.exponents[0] + r.exponents[1];
  CHECK(std::abs(sum - std::log(2.0 * 0.5)) <= 1e-6);
  CHECK(r.unit == "per_step");
}

TEST_CASE("diagonal maps with distinct entries, several seeds and epsilons") {
  const std::vector<double> d{-1.5, 0.9, 0.3, 0.05};
  std::vector<double> want;
  for (double v : d) want.push_back(std::log(std::abs(v)));
  std::sort(want.rbegin(), want.rend());
  const double logdet = std::accumulate(want.begin(), want.end(), 0.0);
  const auto sys = diag_map(d);
  for (std::uint64_t seed : {0u, 1u, 7u})
    for (double eps : {1e-3, 1e-4, 1e-5}) {
      auto o = steps(1000, seed);
      o.epsilon = eps;
      const auto r = spectrum(*sys, StateVector(4, 0.0), 4, o);
      for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(r.exponents[i] - want[i]) <= 1e-6);
      CHECK(std::abs(std::accumulate(r.exponents.begin(), r.exponents.end(), 0.0) - logdet) <= 1e-6);
    }
}

TEST_CASE("leading subset of a diagonal spectrum") {
  const auto sys = diag_map({0.2, 1.1, 0.6});
  const auto r = spectrum(*sys, StateVector(3, 0.0), 2, steps(1000, 3));
  CHECK(std::abs(r.exponents[0] - std::log(1.1)) <= 1e-6);
  CHECK(std::abs(r.exponents[1] - std::log(0.6)) <= 1e-6);
}

TEST_CASE("top exponent of a uniform contraction") {
  const auto sys = diag_map({0.5, 0.5});
  const auto t = top_exponent(*sys, StateVector{0, 0}, steps(1000));
  CHECK(std::abs(t.value - std::log(0.5)) <= 1e-6);
}

TEST_CASE("top exponent agrees with the leading spectrum entry on a linear map") {
  const auto sys = diag_map({1.3, 0.7, -0.2});
  const auto t = top_exponent(*sys, StateVector(3, 0.0), steps(1000, 5));
  const auto r = spectrum(*sys, StateVector(3, 0.0), 1, steps(1000, 5));
  CHECK(std::abs(t.value - std::log(1.3)) <= 1e-6);
  CHECK(std::abs(r.exponents[0] - std::log(1.3)) <= 1e-6);
}

TEST_CASE("identity gives exact zeros") {
  const auto sys = make_oracle("identity", {{"dim", 3}});
  const StateVector x{0.3, -2.0, 5.0};
  const auto r = spectrum(*sys, x, 3, steps(500));
  for (double l : r.exponents) CHECK(l == 0.0);
  CHECK(top_exponent(*sys, x, steps(500)).value == 0.0);
  CHECK(classify(r, 0.002).kind == AttractorKind::QuasiPeriodic);
}

TEST_CASE("torus has two zero exponents and two contracting ones") {
  // Radial map r -> 1 + 0.9 (r - 1) contributes ln 0.9 twice; rotations contribute 0.
  const auto sys = make_oracle("torus");
  const auto r = spectrum(*sys, sys->initial_state(), 4, steps(3000, 2));
  CHECK(std::abs(r.exponents[0]) < 1e-6);
  CHECK(std::abs(r.exponents[1]) < 1e-6);
  CHECK(std::abs(r.exponents[2] - std::log(0.9)) < 1e-6);
  CHECK(std::abs(r.exponents[3] - std::log(0.9)) < 1e-6);
  const auto c = classify(r, 0.002);
  CHECK(c.label() == "quasi_periodic(2)");
}

TEST_CASE("report structure: sorted, running means end at the exponents") {
  const auto sys = make_oracle("lorenz");
  const auto x = burn_in(*sys, StateVector{1, 1, 1}, 2000);
  auto o = steps(1050);
  o.checkpoint_every = 100;
  const auto r = spectrum(*sys, x, 3, o);
  CHECK(std::is_sorted(r.exponents.rbegin(), r.exponents.rend()));
  REQUIRE(r.checkpoint_steps.size() == 11);
  CHECK(r.checkpoint_steps.front() == 100);
  CHECK(r.checkpoint_steps.back() == 1050);
  for (std::size_t i = 0; i < 3; ++i) {
    REQUIRE(r.running_means[i].size() == 11);
    CHECK(r.running_means[i].back() == r.exponents[i]);
  }
  CHECK(r.unit == "per_unit_time");
  CHECK(r.dim == 3);
}

TEST_CASE("spectrum is deterministic and parallel equals serial bitwise") {
  const auto sys = make_oracle("lorenz");
  const auto x = burn_in(*sys, StateVector{1, 1, 1}, 1000);
  auto o = steps(800, 11);
  const auto a = spectrum(*sys, x, 3, o);
  const auto b = spectrum(*sys, x, 3, o);
  o.parallel = false;
  const auto c = spectrum(*sys, x, 3, o);
  CHECK(a.exponents == b.exponents);
  CHECK(a.exponents == c.exponents);
  CHECK(a.running_means == c.running_means);
}

TEST_CASE("different seeds give different but close lorenz estimates") {
  const auto sys = make_oracle("lorenz");
  const auto x = burn_in(*sys, StateVector{1, 1, 1}, 1000);
  const auto a = spectrum(*sys, x, 1, steps(2000, 1));
  const auto b = spectrum(*sys, x, 1, steps(2000, 2));
  CHECK(a.exponents[0] != b.exponents[0]);
  // 20 time units only, so the spread between seeds is still visible.
  CHECK(std::abs(a.exponents[0] - b.exponents[0]) < 0.25);
}

TEST_CASE("degenerate separation is reported, not skipped") {
  const auto sys = diag_map({0.0, 0.5});
  try {
    spectrum(*sys, StateVector{0, 0}, 2, steps(10));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK((e.code() == ErrorCode::DegenerateSeparation || e.code() == ErrorCode::RankCollapse));
  }
  const auto zero = diag_map({0.0, 0.0});
  try {
    top_exponent(*zero, StateVector{0, 0}, steps(10));
    FAIL("expected DegenerateSeparation");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateSeparation);
  }
}

TEST_CASE("rank collapse when directions merge") {
  // Copies x0 into x1, so every image lies on the diagonal.
  class Collapse : public System {
   public:
    Collapse() : System("collapse", 2, {}, StepKind::AnalyticMap) {}
    void step_into(std::span<const double> x, std::span<double> y) const override {
      y[0] = x[0];
      y[1] = x[0];
    }
    StateVector initial_state() const override { return {0, 0}; }
  };
  Collapse sys;
  try {
    spectrum(sys, StateVector{0, 0}, 2, steps(10));
    FAIL("expected RankCollapse");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::RankCollapse);
  }
}

TEST_CASE("bad arguments") {
  const auto sys = diag_map({0.5, 0.5});
  CHECK_THROWS_AS(spectrum(*sys, StateVector{0, 0}, 3, steps(10)), Error);
  CHECK_THROWS_AS(spectrum(*sys, StateVector{0, 0}, 0, steps(10)), Error);
  CHECK_THROWS_AS(spectrum(*sys, StateVector{0, 0}, 1, steps(0)), Error);
  auto o = steps(10);
  o.epsilon = 0.0;
  CHECK_THROWS_AS(top_exponent(*sys, StateVector{0, 0}, o), Error);
  CHECK_THROWS_AS(top_exponent(*sys, StateVector{0}, steps(10)), Error);
}

TEST_CASE("classification table") {
  auto label = [](std::vector<double> l, std::size_t dim, double th) { return classify(l, dim, th).label(); };
  CHECK(label({-0.01, -0.02}, 2, 0.002) == "fixed_point");
  CHECK(label({0.0, -0.002, -0.007}, 3, 0.001) == "limit_cycle");
  CHECK(label({0.906, 0.0, -14.573}, 3, 0.05) == "chaotic(1)");
  CHECK(label({0.3, 0.1, 0.0, -1.0}, 4, 0.05) == "chaotic(2)");
  CHECK(label({0.0, 0.0, -0.5}, 3, 0.01) == "quasi_periodic(2)");
  CHECK(label({0.0, 0.001}, 10, 0.002) == "inconclusive");
  CHECK(label({0.0, 0.001}, 2, 0.002) == "quasi_periodic(2)");
  CHECK(label({-0.001}, 1, 0.002) == "limit_cycle");
  CHECK_THROWS_AS(classify(std::vector<double>{}, 1, 0.1), Error);
  CHECK_THROWS_AS(classify(std::vector<double>{0.1}, 1, 0.0), Error);
}

TEST_CASE("classification is invariant under joint scaling") {
  const std::vector<std::vector<double>> cases{
      {-0.01, -0.02}, {0.0, -0.002, -0.007}, {0.906, 0.0, -14.573}, {0.0, 0.0, -0.5}, {0.004, -0.3}};
  for (const auto& l : cases)
    for (double c : {0.01, 0.5, 3.0, 100.0}) {
      std::vector<double> scaled;
      for (double v : l) scaled.push_back(v * c);
      CHECK(classify(l, l.size(), 0.002).label() == classify(scaled, l.size(), 0.002 * c).label());
    }
}

}  // TEST_SUITE
