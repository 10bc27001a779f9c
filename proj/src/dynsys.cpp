#include "attractors/dynsys.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <set>

#include "attractors/error.hpp"

namespace attractors {

std::string to_string(StepKind kind) {
  switch (kind) {
    case StepKind::AnalyticMap: return "analytic-map";
    case StepKind::OdeRk4: return "ode-rk4-discretized";
    case StepKind::Nca: return "nca";
  }
  return "unknown";
}

System::System(std::string name, std::size_t dim, ParamMap params, StepKind kind,
               double time_step)
    : name_(std::move(name)),
      dim_(dim),
      params_(std::move(params)),
      kind_(kind),
      time_step_(time_step) {
  if (dim_ == 0) throw Error(ErrorCode::InvalidArgument, "system dimension must be positive");
}

void Trajectory::append(std::span<const double> x) {
  if (dim == 0) dim = x.size();
  if (x.size() != dim) throw Error(ErrorCode::InvalidArgument, "row dimension mismatch");
  states.insert(states.end(), x.begin(), x.end());
}

Trajectory Trajectory::slice(std::size_t first, std::size_t count) const {
  if (first + count > rows()) throw Error(ErrorCode::InvalidArgument, "slice out of range");
  Trajectory out;
  out.dim = dim;
  out.dt = dt;
  out.t_start = t_start + static_cast<std::int64_t>(std::llround(first * dt));
  out.states.assign(states.begin() + first * dim, states.begin() + (first + count) * dim);
  return out;
}

std::vector<double> Trajectory::column(std::size_t j) const {
  std::vector<double> c(rows());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = states[i * dim + j];
  return c;
}

bool all_finite(std::span<const double> x) {
  return std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); });
}

namespace {

std::size_t first_non_finite(std::span<const double> x) {
  for (std::size_t i = 0; i < x.size(); ++i)
    if (!std::isfinite(x[i])) return i;
  return x.size();
}

void check_input(const System& sys, std::span<const double> x) {
  if (x.size() != sys.dim())
    throw Error(ErrorCode::InvalidArgument,
                "state has dimension " + std::to_string(x.size()) + ", system " + sys.name() +
                    " expects " + std::to_string(sys.dim()));
  if (auto bad = first_non_finite(x); bad != x.size())
    throw Error(ErrorCode::InvalidArgument, "input state is non-finite at index " + std::to_string(bad));
}

void step_checked(const System& sys, std::span<const double> x, std::span<double> out,
                  std::int64_t timestep) {
  sys.step_into(x, out);
  if (auto bad = first_non_finite(out); bad != out.size()) throw NumericalBlowup(bad, timestep);
}

// ---------------------------------------------------------------------------
// Reference systems

template <std::size_t N, class Field>
std::array<double, N> rk4(const std::array<double, N>& x, double h, Field&& field) {
  std::array<double, N> k1 = field(x), k2, k3, k4, tmp;
  for (std::size_t i = 0; i < N; ++i) tmp[i] = x[i] + 0.5 * h * k1[i];
  k2 = field(tmp);
  for (std::size_t i = 0; i < N; ++i) tmp[i] = x[i] + 0.5 * h * k2[i];
  k3 = field(tmp);
  for (std::size_t i = 0; i < N; ++i) tmp[i] = x[i] + h * k3[i];
  k4 = field(tmp);
  std::array<double, N> out;
  for (std::size_t i = 0; i < N; ++i)
    out[i] = x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return out;
}

double param_or(const ParamMap& p, const std::string& key, double fallback) {
  auto it = p.find(key);
  return it == p.end() ? fallback : it->second;
}

void reject_unknown(const std::string& system, const ParamMap& p,
                    std::initializer_list<const char*> known) {
  std::set<std::string> allowed(known.begin(), known.end());
  for (const auto& [key, value] : p) {
    if (!allowed.count(key))
      throw Error(ErrorCode::InvalidArgument, "unknown parameter '" + key + "' for " + system);
    if (!std::isfinite(value))
      throw Error(ErrorCode::InvalidArgument, "parameter '" + key + "' is not finite");
  }
}

class Lorenz final : public System {
 public:
  Lorenz(double sigma, double rho, double beta, double h)
      : System("lorenz", 3, {{"sigma", sigma}, {"rho", rho}, {"beta", beta}, {"h", h}},
               StepKind::OdeRk4, h),
        sigma_(sigma), rho_(rho), beta_(beta) {}

  StateVector initial_state() const override { return {1.0, 1.0, 1.0}; }

  void step_into(std::span<const double> x, std::span<double> out) const override {
    auto next = rk4<3>({x[0], x[1], x[2]}, time_step(), [this](const std::array<double, 3>& s) {
      return std::array<double, 3>{sigma_ * (s[1] - s[0]), s[0] * (rho_ - s[2]) - s[1],
                                   s[0] * s[1] - beta_ * s[2]};
    });
    std::copy(next.begin(), next.end(), out.begin());
  }

 private:
  double sigma_, rho_, beta_;
};

class VanDerPol final : public System {
 public:
  VanDerPol(double mu, double h)
      : System("van_der_pol", 2, {{"mu", mu}, {"h", h}}, StepKind::OdeRk4, h), mu_(mu) {}

  StateVector initial_state() const override { return {2.0, 0.0}; }

  void step_into(std::span<const double> x, std::span<double> out) const override {
    auto next = rk4<2>({x[0], x[1]}, time_step(), [this](const std::array<double, 2>& s) {
      return std::array<double, 2>{s[1], mu_ * (1.0 - s[0] * s[0]) * s[1] - s[0]};
    });
    out[0] = next[0];
    out[1] = next[1];
  }

 private:
  double mu_;
};

// Two independent rotations, each followed by a radial relaxation
// r -> 1 + contraction * (r - 1). On the unit torus the radial part is the
// identity, so orbits there are pure quasi-periodic rotations.
class Torus final : public System {
 public:
  Torus(double omega1, double omega2, double contraction)
      : System("torus", 4,
               {{"omega1", omega1}, {"omega2", omega2}, {"contraction", contraction}},
               StepKind::AnalyticMap),
        contraction_(contraction),
        c1_(std::cos(omega1)), s1_(std::sin(omega1)),
        c2_(std::cos(omega2)), s2_(std::sin(omega2)) {}

  StateVector initial_state() const override { return {1.0, 0.0, 1.0, 0.0}; }

  void step_into(std::span<const double> x, std::span<double> out) const override {
    rotate(x[0], x[1], c1_, s1_, out[0], out[1]);
    rotate(x[2], x[3], c2_, s2_, out[2], out[3]);
  }

 private:
  void rotate(double a, double b, double c, double s, double& oa, double& ob) const {
    double ra = c * a - s * b;
    double rb = s * a + c * b;
    const double r = std::hypot(a, b);
    if (r > 0.0 && r != 1.0) {
      const double k = (1.0 + contraction_ * (r - 1.0)) / r;
      ra *= k;
      rb *= k;
    }
    oa = ra;
    ob = rb;
  }

  double contraction_;
  double c1_, s1_, c2_, s2_;
};

class LinearDiag final : public System {
 public:
  explicit LinearDiag(std::vector<double> diag)
      : System("linear_diag", diag.size(), make_params(diag), StepKind::AnalyticMap),
        diag_(std::move(diag)) {}

  StateVector initial_state() const override { return StateVector(dim(), 1.0); }

  void step_into(std::span<const double> x, std::span<double> out) const override {
    for (std::size_t i = 0; i < diag_.size(); ++i) out[i] = diag_[i] * x[i];
  }

 private:
  static ParamMap make_params(const std::vector<double>& diag) {
    ParamMap p;
    for (std::size_t i = 0; i < diag.size(); ++i) p["d" + std::to_string(i)] = diag[i];
    return p;
  }

  std::vector<double> diag_;
};

class Identity final : public System {
 public:
  explicit Identity(std::size_t dim)
      : System("identity", dim, {{"dim", static_cast<double>(dim)}}, StepKind::AnalyticMap) {}

  StateVector initial_state() const override { return StateVector(dim(), 1.0); }

  void step_into(std::span<const double> x, std::span<double> out) const override {
    std::copy(x.begin(), x.end(), out.begin());
  }
};

double positive_param(const ParamMap& p, const std::string& key, double fallback) {
  double v = param_or(p, key, fallback);
  if (!(v > 0.0)) throw Error(ErrorCode::InvalidArgument, "parameter '" + key + "' must be positive");
  return v;
}

}  // namespace

StateVector step(const System& sys, std::span<const double> x) {
  check_input(sys, x);
  StateVector out(sys.dim());
  step_checked(sys, x, out, -1);
  return out;
}

Trajectory evolve(const System& sys, std::span<const double> x0, std::int64_t n_steps,
                  std::int64_t record_every) {
  if (n_steps < 1) throw Error(ErrorCode::InvalidArgument, "n_steps must be >= 1");
  if (record_every < 1) throw Error(ErrorCode::InvalidArgument, "record_every must be >= 1");
  check_input(sys, x0);

  const std::size_t d = sys.dim();
  Trajectory traj;
  traj.dim = d;
  traj.dt = static_cast<double>(record_every);
  traj.states.reserve((static_cast<std::size_t>(n_steps / record_every) + 1) * d);
  traj.append(x0);

  StateVector cur(x0.begin(), x0.end()), next(d);
  for (std::int64_t t = 1; t <= n_steps; ++t) {
    step_checked(sys, cur, next, t);
    std::swap(cur, next);
    if (t % record_every == 0) traj.append(cur);
  }
  // The final state is always the last row, even when n_steps is not a
  // multiple of record_every. Row 0 stays x0.
  if (n_steps % record_every != 0 && traj.rows() == 1) {
    traj.append(cur);
  } else if (n_steps % record_every != 0) {
    auto last = traj.row(traj.rows() - 1);
    std::copy(cur.begin(), cur.end(), last.begin());
  }
  return traj;
}

StateVector burn_in(const System& sys, std::span<const double> x0, std::int64_t n_burn) {
  if (n_burn < 0) throw Error(ErrorCode::InvalidArgument, "n_burn must be >= 0");
  check_input(sys, x0);
  StateVector cur(x0.begin(), x0.end()), next(sys.dim());
  for (std::int64_t t = 1; t <= n_burn; ++t) {
    step_checked(sys, cur, next, t);
    std::swap(cur, next);
  }
  return cur;
}

SystemHandle make_oracle(const OracleSpec& spec) {
  const auto& p = spec.params;
  if (spec.name == "lorenz") {
    reject_unknown(spec.name, p, {"sigma", "rho", "beta", "h"});
    return std::make_shared<Lorenz>(param_or(p, "sigma", 10.0), param_or(p, "rho", 28.0),
                                    param_or(p, "beta", 8.0 / 3.0), positive_param(p, "h", 0.01));
  }
  if (spec.name == "van_der_pol") {
    reject_unknown(spec.name, p, {"mu", "h"});
    return std::make_shared<VanDerPol>(param_or(p, "mu", 1.0), positive_param(p, "h", 0.01));
  }
  if (spec.name == "torus") {
    reject_unknown(spec.name, p, {"omega1", "omega2", "contraction"});
    const double omega1 = param_or(p, "omega1", 2.0 * std::numbers::pi * 0.06);
    const double omega2 = param_or(p, "omega2", omega1 * std::numbers::phi);
    const double contraction = param_or(p, "contraction", 0.9);
    if (contraction < 0.0 || contraction > 1.0)
      throw Error(ErrorCode::InvalidArgument, "torus contraction must lie in [0, 1]");
    return std::make_shared<Torus>(omega1, omega2, contraction);
  }
  if (spec.name == "linear_diag") {
    reject_unknown(spec.name, p, {});
    if (spec.diag.empty()) throw Error(ErrorCode::InvalidArgument, "linear_diag needs a diagonal");
    if (!all_finite(spec.diag)) throw Error(ErrorCode::InvalidArgument, "diagonal is not finite");
    return std::make_shared<LinearDiag>(spec.diag);
  }
  if (spec.name == "identity") {
    reject_unknown(spec.name, p, {"dim"});
    const double dim = param_or(p, "dim", 3.0);
    if (dim < 1.0 || dim != std::floor(dim))
      throw Error(ErrorCode::InvalidArgument, "identity dim must be a positive integer");
    return std::make_shared<Identity>(static_cast<std::size_t>(dim));
  }
  throw Error(ErrorCode::UnknownSystem, "unknown system '" + spec.name + "'");
}

SystemHandle make_oracle(const std::string& name, const ParamMap& params) {
  return make_oracle(OracleSpec{name, params, {}});
}

}  // namespace attractors
