#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace attractors {

using StateVector = std::vector<double>;
using ParamMap = std::map<std::string, double>;

enum class StepKind { AnalyticMap, OdeRk4, Nca };

std::string to_string(StepKind kind);

/// Spatial layout of a flattened grid state, row-major over (height, width, channels).
struct GridShape {
  int height = 0;
  int width = 0;
  int channels = 0;

  std::size_t cells() const { return static_cast<std::size_t>(height) * width; }
  std::size_t size() const { return cells() * channels; }
  bool operator==(const GridShape&) const = default;
};

/// A deterministic discrete map f: R^D -> R^D.
///
/// Systems are immutable once built and may be shared between threads.
/// Implementations must be pure: the same input always yields a bit-identical
/// output.
class System {
 public:
  virtual ~System() = default;

  const std::string& name() const { return name_; }
  std::size_t dim() const { return dim_; }
  const ParamMap& params() const { return params_; }
  StepKind step_kind() const { return kind_; }

  /// Integration step for ODE-discretized systems, 1 for native maps.
  double time_step() const { return time_step_; }
  bool reports_per_unit_time() const { return kind_ == StepKind::OdeRk4; }

  virtual std::optional<GridShape> grid() const { return std::nullopt; }

  /// A reasonable starting point for burn-in.
  virtual StateVector initial_state() const = 0;

  /// Writes f(x) into `out`. The spans never alias and both have size dim().
  virtual void step_into(std::span<const double> x, std::span<double> out) const = 0;

 protected:
  System(std::string name, std::size_t dim, ParamMap params, StepKind kind,
         double time_step = 1.0);

 private:
  std::string name_;
  std::size_t dim_;
  ParamMap params_;
  StepKind kind_;
  double time_step_;
};

using SystemHandle = std::shared_ptr<const System>;

/// Consecutive states stored row-major as a T x D block.
struct Trajectory {
  std::vector<double> states;
  std::size_t dim = 0;
  std::int64_t t_start = 0;
  double dt = 1.0;

  Trajectory() = default;
  Trajectory(std::size_t rows, std::size_t dim, std::int64_t t_start = 0, double dt = 1.0)
      : states(rows * dim, 0.0), dim(dim), t_start(t_start), dt(dt) {}

  std::size_t rows() const { return dim == 0 ? 0 : states.size() / dim; }
  std::span<const double> row(std::size_t i) const { return {states.data() + i * dim, dim}; }
  std::span<double> row(std::size_t i) { return {states.data() + i * dim, dim}; }
  std::span<const double> last() const { return row(rows() - 1); }

  void append(std::span<const double> x);
  /// Rows [first, first + count) as a new trajectory with adjusted t_start.
  Trajectory slice(std::size_t first, std::size_t count) const;
  std::vector<double> column(std::size_t j) const;
};

/// Applies one step of `sys` to `x`. Throws NumericalBlowup on non-finite output.
StateVector step(const System& sys, std::span<const double> x);

/// Evolves `n_steps` steps recording every `record_every`-th state, including x0.
/// A NumericalBlowup carries the 1-based failing timestep.
Trajectory evolve(const System& sys, std::span<const double> x0, std::int64_t n_steps,
                  std::int64_t record_every = 1);

/// The state after `n_burn` steps, intermediates discarded.
StateVector burn_in(const System& sys, std::span<const double> x0, std::int64_t n_burn);

struct OracleSpec {
  std::string name;
  ParamMap params;
  /// Diagonal entries for linear_diag.
  std::vector<double> diag;
};

/// Builds one of the reference systems: lorenz, van_der_pol, torus,
/// linear_diag, identity. Unknown names raise UnknownSystem.
///
/// Defaults: Lorenz sigma=10, rho=28, beta=8/3; Van der Pol mu=1; both
/// discretized by one fixed RK4 step with h=0.01. The torus is the 4D
/// embedding (cos t1, sin t1, cos t2, sin t2) advanced by omega1 = 2*pi*0.06
/// and omega2 = golden_ratio * omega1 radians per step, with the radius of
/// each plane relaxed towards 1 by `contraction` so the torus is attracting.
SystemHandle make_oracle(const OracleSpec& spec);
SystemHandle make_oracle(const std::string& name, const ParamMap& params = {});

bool all_finite(std::span<const double> x);

}  // namespace attractors
