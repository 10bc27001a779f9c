#include <CLI11.hpp>

#include <iostream>
#include <optional>

#include "attractors/error.hpp"
#include "attractors/report.hpp"
#include "commands.hpp"
#include "config.hpp"

namespace {

using attractors::Error;
using attractors::ErrorCode;

// Flag values; only the ones given on the command line override the config.
struct Overrides {
  std::string config;
  std::optional<std::string> system, weights, window, format, out, kind;
  std::vector<std::string> params;
  std::optional<std::vector<double>> diag;
  std::optional<int> dim, height, width, n_exponents, max_coeff, radius, runs;
  std::optional<std::int64_t> burn_in, steps, warmup, record, record_every, checkpoint_every, volume_total, volume_window,
      recovery_steps, tail;
  std::optional<double> epsilon, theta, min_power, tol, tau, noise_std, mode_threshold;
  std::optional<std::size_t> components;
  std::optional<std::vector<int>> center;
  std::optional<std::uint64_t> seed;
  bool no_detrend = false;
  std::vector<std::string> positional;
};

void add_common(CLI::App* app, Overrides& o) {
  app->add_option("--config", o.config, "JSON config file (a previous result bundle also works)");
  app->add_option("--system", o.system, "oracle: lorenz, van_der_pol, torus, linear_diag, identity");
  app->add_option("--param", o.params, "system parameter as key=value (repeatable)");
  app->add_option("--dim", o.dim, "dimension of the identity map");
  app->add_option("--diag", o.diag, "diagonal of linear_diag")->delimiter(',');
  app->add_option("--weights", o.weights, "NCAW weight file (NCA system)");
  app->add_option("--height", o.height, "NCA grid height");
  app->add_option("--width", o.width, "NCA grid width");
  app->add_option("--burn-in", o.burn_in, "burn-in steps");
  app->add_option("--record", o.record, "recorded states");
  app->add_option("--record-every", o.record_every, "steps between recorded states");
  app->add_option("--seed", o.seed, "RNG seed");
  app->add_option("--out", o.out, "output directory (default $ATTRACTORS_OUT or .)");
}

void add_lyapunov(CLI::App* app, Overrides& o) {
  app->add_option("--steps", o.steps, "Lyapunov iterations after burn-in");
  app->add_option("--epsilon", o.epsilon, "separation of the perturbed copies");
  app->add_option("--n-exponents", o.n_exponents, "number of leading exponents");
  app->add_option("--theta", o.theta, "zero threshold for classification");
  app->add_option("--checkpoint-every", o.checkpoint_every, "steps between running-mean checkpoints");
  app->add_option("--warmup", o.warmup, "direction alignment steps before logs are counted");
}

void add_fourier(CLI::App* app, Overrides& o) {
  app->add_option("--min-power", o.min_power, "peak threshold on the normalised spectrum");
  app->add_option("--tol", o.tol, "match tolerance in frequency bins");
  app->add_option("--max-coeff", o.max_coeff, "largest |m| in linear combinations");
  app->add_option("--window", o.window, "none or hann");
  app->add_flag("--no-detrend", o.no_detrend, "keep the mean");
}

void add_pca(CLI::App* app, Overrides& o) {
  app->add_option("--tau", o.tau, "explained-variance target");
  app->add_option("--components", o.components, "principal components to fit");
}

void add_perturb(CLI::App* app, Overrides& o) {
  app->add_option("--kind", o.kind, "small_noise or circle_damage");
  app->add_option("--noise-std", o.noise_std, "std of the small-noise perturbation");
  app->add_option("--radius", o.radius, "circle damage radius");
  app->add_option("--center", o.center, "circle damage centre y,x")->delimiter(',')->expected(2);
  app->add_option("--runs", o.runs, "independent perturbation runs");
  app->add_option("--recovery-steps", o.recovery_steps, "steps evolved after the perturbation");
  app->add_option("--tail", o.tail, "converged tail length");
  app->add_option("--mode-threshold", o.mode_threshold, "mean-position distance marking a secondary mode");
}

template <typename T, typename U>
void put(const std::optional<T>& v, U& field) {
  if (v) field = *v;
}

cli::RunConfig build_config(const Overrides& o) {
  cli::RunConfig c = o.config.empty() ? cli::RunConfig{} : cli::load_config(o.config);
  if (o.system) {
    c.system = cli::SystemConfig{};
    c.system.name = *o.system;
  }
  if (o.weights) c.system.weights = *o.weights;
  for (const auto& kv : o.params) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0)
      throw Error(ErrorCode::InvalidArgument, "--param expects key=value, got '" + kv + "'");
    try {
      std::size_t used = 0;
      const double v = std::stod(kv.substr(eq + 1), &used);
      if (used != kv.size() - eq - 1) throw std::invalid_argument(kv);
      c.system.params[kv.substr(0, eq)] = v;
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::InvalidArgument, "--param value is not a number: '" + kv + "'");
    }
  }
  if (o.dim) c.system.params["dim"] = *o.dim;
  put(o.diag, c.system.diag);
  put(o.height, c.system.height);
  put(o.width, c.system.width);
  if (o.burn_in) c.burn_in = *o.burn_in;
  if (o.steps) c.steps = *o.steps;
  if (o.record) c.record = *o.record;
  put(o.record_every, c.record_every);
  put(o.epsilon, c.epsilon);
  if (o.n_exponents) c.n_exponents = *o.n_exponents;
  if (o.theta) c.theta = *o.theta;
  put(o.checkpoint_every, c.checkpoint_every);
  put(o.warmup, c.warmup);
  put(o.min_power, c.min_power);
  put(o.tol, c.tol_bins);
  put(o.max_coeff, c.max_coeff);
  put(o.window, c.window);
  if (o.no_detrend) c.detrend = false;
  put(o.tau, c.tau);
  if (o.components) c.components = *o.components;
  put(o.kind, c.perturbation.kind);
  put(o.noise_std, c.perturbation.noise_std);
  put(o.radius, c.perturbation.radius);
  if (o.center) c.perturbation.center = std::pair{(*o.center)[0], (*o.center)[1]};
  put(o.runs, c.perturbation.runs);
  put(o.recovery_steps, c.perturbation.steps);
  put(o.tail, c.perturbation.tail);
  put(o.mode_threshold, c.perturbation.mode_threshold);
  put(o.volume_total, c.volume_total);
  put(o.volume_window, c.volume_window);
  put(o.format, c.format);
  put(o.seed, c.rng_seed);
  put(o.out, c.output_dir);
  return c;
}

int fail(const std::exception& e) {
  std::cerr << attractors::report::error_json(e).dump() << '\n';
  return attractors::report::exit_code(e);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Attractor analysis for deterministic discrete dynamical systems"};
  app.require_subcommand(1);
  Overrides o;

  auto* simulate = app.add_subcommand("simulate", "burn in, then record a trajectory");
  add_common(simulate, o);
  simulate->add_option("--format", o.format, "csv or atrj");

  auto* lyap = app.add_subcommand("lyapunov", "leading Lyapunov exponents and their classification");
  add_common(lyap, o);
  add_lyapunov(lyap, o);

  auto* fourier = app.add_subcommand("fourier", "power spectrum, base frequencies and classification");
  add_common(fourier, o);
  add_fourier(fourier, o);

  auto* pca = app.add_subcommand("pca", "standard scaling, PCA and intrinsic dimension");
  add_common(pca, o);
  add_pca(pca, o);

  auto* volume = app.add_subcommand("volume", "windowed volume proxy and dissipation trend");
  add_common(volume, o);
  volume->add_option("--total", o.volume_total, "steps measured");
  volume->add_option("--window-steps", o.volume_window, "steps per window");

  auto* perturb = app.add_subcommand("perturb", "perturbation-recovery batch study");
  add_common(perturb, o);
  add_perturb(perturb, o);
  add_pca(perturb, o);

  auto* classify = app.add_subcommand("classify", "Lyapunov + Fourier + PCA with a combined verdict");
  add_common(classify, o);
  add_lyapunov(classify, o);
  add_fourier(classify, o);
  add_pca(classify, o);

  auto* epochs = app.add_subcommand("epochs", "attractor summary for each weight checkpoint");
  add_common(epochs, o);
  add_lyapunov(epochs, o);
  add_pca(epochs, o);
  epochs->add_option("checkpoints", o.positional, "NCAW checkpoints in epoch order");

  auto* plot = app.add_subcommand("plot", "SVG figures from CSV/JSON/ATRJ artifacts");
  plot->add_option("--config", o.config, "JSON config file");
  plot->add_option("--out", o.out, "output directory (default $ATTRACTORS_OUT or .)");
  add_fourier(plot, o);
  plot->add_option("inputs", o.positional, "files to plot");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    const Error err(ErrorCode::InvalidArgument, e.what());
    return fail(err);
  }

  try {
    auto c = build_config(o);
    if (*simulate) return cli::cmd_simulate(std::move(c));
    if (*lyap) return cli::cmd_lyapunov(std::move(c));
    if (*fourier) return cli::cmd_fourier(std::move(c));
    if (*pca) return cli::cmd_pca(std::move(c));
    if (*volume) return cli::cmd_volume(std::move(c));
    if (*perturb) return cli::cmd_perturb(std::move(c));
    if (*classify) return cli::cmd_classify(std::move(c));
    if (*epochs) {
      if (!o.positional.empty()) c.weights_list = o.positional;
      return cli::cmd_epochs(std::move(c));
    }
    return cli::cmd_plot(std::move(c), o.positional);
  } catch (const std::exception& e) {
    return fail(e);
  }
}
