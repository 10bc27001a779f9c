#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "attractors/dynsys.hpp"
#include "attractors/report.hpp"

namespace cli {

using attractors::report::Json;

struct SystemConfig {
  std::string name = "lorenz";
  attractors::ParamMap params;
  std::vector<double> diag;
  /// NCAW file; when set, `name` is ignored and the system is the NCA rule.
  std::string weights;
  /// NCA grid; 0 takes the size recorded in the weight file, else 40.
  int height = 0;
  int width = 0;
};

struct PerturbConfig {
  std::string kind = "small_noise";
  double noise_std = 0.002;
  int radius = 8;
  std::optional<std::pair<int, int>> center;
  int runs = 5;
  std::int64_t steps = 1500;
  std::int64_t tail = 500;
  double mode_threshold = 0.05;
};

/// Everything a command needs. Unset optionals get command-specific defaults
/// in resolve(), after which every artifact embeds the resolved values.
struct RunConfig {
  SystemConfig system;
  std::optional<std::int64_t> burn_in;
  /// Lyapunov iterations.
  std::optional<std::int64_t> steps;
  /// Recorded states for simulate, Fourier and PCA.
  std::optional<std::int64_t> record;
  std::int64_t record_every = 1;
  double epsilon = 1e-4;
  std::optional<int> n_exponents;
  std::optional<double> theta;
  std::int64_t checkpoint_every = 100;
  /// Direction alignment steps before Lyapunov logs are counted.
  std::int64_t warmup = 100;
  double min_power = 0.01;
  double tol_bins = 2.0;
  int max_coeff = 5;
  std::string window = "none";
  bool detrend = true;
  double tau = 0.95;
  std::optional<std::size_t> components;
  PerturbConfig perturbation;
  std::int64_t volume_total = 60000;
  std::int64_t volume_window = 2000;
  std::string format = "csv";
  std::vector<std::string> weights_list;
  std::uint64_t rng_seed = 0;
  /// Not echoed into artifacts so that reruns elsewhere stay byte-identical.
  std::string output_dir;
};

/// Strict: unknown keys raise InvalidArgument. A bundle written by a command
/// (an object with a "config" member) is accepted too.
RunConfig from_json(const Json& j);
RunConfig load_config(const std::filesystem::path& path);
Json to_json(const RunConfig& c);

/// Loads weights if needed and records the grid size actually used.
attractors::SystemHandle build_system(RunConfig& c);
attractors::SystemHandle nca_system(const std::string& weights_path, RunConfig& c);
attractors::StateVector initial_state(const RunConfig& c, const attractors::System& sys);

/// Fills every unset optional with the defaults of `command` for `sys`.
void resolve(RunConfig& c, const std::string& command, const attractors::System& sys);

/// --out, then output_dir from the config, then $ATTRACTORS_OUT, then ".".
std::filesystem::path output_dir(const RunConfig& c);

inline constexpr const char* kOutputEnv = "ATTRACTORS_OUT";

}  // namespace cli
