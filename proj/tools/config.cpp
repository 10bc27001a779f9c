#include "config.hpp"

#include <algorithm>
#include <cstdlib>

#include "attractors/error.hpp"
#include "attractors/nca.hpp"

namespace cli {

using attractors::Error;
using attractors::ErrorCode;

namespace {

[[noreturn]] void bad(const std::string& msg) { throw Error(ErrorCode::InvalidArgument, "config: " + msg); }

template <typename T>
T as(const Json& v, const std::string& key) {
  try {
    return v.get<T>();
  } catch (const nlohmann::json::exception&) {
    bad("wrong type for '" + key + "'");
  }
}

template <typename T>
void opt(const Json& v, const std::string& key, std::optional<T>& out) {
  if (v.is_null())
    out.reset();
  else
    out = as<T>(v, key);
}

SystemConfig system_from_json(const Json& j) {
  if (j.is_string()) return SystemConfig{as<std::string>(j, "system"), {}, {}, {}, 0, 0};
  if (!j.is_object()) bad("'system' must be a name or an object");
  SystemConfig s;
  for (const auto& [key, v] : j.items()) {
    if (key == "name") s.name = as<std::string>(v, key);
    else if (key == "params") s.params = as<attractors::ParamMap>(v, key);
    else if (key == "diag") s.diag = as<std::vector<double>>(v, key);
    else if (key == "weights") s.weights = as<std::string>(v, key);
    else if (key == "height") s.height = as<int>(v, key);
    else if (key == "width") s.width = as<int>(v, key);
    else bad("unknown key 'system." + key + "'");
  }
  return s;
}

PerturbConfig perturb_from_json(const Json& j) {
  if (!j.is_object()) bad("'perturbation' must be an object");
  PerturbConfig p;
  for (const auto& [key, v] : j.items()) {
    if (key == "kind") p.kind = as<std::string>(v, key);
    else if (key == "noise_std") p.noise_std = as<double>(v, key);
    else if (key == "radius") p.radius = as<int>(v, key);
    else if (key == "center") {
      if (v.is_null()) {
        p.center.reset();
      } else {
        const auto c = as<std::vector<int>>(v, key);
        if (c.size() != 2) bad("'perturbation.center' must be [y, x]");
        p.center = std::pair{c[0], c[1]};
      }
    } else if (key == "runs") p.runs = as<int>(v, key);
    else if (key == "steps") p.steps = as<std::int64_t>(v, key);
    else if (key == "tail") p.tail = as<std::int64_t>(v, key);
    else if (key == "mode_threshold") p.mode_threshold = as<double>(v, key);
    else bad("unknown key 'perturbation." + key + "'");
  }
  return p;
}

}  // namespace

RunConfig from_json(const Json& root) {
  if (!root.is_object()) bad("top level must be an object");
  const Json& j = root.contains("config") ? root.at("config") : root;
  if (!j.is_object()) bad("'config' must be an object");
  RunConfig c;
  for (const auto& [key, v] : j.items()) {
    if (key == "system") c.system = system_from_json(v);
    else if (key == "burn_in") opt(v, key, c.burn_in);
    else if (key == "steps") opt(v, key, c.steps);
    else if (key == "record") opt(v, key, c.record);
    else if (key == "record_every") c.record_every = as<std::int64_t>(v, key);
    else if (key == "epsilon") c.epsilon = as<double>(v, key);
    else if (key == "n_exponents") opt(v, key, c.n_exponents);
    else if (key == "theta") opt(v, key, c.theta);
    else if (key == "checkpoint_every") c.checkpoint_every = as<std::int64_t>(v, key);
    else if (key == "warmup") c.warmup = as<std::int64_t>(v, key);
    else if (key == "min_power") c.min_power = as<double>(v, key);
    else if (key == "tol") c.tol_bins = as<double>(v, key);
    else if (key == "max_coeff") c.max_coeff = as<int>(v, key);
    else if (key == "window") c.window = as<std::string>(v, key);
    else if (key == "detrend") c.detrend = as<bool>(v, key);
    else if (key == "tau") c.tau = as<double>(v, key);
    else if (key == "components") opt(v, key, c.components);
    else if (key == "perturbation") c.perturbation = perturb_from_json(v);
    else if (key == "volume_total") c.volume_total = as<std::int64_t>(v, key);
    else if (key == "volume_window") c.volume_window = as<std::int64_t>(v, key);
    else if (key == "format") c.format = as<std::string>(v, key);
    else if (key == "weights_list") c.weights_list = as<std::vector<std::string>>(v, key);
    else if (key == "rng_seed") c.rng_seed = as<std::uint64_t>(v, key);
    else if (key == "output_dir") c.output_dir = as<std::string>(v, key);
    else bad("unknown key '" + key + "'");
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path) { return from_json(attractors::report::read_json(path)); }

namespace {

template <typename T>
Json or_null(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

}  // namespace

Json to_json(const RunConfig& c) {
  Json sys;
  if (!c.system.weights.empty()) {
    sys["weights"] = c.system.weights;
    sys["height"] = c.system.height;
    sys["width"] = c.system.width;
  } else {
    sys["name"] = c.system.name;
    sys["params"] = c.system.params;
    if (!c.system.diag.empty()) sys["diag"] = c.system.diag;
  }
  Json p;
  p["kind"] = c.perturbation.kind;
  p["noise_std"] = c.perturbation.noise_std;
  p["radius"] = c.perturbation.radius;
  p["center"] = c.perturbation.center ? Json{c.perturbation.center->first, c.perturbation.center->second}
                                      : Json(nullptr);
  p["runs"] = c.perturbation.runs;
  p["steps"] = c.perturbation.steps;
  p["tail"] = c.perturbation.tail;
  p["mode_threshold"] = c.perturbation.mode_threshold;

  Json j;
  j["system"] = sys;
  j["burn_in"] = or_null(c.burn_in);
  j["steps"] = or_null(c.steps);
  j["record"] = or_null(c.record);
  j["record_every"] = c.record_every;
  j["epsilon"] = c.epsilon;
  j["n_exponents"] = or_null(c.n_exponents);
  j["theta"] = or_null(c.theta);
  j["checkpoint_every"] = c.checkpoint_every;
  j["warmup"] = c.warmup;
  j["min_power"] = c.min_power;
  j["tol"] = c.tol_bins;
  j["max_coeff"] = c.max_coeff;
  j["window"] = c.window;
  j["detrend"] = c.detrend;
  j["tau"] = c.tau;
  j["components"] = or_null(c.components);
  j["perturbation"] = p;
  j["volume_total"] = c.volume_total;
  j["volume_window"] = c.volume_window;
  j["format"] = c.format;
  if (!c.weights_list.empty()) j["weights_list"] = c.weights_list;
  j["rng_seed"] = c.rng_seed;
  return j;
}

attractors::SystemHandle nca_system(const std::string& weights_path, RunConfig& c) {
  auto w = attractors::nca::load_weights(weights_path);
  if (c.system.height <= 0) c.system.height = w.height > 0 ? w.height : 40;
  if (c.system.width <= 0) c.system.width = w.width > 0 ? w.width : 40;
  return attractors::nca::as_system(std::move(w), c.system.height, c.system.width);
}

attractors::SystemHandle build_system(RunConfig& c) {
  if (!c.system.weights.empty()) return nca_system(c.system.weights, c);
  return attractors::make_oracle(attractors::OracleSpec{c.system.name, c.system.params, c.system.diag});
}

attractors::StateVector initial_state(const RunConfig& c, const attractors::System& sys) {
  if (sys.grid()) return attractors::nca::seed_state(c.system.height, c.system.width).data;
  return sys.initial_state();
}

void resolve(RunConfig& c, const std::string& command, const attractors::System& sys) {
  auto set = [](auto& field, auto value) {
    if (!field) field = value;
  };
  std::int64_t burn = 2000, record = 8000, steps = 10000;
  if (command == "simulate") burn = 0, record = 1000;
  if (command == "lyapunov" || command == "classify") burn = 4000;
  if (command == "epochs") burn = 1000, record = 300, steps = 300;
  set(c.burn_in, burn);
  set(c.record, record);
  set(c.steps, steps);
  set(c.n_exponents, static_cast<int>(std::min<std::size_t>(sys.dim(), 4)));
  set(c.theta, sys.reports_per_unit_time() ? 0.05 : 0.002);
  set(c.components, command == "epochs" ? std::size_t{2} : std::min<std::size_t>(sys.dim(), 10));

  if (*c.burn_in < 0) bad("burn_in must be >= 0");
  if (*c.record < 2 || c.record_every < 1) bad("record must be >= 2 and record_every >= 1");
  if (*c.steps < 1) bad("steps must be >= 1");
  if (*c.n_exponents < 1 || static_cast<std::size_t>(*c.n_exponents) > sys.dim())
    bad("n_exponents must lie in [1, dim]");
  if (!(*c.theta > 0.0)) bad("theta must be > 0");
  if (c.warmup < 0 || c.checkpoint_every < 1) bad("warmup must be >= 0 and checkpoint_every >= 1");
  if (*c.components < 1) bad("components must be >= 1");
  if (c.window != "none" && c.window != "hann") bad("window must be 'none' or 'hann'");
  if (c.format != "csv" && c.format != "atrj") bad("format must be 'csv' or 'atrj'");
  if (c.perturbation.kind != "small_noise" && c.perturbation.kind != "circle_damage")
    bad("perturbation.kind must be 'small_noise' or 'circle_damage'");
}

std::filesystem::path output_dir(const RunConfig& c) {
  if (!c.output_dir.empty()) return c.output_dir;
  if (const char* env = std::getenv(kOutputEnv); env && *env) return env;
  return ".";
}

}  // namespace cli
