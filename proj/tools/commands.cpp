#include "commands.hpp"

#include <fmt/format.h>

#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <regex>

#include "attractors/error.hpp"
#include "attractors/lyapunov.hpp"
#include "attractors/nca.hpp"
#include "attractors/perturb.hpp"
#include "attractors/plot.hpp"
#include "attractors/reduce.hpp"
#include "attractors/report.hpp"
#include "attractors/spectral.hpp"
#include "attractors/trajectory_io.hpp"

namespace cli {

namespace fs = std::filesystem;
using namespace attractors;

namespace {

fs::path prepare_out(const RunConfig& c) {
  const auto dir = output_dir(c);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create output directory " + dir.string() + ": " + ec.message());
  return dir;
}

void emit(const Json& summary) { std::cout << summary.dump() << '\n'; }

Json system_json(const System& sys) {
  Json j;
  j["name"] = sys.name();
  j["dim"] = sys.dim();
  j["step_kind"] = to_string(sys.step_kind());
  j["time_step"] = sys.time_step();
  j["exponent_unit"] = sys.reports_per_unit_time() ? "per_unit_time" : "per_step";
  if (const auto g = sys.grid()) j["grid"] = {g->height, g->width, g->channels};
  return j;
}

Json artifact_header(const std::string& command, const RunConfig& c, const System& sys) {
  return Json{{"command", command}, {"config", to_json(c)}, {"system", system_json(sys)}};
}

StateVector attractor_state(const RunConfig& c, const System& sys) {
  return burn_in(sys, initial_state(c, sys), *c.burn_in);
}

// `record` rows spaced `record_every` steps apart, starting at x.
Trajectory record_from(const RunConfig& c, const System& sys, std::span<const double> x) {
  auto traj = evolve(sys, x, (*c.record - 1) * c.record_every, c.record_every);
  traj.t_start = *c.burn_in;
  return traj;
}

std::string write_traj(const Trajectory& t, const fs::path& dir, const std::string& stem, const std::string& format) {
  const auto name = stem + (format == "atrj" ? ".atrj" : ".csv");
  if (format == "atrj")
    write_atrj(t, dir / name);
  else
    write_trajectory_csv(t, dir / name);
  return name;
}

struct FourierResult {
  spectral::PowerSpectrum spec;
  spectral::PeakSet peaks;
  spectral::SpectrumClass cls;
};

FourierResult run_fourier(const Trajectory& rec, const System& sys, const RunConfig& c) {
  spectral::SpectrumOptions so;
  so.detrend = c.detrend;
  so.window = c.window == "hann" ? spectral::Window::Hann : spectral::Window::None;
  so.sample_interval = static_cast<double>(c.record_every) * sys.time_step();
  FourierResult r;
  r.spec = spectral::power_spectrum(rec, so);
  const double tol = c.tol_bins * r.spec.bin_width();
  r.peaks = spectral::find_peaks(r.spec, c.min_power);
  r.peaks = spectral::filter_harmonics(std::move(r.peaks), tol);
  r.peaks = spectral::filter_linear_combinations(std::move(r.peaks), tol, c.max_coeff);
  r.cls = spectral::classify_spectrum(r.spec, r.peaks);
  return r;
}

Json fourier_json(const FourierResult& r) {
  Json j;
  j["classification"] = report::to_json(r.cls);
  j["n_samples"] = r.spec.n_samples;
  j["bin_width"] = r.spec.bin_width();
  j["peak_raw_power"] = r.spec.peak_raw_power;
  j["peaks"] = report::to_json(r.peaks);
  return j;
}

struct PcaResult {
  reduce::ScalerModel scaler;
  reduce::PcaModel model;
  Trajectory projected;
  std::optional<std::size_t> intrinsic;
  std::string warning;
};

PcaResult run_pca(const Trajectory& rec, const RunConfig& c) {
  PcaResult r;
  r.scaler = reduce::fit_scaler(rec);
  const auto scaled = reduce::apply_scaler(r.scaler, rec);
  const std::size_t k = std::min({*c.components, rec.rows() - 1, rec.dim});
  r.model = reduce::fit_pca(scaled, k, reduce::FitBasis::Scaled);
  r.projected = reduce::project(r.model, scaled);
  r.projected.t_start = rec.t_start;
  r.projected.dt = rec.dt;
  try {
    r.intrinsic = reduce::intrinsic_dimension(r.model, c.tau);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::InsufficientRank) throw;
    r.warning = e.what();
  }
  return r;
}

Json pca_json(const PcaResult& r, double tau) {
  Json j = report::to_json(r.model);
  j["tau"] = tau;
  j["intrinsic_dimension"] = r.intrinsic ? Json(*r.intrinsic) : Json(nullptr);
  if (!r.warning.empty()) j["warning"] = r.warning;
  return j;
}

lyapunov::Options lyap_options(const RunConfig& c) {
  lyapunov::Options o;
  o.epsilon = c.epsilon;
  o.n_steps = *c.steps;
  o.seed = c.rng_seed;
  o.checkpoint_every = c.checkpoint_every;
  o.warmup = c.warmup;
  return o;
}

perturb::PerturbationSpec perturbation_spec(const RunConfig& c) {
  perturb::PerturbationSpec s;
  s.kind = c.perturbation.kind == "circle_damage" ? perturb::PerturbationKind::CircleDamage
                                                  : perturb::PerturbationKind::SmallNoise;
  s.noise_std = c.perturbation.noise_std;
  s.circle_radius = c.perturbation.radius;
  s.circle_center = c.perturbation.center;
  s.rng_seed = c.rng_seed;
  return s;
}

// Time-major thinning used for large recovery trajectories.
Trajectory every_nth(const Trajectory& t, std::int64_t n) {
  if (n <= 1) return t;
  Trajectory out;
  out.dim = t.dim;
  out.t_start = t.t_start;
  out.dt = t.dt * static_cast<double>(n);
  for (std::size_t i = 0; i < t.rows(); i += static_cast<std::size_t>(n)) out.append(t.row(i));
  return out;
}

bool starts_with(const std::string& s, const std::string& prefix) { return s.rfind(prefix, 0) == 0; }

// Both analyses must point at the same attractor type for a firm verdict.
std::string combined_verdict(const std::string& lyap, const std::string& spec, Json& warnings) {
  const bool agree = (lyap == "fixed_point" && spec == "fixed_point_like") ||
                     (lyap == "limit_cycle" && spec == "periodic") ||
                     (starts_with(lyap, "quasi_periodic") && spec == lyap) ||
                     (starts_with(lyap, "chaotic") && spec == "broadband_chaotic");
  if (agree) return lyap;
  warnings.push_back(fmt::format("Lyapunov spectrum says {}, Fourier spectrum says {}", lyap, spec));
  return "inconclusive";
}

}  // namespace

int cmd_simulate(RunConfig c) {
  const auto sys = build_system(c);
  resolve(c, "simulate", *sys);
  const auto out = prepare_out(c);
  const auto x = attractor_state(c, *sys);
  const auto traj = record_from(c, *sys, x);

  Json j = artifact_header("simulate", c, *sys);
  j["rows"] = traj.rows();
  j["trajectory"] = write_traj(traj, out, "trajectory", c.format);
  if (const auto g = sys->grid()) {
    nca::write_png(nca::Substrate::from_flat(traj.last(), *g), out / "final.png");
    j["final_png"] = "final.png";
  }
  report::write_json(j, out / "simulate.json");
  emit({{"command", "simulate"}, {"rows", traj.rows()}, {"output", "simulate.json"}});
  return 0;
}

int cmd_lyapunov(RunConfig c) {
  const auto sys = build_system(c);
  resolve(c, "lyapunov", *sys);
  const auto out = prepare_out(c);
  const auto x = attractor_state(c, *sys);
  const auto rep = lyapunov::spectrum(*sys, x, *c.n_exponents, lyap_options(c));

  Json j = artifact_header("lyapunov", c, *sys);
  j["lyapunov"] = report::to_json(rep, *c.theta);
  j["history"] = "lyapunov_history.csv";
  report::write_history_csv(rep, out / "lyapunov_history.csv");
  report::write_json(j, out / "lyapunov.json");
  emit({{"command", "lyapunov"},
        {"exponents", rep.exponents},
        {"classification", lyapunov::classify(rep, *c.theta).label()},
        {"output", "lyapunov.json"}});
  return 0;
}

int cmd_fourier(RunConfig c) {
  const auto sys = build_system(c);
  resolve(c, "fourier", *sys);
  const auto out = prepare_out(c);
  const auto rec = record_from(c, *sys, attractor_state(c, *sys));
  const auto fr = run_fourier(rec, *sys, c);

  report::write_spectrum_csv(fr.spec, out / "spectrum.csv");
  Json j = artifact_header("fourier", c, *sys);
  j["spectrum"] = fourier_json(fr);
  j["spectrum_csv"] = "spectrum.csv";
  report::write_json(j, out / "fourier.json");
  plot::write_text(plot::spectrum_svg(fr.spec.freqs, fr.spec.power, fr.peaks.base_freqs(), {640, 480, sys->name()}),
                   out / "spectrum.svg");
  emit({{"command", "fourier"},
        {"classification", fr.cls.label()},
        {"base_freqs", fr.peaks.base_freqs()},
        {"output", "fourier.json"}});
  return 0;
}

int cmd_pca(RunConfig c) {
  const auto sys = build_system(c);
  resolve(c, "pca", *sys);
  const auto out = prepare_out(c);
  const auto rec = record_from(c, *sys, attractor_state(c, *sys));
  const auto pr = run_pca(rec, c);

  report::save_pca(pr.model, out / "pca_model.json");
  write_trajectory_csv(pr.projected, out / "projected.csv");
  Json j = artifact_header("pca", c, *sys);
  j["pca"] = pca_json(pr, c.tau);
  j["model"] = "pca_model.json";
  j["projected"] = "projected.csv";
  report::write_json(j, out / "pca.json");
  if (pr.projected.dim >= 2)
    plot::write_text(plot::trajectory_svg(pr.projected, {640, 480, sys->name()}), out / "projected.svg");
  emit({{"command", "pca"},
        {"intrinsic_dimension", pr.intrinsic ? Json(*pr.intrinsic) : Json(nullptr)},
        {"output", "pca.json"}});
  return 0;
}

int cmd_volume(RunConfig c) {
  const auto sys = build_system(c);
  resolve(c, "volume", *sys);
  const auto out = prepare_out(c);
  const auto vr = reduce::volume_proxy(*sys, attractor_state(c, *sys), c.volume_total, c.volume_window);

  report::write_volume_csv(vr, out / "volume.csv");
  Json j = artifact_header("volume", c, *sys);
  j["volume"] = report::to_json(vr);
  j["windows_csv"] = "volume.csv";
  report::write_json(j, out / "volume.json");
  emit({{"command", "volume"}, {"verdict", vr.verdict}, {"slope", vr.slope}, {"output", "volume.json"}});
  return 0;
}

int cmd_perturb(RunConfig c) {
  const auto sys = build_system(c);
  resolve(c, "perturb", *sys);
  if (c.perturbation.kind == "circle_damage" && !sys->grid())
    throw Error(ErrorCode::InvalidArgument, "circle_damage needs an NCA system, got " + sys->name());
  const auto out = prepare_out(c);
  const auto x = attractor_state(c, *sys);

  perturb::BatchOptions bo;
  bo.n_runs = c.perturbation.runs;
  bo.spec = perturbation_spec(c);
  bo.recovery.steps = c.perturbation.steps;
  bo.recovery.tail = c.perturbation.tail;
  bo.recovery.mode_threshold = c.perturbation.mode_threshold;
  bo.pca_components = std::min<std::size_t>(*c.components, 3);
  const auto study = perturb::batch_perturbation_study(*sys, x, bo);

  write_atrj(study.reference_tail, out / "reference_tail.atrj");
  write_trajectory_csv(study.reference_projected, out / "reference_projected.csv");
  Json runs = Json::array();
  std::size_t secondary = 0, failed = 0;
  for (std::size_t i = 0; i < study.runs.size(); ++i) {
    const auto& run = study.runs[i];
    Json r;
    r["run"] = i;
    r["seed"] = run.seed;
    r["spec"] = report::to_json(run.spec);
    if (!run.result) {
      ++failed;
      r["error"] = run.error;
      runs.push_back(r);
      continue;
    }
    const auto stem = fmt::format("run_{}", i);
    r["result"] = report::to_json(*run.result);
    write_atrj(every_nth(run.result->trajectory, c.record_every), out / (stem + ".atrj"));
    write_trajectory_csv(run.projected, out / (stem + "_projected.csv"));
    write_trajectory_csv(run.tail_own_projection, out / (stem + "_tail_own.csv"));
    r["trajectory"] = stem + ".atrj";
    r["projected"] = stem + "_projected.csv";
    r["tail_own_projection"] = stem + "_tail_own.csv";
    if (const auto g = sys->grid()) {
      nca::write_png(nca::Substrate::from_flat(run.result->trajectory.row(0), *g), out / (stem + "_start.png"));
      nca::write_png(nca::Substrate::from_flat(run.result->trajectory.last(), *g), out / (stem + "_end.png"));
    }
    if (run.result->verdict == perturb::Verdict::SecondaryMode) ++secondary;
    runs.push_back(r);
  }

  Json j = artifact_header("perturb", c, *sys);
  j["transform"] = study.transform;
  j["reference_tail"] = "reference_tail.atrj";
  j["reference_projected"] = "reference_projected.csv";
  j["runs"] = runs;
  j["secondary_modes"] = secondary;
  j["failed"] = failed;
  report::write_json(j, out / "manifest.json");
  emit({{"command", "perturb"}, {"runs", study.runs.size()}, {"secondary_modes", secondary},
        {"failed", failed}, {"output", "manifest.json"}});
  // Inputs were validated above, so a batch where nothing recovered failed numerically.
  return failed == study.runs.size() ? 3 : 0;
}

int cmd_classify(RunConfig c) {
  const auto sys = build_system(c);
  resolve(c, "classify", *sys);
  const auto out = prepare_out(c);
  const auto x = attractor_state(c, *sys);

  const auto rep = lyapunov::spectrum(*sys, x, *c.n_exponents, lyap_options(c));
  const auto lc = lyapunov::classify(rep, *c.theta);
  const auto rec = record_from(c, *sys, x);
  const auto fr = run_fourier(rec, *sys, c);
  const auto pr = run_pca(rec, c);

  report::write_history_csv(rep, out / "lyapunov_history.csv");
  report::write_spectrum_csv(fr.spec, out / "spectrum.csv");
  report::save_pca(pr.model, out / "pca_model.json");
  write_trajectory_csv(pr.projected, out / "projected.csv");

  Json warnings = Json::array();
  if (lc.kind == lyapunov::AttractorKind::Inconclusive)
    warnings.push_back("Lyapunov spectrum is inconclusive: every computed exponent is zero but fewer than dim were computed");
  const auto verdict = combined_verdict(lc.label(), fr.cls.label(), warnings);
  if (!pr.warning.empty()) warnings.push_back(pr.warning);

  Json j = artifact_header("classify", c, *sys);
  j["verdict"] = verdict;
  j["warnings"] = warnings;
  j["lyapunov"] = report::to_json(rep, *c.theta);
  j["spectrum"] = fourier_json(fr);
  j["pca"] = pca_json(pr, c.tau);
  j["files"] = {{"lyapunov_history", "lyapunov_history.csv"},
                {"spectrum", "spectrum.csv"},
                {"pca_model", "pca_model.json"},
                {"projected", "projected.csv"}};
  report::write_json(j, out / "classify.json");
  emit({{"command", "classify"},
        {"verdict", verdict},
        {"lyapunov", lc.label()},
        {"spectrum", fr.cls.label()},
        {"output", "classify.json"}});
  return 0;
}

namespace {

std::string epoch_label(const nca::RuleWeights& w, const std::string& path, std::size_t index) {
  if (w.metadata.contains("epoch") && w.metadata["epoch"].is_number_integer())
    return std::to_string(w.metadata["epoch"].get<long long>());
  static const std::regex pattern(R"(epoch_?(\d+))");
  std::smatch m;
  const auto name = fs::path(path).filename().string();
  if (std::regex_search(name, m, pattern)) return m[1].str();
  return std::to_string(index + 1);
}

}  // namespace

int cmd_epochs(RunConfig c) {
  if (c.weights_list.empty()) throw Error(ErrorCode::InvalidArgument, "epochs needs at least one weight file");
  const auto out = prepare_out(c);

  Json rows = Json::array();
  std::string csv = "index,epoch,weights,lambda1,status\n";
  std::vector<double> xs, lambdas;
  std::optional<Json> config_echo;
  int first_failure = 0;
  std::size_t ok = 0;
  for (std::size_t i = 0; i < c.weights_list.size(); ++i) {
    const auto& path = c.weights_list[i];
    Json r{{"index", i}, {"weights", path}};
    std::string label = std::to_string(i + 1);
    try {
      RunConfig ec = c;
      auto w = nca::load_weights(path);
      label = epoch_label(w, path, i);
      if (ec.system.height <= 0) ec.system.height = w.height > 0 ? w.height : 40;
      if (ec.system.width <= 0) ec.system.width = w.width > 0 ? w.width : 40;
      const auto sys = nca::as_system(std::move(w), ec.system.height, ec.system.width);
      resolve(ec, "epochs", *sys);
      if (!config_echo) config_echo = to_json(ec);

      const auto x = attractor_state(ec, *sys);
      const auto rec = record_from(ec, *sys, x);
      const auto pr = run_pca(rec, ec);
      const auto top = lyapunov::top_exponent(*sys, x, lyap_options(ec));

      const auto stem = fmt::format("epoch_{}_{}", i, label);
      write_trajectory_csv(pr.projected, out / (stem + "_projected.csv"));
      if (pr.projected.dim >= 2)
        plot::write_text(plot::trajectory_svg(pr.projected, {640, 480, "epoch " + label}), out / (stem + ".svg"));
      r["epoch"] = label;
      r["lambda1"] = top.value;
      r["top_exponent"] = report::to_json(top);
      r["pca"] = pca_json(pr, ec.tau);
      r["projected"] = stem + "_projected.csv";
      r["status"] = "ok";
      csv += fmt::format("{},{},{},{},ok\n", i, label, path, top.value);
      double ex = 0.0;
      const auto* end = label.data() + label.size();
      if (std::from_chars(label.data(), end, ex).ptr != end) ex = static_cast<double>(i + 1);
      xs.push_back(ex);
      lambdas.push_back(top.value);
      ++ok;
    } catch (const std::exception& e) {
      if (!first_failure) first_failure = report::exit_code(e);
      r["epoch"] = label;
      r["status"] = "failed";
      r["error"] = report::error_json(e)["error"];
      csv += fmt::format("{},{},{},,failed\n", i, label, path);
    }
    rows.push_back(r);
  }

  Json j;
  j["command"] = "epochs";
  j["config"] = config_echo ? *config_echo : to_json(c);
  j["epochs"] = rows;
  report::write_json(j, out / "epochs.json");
  {
    std::ofstream os(out / "epochs.csv", std::ios::binary);
    os << csv;
  }
  if (xs.size() >= 1)
    plot::write_text(plot::lines_svg(xs, {lambdas}, {"lambda1"}, {640, 480, "lambda1 by epoch"}),
                     out / "epochs_lambda1.svg");
  emit({{"command", "epochs"}, {"succeeded", ok}, {"failed", c.weights_list.size() - ok}, {"output", "epochs.json"}});
  return ok > 0 ? 0 : first_failure;
}

namespace {

// Header plus numeric columns.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;
};

Table read_numeric_csv(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorCode::Io, "cannot open " + path.string());
  Table t;
  std::string line;
  if (!std::getline(is, line) || line.empty()) throw Error(ErrorCode::MalformedInput, path.string() + ": empty");
  for (std::size_t pos = 0;;) {
    const auto comma = line.find(',', pos);
    t.header.push_back(line.substr(pos, comma - pos));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  t.columns.resize(t.header.size());
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::size_t col = 0;
    for (std::size_t pos = 0;; ++col) {
      const auto comma = line.find(',', pos);
      const auto field = line.substr(pos, comma - pos);
      double v = 0.0;
      const auto* end = field.data() + field.size();
      if (col >= t.columns.size() || std::from_chars(field.data(), end, v).ptr != end || field.empty())
        throw Error(ErrorCode::MalformedInput, path.string() + ": bad row '" + line + "'");
      t.columns[col].push_back(v);
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (col + 1 != t.columns.size()) throw Error(ErrorCode::MalformedInput, path.string() + ": ragged row");
  }
  if (t.columns.empty() || t.columns[0].size() < 2)
    throw Error(ErrorCode::MalformedInput, path.string() + ": fewer than 2 rows");
  return t;
}

std::string plot_trajectory(Trajectory t, const std::string& title) {
  if (t.dim > 3) {
    const auto scaler = reduce::fit_scaler(t);
    const auto scaled = reduce::apply_scaler(scaler, t);
    const auto model = reduce::fit_pca(scaled, std::min<std::size_t>(3, t.rows() - 1), reduce::FitBasis::Scaled);
    t = reduce::project(model, scaled);
  }
  if (t.dim == 1) {
    std::vector<double> x(t.rows());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = static_cast<double>(t.t_start) + static_cast<double>(i) * t.dt;
    return plot::lines_svg(x, {t.column(0)}, {"x0"}, {640, 480, title});
  }
  return plot::trajectory_svg(t, {640, 480, title});
}

std::string plot_one(const fs::path& in, const RunConfig& c) {
  const auto ext = in.extension().string();
  const auto title = in.filename().string();
  if (ext == ".atrj") return plot_trajectory(read_atrj(in), title);
  if (ext == ".json") {
    const auto j = report::read_json(in);
    const Json* src = nullptr;
    if (j.contains("running_means")) src = &j;
    else if (j.contains("lyapunov") && j["lyapunov"].is_object() && j["lyapunov"].contains("running_means"))
      src = &j["lyapunov"];
    if (src) {
      try {
        const auto steps = (*src)["checkpoint_steps"].get<std::vector<double>>();
        const auto means = (*src)["running_means"].get<std::vector<std::vector<double>>>();
        std::vector<std::string> labels;
        for (std::size_t i = 0; i < means.size(); ++i) labels.push_back(fmt::format("lambda{}", i + 1));
        return plot::lines_svg(steps, means, labels, {640, 480, title});
      } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::MalformedInput, in.string() + ": " + e.what());
      }
    }
    throw Error(ErrorCode::MalformedInput, in.string() + ": no exponent history to plot");
  }
  if (ext != ".csv") throw Error(ErrorCode::MalformedInput, in.string() + ": unsupported input type");

  std::string first;
  {
    std::ifstream is(in, std::ios::binary);
    if (!is) throw Error(ErrorCode::Io, "cannot open " + in.string());
    std::getline(is, first);
  }
  if (first == "freq,power") {
    const auto spec = report::read_spectrum_csv(in);
    const double tol = c.tol_bins * spec.bin_width();
    auto peaks = spectral::find_peaks(spec, c.min_power);
    peaks = spectral::filter_harmonics(std::move(peaks), tol);
    peaks = spectral::filter_linear_combinations(std::move(peaks), tol, c.max_coeff);
    return plot::spectrum_svg(spec.freqs, spec.power, peaks.base_freqs(), {640, 480, title});
  }
  if (starts_with(first, "t,")) return plot_trajectory(read_trajectory_csv(in), title);
  const auto t = read_numeric_csv(in);
  std::vector<std::vector<double>> series(t.columns.begin() + 1, t.columns.end());
  std::vector<std::string> labels(t.header.begin() + 1, t.header.end());
  return plot::lines_svg(t.columns[0], series, labels, {640, 480, title});
}

}  // namespace

int cmd_plot(RunConfig c, const std::vector<std::string>& inputs) {
  if (inputs.empty()) throw Error(ErrorCode::InvalidArgument, "plot needs at least one input file");
  const auto out = prepare_out(c);
  Json written = Json::array();
  for (const auto& in : inputs) {
    const auto svg = plot_one(in, c);
    const auto name = fs::path(in).stem().string() + ".svg";
    plot::write_text(svg, out / name);
    written.push_back(name);
  }
  emit({{"command", "plot"}, {"written", written}});
  return 0;
}

}  // namespace cli
