#include "attractors/report.hpp"

#include <fmt/format.h>

#include <charconv>
#include <fstream>
#include <numeric>

#include "attractors/error.hpp"
#include "binary_io.hpp"

namespace attractors::report {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorCode::Io, "cannot open " + path.string() + " for writing");
  return os;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorCode::Io, "cannot open " + path.string());
  return is;
}

std::string csv_number(double v) { return fmt::format("{}", v); }

}  // namespace

void write_json(const Json& j, const std::filesystem::path& path) {
  auto os = open_out(path);
  os << j.dump(2) << '\n';
  if (!os) throw Error(ErrorCode::Io, "write failed: " + path.string());
}

Json read_json(const std::filesystem::path& path) {
  auto is = open_in(path);
  try {
    return Json::parse(is);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedInput, path.string() + ": " + e.what());
  }
}

Json to_json(const lyapunov::AttractorClass& c) {
  return Json{{"kind", c.label()}, {"zero_threshold", c.zero_threshold}};
}

Json to_json(const lyapunov::LyapunovReport& r, double theta) {
  Json j;
  j["exponents"] = r.exponents;
  j["sum"] = std::accumulate(r.exponents.begin(), r.exponents.end(), 0.0);
  j["unit"] = r.unit;
  j["epsilon"] = r.epsilon;
  j["theta"] = theta;
  j["n_steps"] = r.n_steps;
  j["warmup"] = r.warmup;
  j["seed"] = r.seed;
  j["dim"] = r.dim;
  j["classification"] = to_json(lyapunov::classify(r, theta));
  j["checkpoint_steps"] = r.checkpoint_steps;
  j["running_means"] = r.running_means;
  return j;
}

Json to_json(const lyapunov::TopExponent& t) {
  Json j;
  j["lambda1"] = t.value;
  j["unit"] = t.unit;
  j["epsilon"] = t.epsilon;
  j["n_steps"] = t.n_steps;
  j["warmup"] = t.warmup;
  j["seed"] = t.seed;
  j["checkpoint_steps"] = t.checkpoint_steps;
  j["running_mean"] = t.running_mean;
  return j;
}

void write_history_csv(const lyapunov::LyapunovReport& r, std::ostream& os) {
  std::string line = "step";
  for (std::size_t i = 0; i < r.exponents.size(); ++i) line += fmt::format(",lambda{}", i);
  os << line << '\n';
  for (std::size_t k = 0; k < r.checkpoint_steps.size(); ++k) {
    line = std::to_string(r.checkpoint_steps[k]);
    for (const auto& series : r.running_means) line += "," + csv_number(series[k]);
    os << line << '\n';
  }
}

void write_history_csv(const lyapunov::LyapunovReport& r, const std::filesystem::path& path) {
  auto os = open_out(path);
  write_history_csv(r, os);
}

void write_spectrum_csv(const spectral::PowerSpectrum& s, std::ostream& os) {
  os << "freq,power\n";
  for (std::size_t k = 0; k < s.freqs.size(); ++k)
    os << csv_number(s.freqs[k]) << ',' << csv_number(s.power[k]) << '\n';
}

void write_spectrum_csv(const spectral::PowerSpectrum& s, const std::filesystem::path& path) {
  auto os = open_out(path);
  write_spectrum_csv(s, os);
}

spectral::PowerSpectrum read_spectrum_csv(const std::filesystem::path& path) {
  auto is = open_in(path);
  std::string line;
  if (!std::getline(is, line) || line != "freq,power")
    throw Error(ErrorCode::MalformedInput, path.string() + ": expected header 'freq,power'");
  spectral::PowerSpectrum s;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw Error(ErrorCode::MalformedInput, path.string() + ": bad row");
    double f = 0.0, p = 0.0;
    const char* end = line.data() + line.size();
    auto r1 = std::from_chars(line.data(), line.data() + comma, f);
    auto r2 = std::from_chars(line.data() + comma + 1, end, p);
    if (r1.ec != std::errc{} || r1.ptr != line.data() + comma || r2.ec != std::errc{} || r2.ptr != end)
      throw Error(ErrorCode::MalformedInput, path.string() + ": bad number in '" + line + "'");
    s.freqs.push_back(f);
    s.power.push_back(p);
  }
  if (s.freqs.size() < 3) throw Error(ErrorCode::MalformedInput, path.string() + ": too few bins");
  s.n_samples = 2 * (s.freqs.size() - 1);
  return s;
}

Json to_json(const spectral::PeakSet& p) {
  Json peaks = Json::array();
  for (const auto& pk : p.peaks) peaks.push_back({{"freq", pk.freq}, {"power", pk.power}, {"bin", pk.bin}});
  Json expl = Json::array();
  for (const auto& e : p.explanations) {
    Json terms = Json::array();
    for (const auto& [base, coeff] : e.terms) terms.push_back({{"peak", base}, {"coeff", coeff}});
    expl.push_back({{"peak", e.peak},
                    {"kind", e.kind == spectral::Explanation::Kind::Harmonic ? "harmonic" : "combination"},
                    {"terms", terms},
                    {"reconstructed", e.reconstructed}});
  }
  Json j;
  j["tolerance"] = p.tolerance;
  j["filtered"] = p.filtered;
  j["peaks"] = peaks;
  j["bases"] = p.bases;
  j["base_freqs"] = p.base_freqs();
  j["explanations"] = expl;
  return j;
}

Json to_json(const spectral::SpectrumClass& c) {
  return Json{{"kind", c.label()},
              {"n_bases", c.order},
              {"broadband_fraction", c.broadband_fraction},
              {"line_count", c.line_count}};
}

Json to_json(const reduce::PcaModel& m) {
  Json j;
  j["dim"] = m.dim;
  j["n_components"] = m.n_components;
  j["n_samples"] = m.n_samples;
  j["fitted_on"] = m.fitted_on == reduce::FitBasis::Scaled ? "scaled" : "unscaled";
  j["total_variance"] = m.total_variance;
  j["explained_variance"] = m.explained_variance;
  j["explained_variance_ratio"] = m.explained_variance_ratio;
  j["cumulative_ratio"] = m.cumulative_ratio;
  return j;
}

void save_pca(const reduce::PcaModel& m, const std::filesystem::path& path) {
  auto sidecar = path;
  sidecar += ".bin";
  Json j = to_json(m);
  j["sidecar"] = sidecar.filename().string();
  j["dtype"] = "float32_le";
  j["tensors"] = Json::array({Json{{"name", "mean"}, {"shape", {m.dim}}},
                              Json{{"name", "components"}, {"shape", {m.n_components, m.dim}}}});
  write_json(j, path);
  auto os = open_out(sidecar);
  for (double v : m.mean) detail::put_f32(os, static_cast<float>(v));
  for (double v : m.components) detail::put_f32(os, static_cast<float>(v));
  if (!os) throw Error(ErrorCode::Io, "write failed: " + sidecar.string());
}

reduce::PcaModel load_pca(const std::filesystem::path& path) {
  const Json j = read_json(path);
  reduce::PcaModel m;
  try {
    m.dim = j.at("dim").get<std::size_t>();
    m.n_components = j.at("n_components").get<std::size_t>();
    m.n_samples = j.at("n_samples").get<std::size_t>();
    m.fitted_on = j.at("fitted_on").get<std::string>() == "scaled" ? reduce::FitBasis::Scaled
                                                                    : reduce::FitBasis::Unscaled;
    m.total_variance = j.at("total_variance").get<double>();
    m.explained_variance = j.at("explained_variance").get<std::vector<double>>();
    m.explained_variance_ratio = j.at("explained_variance_ratio").get<std::vector<double>>();
    m.cumulative_ratio = j.at("cumulative_ratio").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedInput, path.string() + ": " + e.what());
  }
  auto is = open_in(path.parent_path() / j.value("sidecar", path.filename().string() + ".bin"));
  m.mean.resize(m.dim);
  m.components.resize(m.n_components * m.dim);
  for (auto& v : m.mean) v = detail::get_f32(is);
  for (auto& v : m.components) v = detail::get_f32(is);
  if (is.peek() != std::char_traits<char>::eof())
    throw Error(ErrorCode::MalformedInput, path.string() + ": trailing bytes in sidecar");
  return m;
}

Json to_json(const reduce::VolumeReport& v) {
  Json sums = Json::array();
  for (const auto& w : v.windows) sums.push_back(w.sum_distance);
  Json j;
  j["verdict"] = v.verdict;
  j["dissipative"] = v.dissipative;
  j["slope"] = v.slope;
  j["mean"] = v.mean;
  j["stddev"] = v.stddev;
  j["window"] = v.window;
  j["total_steps"] = v.total_steps;
  j["n_windows"] = v.windows.size();
  j["sums"] = sums;
  return j;
}

void write_volume_csv(const reduce::VolumeReport& v, const std::filesystem::path& path) {
  auto os = open_out(path);
  os << "window,t_start,sum_distance\n";
  for (const auto& w : v.windows) os << w.index << ',' << w.t_start << ',' << csv_number(w.sum_distance) << '\n';
}

Json to_json(const perturb::PerturbationSpec& s) {
  Json j;
  j["kind"] = perturb::to_string(s.kind);
  if (s.kind == perturb::PerturbationKind::SmallNoise) {
    j["noise_std"] = s.noise_std;
  } else {
    j["radius"] = s.circle_radius;
    if (s.circle_center)
      j["center"] = {s.circle_center->first, s.circle_center->second};
    else
      j["center"] = nullptr;
  }
  j["seed"] = s.rng_seed;
  return j;
}

Json to_json(const perturb::RecoveryResult& r) {
  return Json{{"verdict", perturb::to_string(r.verdict)},
              {"mode_distance", r.mode_distance},
              {"steps", r.trajectory.rows() - 1},
              {"tail", r.converged_tail.rows()}};
}

Json error_json(const std::exception& e) {
  Json err;
  if (const auto* ae = dynamic_cast<const Error*>(&e)) {
    err["code"] = std::string(to_string(ae->code()));
    err["exit_code"] = exit_code(e);
    err["message"] = e.what();
    if (const auto* nb = dynamic_cast<const NumericalBlowup*>(&e)) {
      err["index"] = nb->index();
      err["timestep"] = nb->timestep();
    }
  } else {
    err["code"] = "InvalidArgument";
    err["exit_code"] = exit_code(e);
    err["message"] = e.what();
  }
  return Json{{"error", err}};
}

int exit_code(const std::exception& e) {
  if (const auto* ae = dynamic_cast<const Error*>(&e)) return is_numerical(ae->code()) ? 3 : 2;
  return 2;
}

}  // namespace attractors::report
