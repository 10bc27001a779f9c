#pragma once

#include <exception>
#include <filesystem>
#include <iosfwd>
#include <string>

#include <json.hpp>

#include "attractors/lyapunov.hpp"
#include "attractors/perturb.hpp"
#include "attractors/reduce.hpp"
#include "attractors/spectral.hpp"

// JSON and CSV forms of analysis results. Objects keep insertion order and
// doubles print in shortest round-trip form, so equal inputs give equal bytes.
namespace attractors::report {

using Json = nlohmann::ordered_json;

void write_json(const Json& j, const std::filesystem::path& path);
Json read_json(const std::filesystem::path& path);

Json to_json(const lyapunov::AttractorClass& c);
Json to_json(const lyapunov::LyapunovReport& r, double theta);
Json to_json(const lyapunov::TopExponent& t);
/// Rows are checkpoints: `step,lambda0,lambda1,...`.
void write_history_csv(const lyapunov::LyapunovReport& r, std::ostream& os);
void write_history_csv(const lyapunov::LyapunovReport& r, const std::filesystem::path& path);

/// `freq,power`, one row per bin.
void write_spectrum_csv(const spectral::PowerSpectrum& s, std::ostream& os);
void write_spectrum_csv(const spectral::PowerSpectrum& s, const std::filesystem::path& path);
spectral::PowerSpectrum read_spectrum_csv(const std::filesystem::path& path);
Json to_json(const spectral::PeakSet& p);
Json to_json(const spectral::SpectrumClass& c);

/// Summary statistics only; the tensors go to the sidecar.
Json to_json(const reduce::PcaModel& m);
/// Writes `<path>` (JSON) and `<path>.bin`: mean then components as
/// little-endian float32, the same convention as NCAW weight files.
void save_pca(const reduce::PcaModel& m, const std::filesystem::path& path);
/// Tensor values come back rounded to float32.
reduce::PcaModel load_pca(const std::filesystem::path& path);

Json to_json(const reduce::VolumeReport& v);
/// `window,t_start,sum_distance`.
void write_volume_csv(const reduce::VolumeReport& v, const std::filesystem::path& path);

Json to_json(const perturb::PerturbationSpec& s);
/// Distance, verdict and shapes; trajectories are written separately.
Json to_json(const perturb::RecoveryResult& r);

/// {"error": {"code", "exit_code", "message", ...}} for any exception.
Json error_json(const std::exception& e);
/// 3 for numerical failures, 2 otherwise.
int exit_code(const std::exception& e);

}  // namespace attractors::report
