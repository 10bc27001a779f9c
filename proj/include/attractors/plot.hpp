#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "attractors/dynsys.hpp"

// Static SVG figures. Layout is fixed and coordinates print with two
// decimals, so identical data always gives identical bytes.
namespace attractors::plot {

struct Style {
  int width = 640;
  int height = 480;
  std::string title;
};

/// Projected trajectory coloured by time (dark = early, bright = late).
/// Two columns draw as a plane; three or more use a fixed oblique view of
/// the first three.
std::string trajectory_svg(const Trajectory& projected, const Style& style = {});

/// log10 power against frequency; each base frequency gets a vertical marker
/// with class "base".
std::string spectrum_svg(const std::vector<double>& freqs, const std::vector<double>& power,
                         const std::vector<double>& base_freqs, const Style& style = {});

/// One polyline (class "series") per entry of `series`, all sharing `x`.
std::string lines_svg(const std::vector<double>& x, const std::vector<std::vector<double>>& series,
                      const std::vector<std::string>& labels, const Style& style = {});

void write_text(const std::string& text, const std::filesystem::path& path);

}  // namespace attractors::plot
