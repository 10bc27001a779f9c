#include "attractors/plot.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <iterator>

#include "attractors/error.hpp"

namespace attractors::plot {

namespace {

constexpr double kMargin = 48.0;
constexpr std::size_t kColorBands = 64;

struct Rgb {
  double r, g, b;
};

// Viridis, sampled at five stops.
constexpr std::array<Rgb, 5> kViridis{{{68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}}};

constexpr std::array<const char*, 8> kPalette{"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                              "#ff7f0e", "#17becf", "#8c564b", "#e377c2"};

std::string viridis(double t) {
  t = std::clamp(t, 0.0, 1.0) * (kViridis.size() - 1);
  const auto i = std::min<std::size_t>(static_cast<std::size_t>(t), kViridis.size() - 2);
  const double f = t - static_cast<double>(i);
  const auto& a = kViridis[i];
  const auto& b = kViridis[i + 1];
  auto mix = [f](double u, double v) { return static_cast<int>(std::lround(u + f * (v - u))); };
  return fmt::format("#{:02x}{:02x}{:02x}", mix(a.r, b.r), mix(a.g, b.g), mix(a.b, b.b));
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// Maps data ranges onto the plotting rectangle; y grows upwards.
struct Frame {
  double x0, x1, y0, y1;
  double w, h;

  Frame(double xmin, double xmax, double ymin, double ymax, const Style& st)
      : x0(xmin), x1(xmax), y0(ymin), y1(ymax), w(st.width), h(st.height) {
    if (!(x1 > x0)) x1 = x0 + 1.0;
    if (!(y1 > y0)) {
      y0 -= 0.5;
      y1 = y0 + 1.0;
    }
  }

  double px(double x) const { return kMargin + (x - x0) / (x1 - x0) * (w - 2 * kMargin); }
  double py(double y) const { return h - kMargin - (y - y0) / (y1 - y0) * (h - 2 * kMargin); }
};

std::string header(const Style& st) {
  std::string s = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\">\n"
      "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
      st.width, st.height);
  if (!st.title.empty())
    s += fmt::format("<text x=\"{:.2f}\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
                     "font-size=\"14\">{}</text>\n",
                     st.width / 2.0, escape(st.title));
  return s;
}

std::string axes(const Frame& f, const std::string& xlabel, const std::string& ylabel) {
  std::string s = fmt::format(
      "<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"none\" stroke=\"#444\"/>\n",
      kMargin, kMargin, f.w - 2 * kMargin, f.h - 2 * kMargin);
  const auto label = [](double x, double y, const char* anchor, const std::string& text) {
    return fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"{}\" font-family=\"sans-serif\" "
                       "font-size=\"10\">{}</text>\n",
                       x, y, anchor, escape(text));
  };
  s += label(kMargin, f.h - kMargin + 14, "start", fmt::format("{:.4g}", f.x0));
  s += label(f.w - kMargin, f.h - kMargin + 14, "end", fmt::format("{:.4g}", f.x1));
  s += label(kMargin - 4, f.h - kMargin, "end", fmt::format("{:.4g}", f.y0));
  s += label(kMargin - 4, kMargin + 8, "end", fmt::format("{:.4g}", f.y1));
  s += label(f.w / 2, f.h - kMargin + 28, "middle", xlabel);
  s += label(kMargin - 4, kMargin - 8, "start", ylabel);
  return s;
}

std::string polyline(const std::vector<std::pair<double, double>>& pts, const std::string& stroke,
                     const char* cls) {
  std::string s = fmt::format("<polyline class=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1\" points=\"",
                              cls, stroke);
  for (std::size_t i = 0; i < pts.size(); ++i)
    fmt::format_to(std::back_inserter(s), "{}{:.2f},{:.2f}", i ? " " : "", pts[i].first, pts[i].second);
  return s + "\"/>\n";
}

std::pair<double, double> range(const std::vector<double>& v) {
  double lo = HUGE_VAL, hi = -HUGE_VAL;
  for (double x : v)
    if (std::isfinite(x)) {
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
  if (lo > hi) return {0.0, 1.0};
  return {lo, hi};
}

}  // namespace

std::string trajectory_svg(const Trajectory& projected, const Style& style) {
  const std::size_t n = projected.rows();
  if (projected.dim < 2 || n < 2)
    throw Error(ErrorCode::InvalidArgument, "trajectory plot needs at least 2 columns and 2 rows");

  std::vector<double> u(n), v(n);
  const bool three = projected.dim >= 3;
  // Fixed oblique view: azimuth 35 degrees, elevation 25 degrees.
  const double ca = std::cos(0.6108652381980153), sa = std::sin(0.6108652381980153);
  const double ce = std::cos(0.4363323129985824), se = std::sin(0.4363323129985824);
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = projected.row(i);
    if (three) {
      u[i] = r[0] * ca - r[1] * sa;
      v[i] = (r[0] * sa + r[1] * ca) * se + r[2] * ce;
    } else {
      u[i] = r[0];
      v[i] = r[1];
    }
  }
  const auto [ux0, ux1] = range(u);
  const auto [vy0, vy1] = range(v);
  const Frame f(ux0, ux1, vy0, vy1, style);

  std::string s = header(style);
  s += axes(f, three ? "oblique view of PC1-PC3" : "PC1", three ? "" : "PC2");
  const std::size_t bands = std::min(kColorBands, n - 1);
  for (std::size_t b = 0; b < bands; ++b) {
    // Band b covers segments [first, last); neighbouring bands share an endpoint.
    const std::size_t first = b * (n - 1) / bands;
    const std::size_t last = (b + 1) * (n - 1) / bands;
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = first; i <= last; ++i) pts.emplace_back(f.px(u[i]), f.py(v[i]));
    s += polyline(pts, viridis(bands > 1 ? static_cast<double>(b) / (bands - 1) : 0.0), "trajectory");
  }
  return s + "</svg>\n";
}

std::string spectrum_svg(const std::vector<double>& freqs, const std::vector<double>& power,
                         const std::vector<double>& base_freqs, const Style& style) {
  if (freqs.size() != power.size() || freqs.size() < 2)
    throw Error(ErrorCode::InvalidArgument, "spectrum plot needs matching freq and power columns");
  std::vector<double> logp(power.size());
  for (std::size_t k = 0; k < power.size(); ++k) logp[k] = std::log10(std::max(power[k], 1e-12));
  const auto [fx0, fx1] = range(freqs);
  const auto [ly0, ly1] = range(logp);
  const Frame f(fx0, fx1, ly0, ly1, style);

  std::string s = header(style);
  s += axes(f, "frequency", "log10 power");
  std::vector<std::pair<double, double>> pts;
  for (std::size_t k = 0; k < freqs.size(); ++k) pts.emplace_back(f.px(freqs[k]), f.py(logp[k]));
  s += polyline(pts, "#1f77b4", "spectrum");
  for (double b : base_freqs)
    s += fmt::format("<line class=\"base\" x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" y2=\"{2:.2f}\" "
                     "stroke=\"#d62728\" stroke-dasharray=\"4 3\"/>\n",
                     f.px(b), f.py(f.y0), f.py(f.y1));
  return s + "</svg>\n";
}

std::string lines_svg(const std::vector<double>& x, const std::vector<std::vector<double>>& series,
                      const std::vector<std::string>& labels, const Style& style) {
  if (x.empty()) throw Error(ErrorCode::InvalidArgument, "line plot needs at least one point");
  std::vector<double> all;
  for (const auto& ys : series) {
    if (ys.size() != x.size()) throw Error(ErrorCode::InvalidArgument, "series length differs from x");
    all.insert(all.end(), ys.begin(), ys.end());
  }
  const auto [xx0, xx1] = range(x);
  const auto [yy0, yy1] = range(all);
  const Frame f(xx0, xx1, yy0, yy1, style);

  std::string s = header(style);
  s += axes(f, "", "");
  for (std::size_t i = 0; i < series.size(); ++i) {
    std::vector<std::pair<double, double>> pts;
    for (std::size_t k = 0; k < x.size(); ++k)
      if (std::isfinite(series[i][k])) pts.emplace_back(f.px(x[k]), f.py(series[i][k]));
    const char* colour = kPalette[i % kPalette.size()];
    s += polyline(pts, colour, "series");
    if (i < labels.size())
      s += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-family=\"sans-serif\" font-size=\"10\" "
                       "fill=\"{}\">{}</text>\n",
                       f.w - kMargin + 4, kMargin + 12.0 * (i + 1), colour, escape(labels[i]));
  }
  return s + "</svg>\n";
}

void write_text(const std::string& text, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorCode::Io, "cannot open " + path.string() + " for writing");
  os << text;
  if (!os) throw Error(ErrorCode::Io, "write failed: " + path.string());
}

}  // namespace attractors::plot
