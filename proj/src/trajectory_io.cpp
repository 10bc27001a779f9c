#include "attractors/trajectory_io.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "binary_io.hpp"

namespace attractors {

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

double parse_double(std::string_view field) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc{} || ptr != field.data() + field.size())
    throw Error(ErrorCode::MalformedInput, "bad number '" + std::string(field) + "'");
  return v;
}

}  // namespace

void write_trajectory_csv(const Trajectory& traj, std::ostream& os) {
  std::string line = "t";
  for (std::size_t j = 0; j < traj.dim; ++j) line += fmt::format(",x{}", j);
  os << line << '\n';
  for (std::size_t i = 0; i < traj.rows(); ++i) {
    line = fmt::format("{}", static_cast<double>(traj.t_start) + static_cast<double>(i) * traj.dt);
    for (double v : traj.row(i)) fmt::format_to(std::back_inserter(line), ",{}", v);
    os << line << '\n';
  }
}

void write_trajectory_csv(const Trajectory& traj, const std::filesystem::path& path) {
  auto os = open_out(path);
  write_trajectory_csv(traj, os);
}

Trajectory read_trajectory_csv(const std::filesystem::path& path) {
  auto is = open_in(path);
  std::string line;
  if (!std::getline(is, line) || line.rfind("t,", 0) != 0)
    throw Error(ErrorCode::MalformedInput, path.string() + ": expected header 't,x0,...'");
  const std::size_t dim = static_cast<std::size_t>(std::count(line.begin(), line.end(), ','));

  Trajectory traj;
  traj.dim = dim;
  std::vector<double> times;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::string_view rest(line);
    std::vector<double> fields;
    while (true) {
      auto comma = rest.find(',');
      fields.push_back(parse_double(rest.substr(0, comma)));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (fields.size() != dim + 1)
      throw Error(ErrorCode::MalformedInput, path.string() + ": ragged row");
    times.push_back(fields[0]);
    traj.states.insert(traj.states.end(), fields.begin() + 1, fields.end());
  }
  if (times.empty()) throw Error(ErrorCode::MalformedInput, path.string() + ": no rows");
  traj.t_start = static_cast<std::int64_t>(std::llround(times.front()));
  traj.dt = times.size() > 1 ? times[1] - times[0] : 1.0;
  return traj;
}

void write_atrj(const Trajectory& traj, std::ostream& os) {
  os.write("ATRJ", 4);
  detail::put_le<std::uint32_t>(os, kAtrjVersion);
  detail::put_le<std::uint64_t>(os, traj.rows());
  detail::put_le<std::uint64_t>(os, traj.dim);
  for (double v : traj.states) detail::put_f64(os, v);
}

void write_atrj(const Trajectory& traj, const std::filesystem::path& path) {
  auto os = open_out(path);
  write_atrj(traj, os);
}

Trajectory read_atrj(std::istream& is) {
  char magic[4];
  if (!is.read(magic, 4) || std::string_view(magic, 4) != "ATRJ")
    throw Error(ErrorCode::MalformedInput, "not an ATRJ stream");
  const auto version = detail::get_le<std::uint32_t>(is);
  if (version != kAtrjVersion)
    throw Error(ErrorCode::VersionMismatch, "unsupported ATRJ version " + std::to_string(version));
  const auto rows = detail::get_le<std::uint64_t>(is);
  const auto dim = detail::get_le<std::uint64_t>(is);
  Trajectory traj;
  traj.dim = dim;
  traj.states.resize(rows * dim);
  for (auto& v : traj.states) v = detail::get_f64(is);
  return traj;
}

Trajectory read_atrj(const std::filesystem::path& path) {
  auto is = open_in(path);
  return read_atrj(is);
}

}  // namespace attractors
