#pragma once

#include <filesystem>
#include <iosfwd>

#include "attractors/dynsys.hpp"

namespace attractors {

// CSV: header `t,x0,x1,...`, one row per state, t = t_start + i * dt.
void write_trajectory_csv(const Trajectory& traj, std::ostream& os);
void write_trajectory_csv(const Trajectory& traj, const std::filesystem::path& path);
Trajectory read_trajectory_csv(const std::filesystem::path& path);

// ATRJ container: magic "ATRJ", u32 version (1), u64 T, u64 D, then T*D
// little-endian IEEE-754 doubles, row-major. t_start and dt are not stored.
inline constexpr std::uint32_t kAtrjVersion = 1;

void write_atrj(const Trajectory& traj, std::ostream& os);
void write_atrj(const Trajectory& traj, const std::filesystem::path& path);
Trajectory read_atrj(std::istream& is);
Trajectory read_atrj(const std::filesystem::path& path);

}  // namespace attractors
