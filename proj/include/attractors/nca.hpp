#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "attractors/dynsys.hpp"

namespace attractors::nca {

inline constexpr int kChannels = 16;
inline constexpr int kAlpha = 3;
inline constexpr int kPerception = 3 * kChannels;
inline constexpr int kDefaultHidden = 128;
inline constexpr double kAliveThreshold = 0.1;
inline constexpr const char* kKernelNorm = "sobel/8";

/// H x W x C grid. Channels 0-2 are RGB, 3 is alpha, the rest are hidden.
/// Storage is row-major over (y, x, c), which is also the flattening order.
struct Substrate {
  int height = 0;
  int width = 0;
  int channels = kChannels;
  std::vector<double> data;

  Substrate() = default;
  Substrate(int height, int width, int channels = kChannels);

  static Substrate from_flat(std::span<const double> flat, GridShape shape);

  GridShape shape() const { return {height, width, channels}; }
  double& at(int y, int x, int c) { return data[index(y, x, c)]; }
  double at(int y, int x, int c) const { return data[index(y, x, c)]; }
  std::size_t index(int y, int x, int c) const {
    return (static_cast<std::size_t>(y) * width + x) * channels + c;
  }
  bool operator==(const Substrate&) const = default;
};

/// Two dense layers applied per cell to the 48-channel perception vector:
/// delta = w2^T relu(w1^T p + b1). w1 is [48][hidden], w2 is [hidden][16]
/// (no bias), both row-major.
struct RuleWeights {
  int channels = kChannels;
  int hidden = kDefaultHidden;
  std::vector<double> w1;
  std::vector<double> b1;
  std::vector<double> w2;
  double update_rate = 1.0;
  std::string kernel_norm = kKernelNorm;
  /// Grid size suggested by the producer; 0 when unspecified.
  int height = 0;
  int width = 0;
  /// Header keys not interpreted by the engine (damage convention, epoch, ...).
  nlohmann::ordered_json metadata = nlohmann::ordered_json::object();

  /// The do-nothing rule: every weight zero.
  static RuleWeights zeros(int hidden = kDefaultHidden);
  /// Gaussian weights with the given scale; values are rounded to float so
  /// they survive a save/load round trip unchanged.
  static RuleWeights random(std::uint64_t seed, double scale, int hidden = kDefaultHidden);

  /// Throws MalformedWeights on inconsistent shapes or non-finite values.
  void validate() const;
};

struct LivingMask {
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> alive;

  bool at(int y, int x) const { return alive[static_cast<std::size_t>(y) * width + x] != 0; }
  std::size_t count() const;
  bool operator==(const LivingMask&) const = default;
};

/// Depthwise 3x3 perception with zero padding. Output is H x W x 48, channel
/// order [identity(0..15), sobel_x(0..15), sobel_y(0..15)]. The Sobel kernels
/// are outer([1,2,1], [-1,0,1]) / 8 (x) and its transpose (y), applied as a
/// cross-correlation.
std::vector<double> perceive(const Substrate& s);

/// True where the 3x3 max-pooled alpha strictly exceeds 0.1.
LivingMask living_mask(const Substrate& s);
LivingMask living_mask(std::span<const double> flat, GridShape shape);

/// One synchronous update: s + delta, then every cell that is not alive both
/// before and after the update is zeroed. Throws NumericalBlowup.
Substrate nca_step(const Substrate& s, const RuleWeights& w);

/// OpenMP kernel behind nca_step. Bit-identical to step_into_serial for any
/// thread count.
void step_into(std::span<const double> in, std::span<double> out, GridShape shape,
               const RuleWeights& w);

/// Straight sequential loop over every cell; kept as the reference the
/// parallel kernel is tested and benchmarked against.
void step_into_serial(std::span<const double> in, std::span<double> out, GridShape shape,
                      const RuleWeights& w);

/// All zeros except alpha and hidden channels (3..15) of the centre cell at (H/2, W/2).
Substrate seed_state(int height, int width);

/// Wraps the rule as a SystemHandle over the flattened H*W*16 substrate.
SystemHandle as_system(RuleWeights w, int height, int width);

/// NCAW v1: one line of JSON header, then w1, b1, w2 as little-endian float32.
RuleWeights load_weights(const std::filesystem::path& path);
void save_weights(const RuleWeights& w, const std::filesystem::path& path);

/// RGBA PNG of channels 0-3 clamped to [0, 1].
void write_png(const Substrate& s, const std::filesystem::path& path);

}  // namespace attractors::nca
