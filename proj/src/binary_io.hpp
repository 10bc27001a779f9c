#pragma once

// Little-endian scalar encoding shared by the ATRJ, NCAW and PCA sidecar formats.

#include <bit>
#include <cstdint>
#include <istream>
#include <ostream>

#include "attractors/error.hpp"

namespace attractors::detail {

template <class UInt>
void put_le(std::ostream& os, UInt v) {
  char bytes[sizeof(UInt)];
  for (std::size_t i = 0; i < sizeof(UInt); ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  os.write(bytes, sizeof(UInt));
}

template <class UInt>
UInt get_le(std::istream& is) {
  unsigned char bytes[sizeof(UInt)];
  if (!is.read(reinterpret_cast<char*>(bytes), sizeof(UInt)))
    throw Error(ErrorCode::MalformedInput, "unexpected end of binary stream");
  UInt v = 0;
  for (std::size_t i = 0; i < sizeof(UInt); ++i) v |= static_cast<UInt>(bytes[i]) << (8 * i);
  return v;
}

inline void put_f64(std::ostream& os, double v) { put_le(os, std::bit_cast<std::uint64_t>(v)); }
inline double get_f64(std::istream& is) { return std::bit_cast<double>(get_le<std::uint64_t>(is)); }
inline void put_f32(std::ostream& os, float v) { put_le(os, std::bit_cast<std::uint32_t>(v)); }
inline float get_f32(std::istream& is) { return std::bit_cast<float>(get_le<std::uint32_t>(is)); }

}  // namespace attractors::detail
