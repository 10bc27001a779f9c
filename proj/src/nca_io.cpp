#include <png.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>

#include "attractors/error.hpp"
#include "attractors/nca.hpp"
#include "binary_io.hpp"

namespace attractors::nca {

namespace {

using nlohmann::ordered_json;

constexpr std::size_t kMaxHeaderBytes = 1 << 16;

[[noreturn]] void malformed(const std::string& what) {
  throw Error(ErrorCode::MalformedWeights, what);
}

struct TensorDecl {
  std::string name;
  std::vector<std::int64_t> shape;
};

std::vector<TensorDecl> expected_tensors(int channels, int hidden) {
  return {{"w1", {3 * channels, hidden}}, {"b1", {hidden}}, {"w2", {hidden, channels}}};
}

std::string shape_string(const std::vector<std::int64_t>& shape) {
  std::string s;
  for (std::size_t i = 0; i < shape.size(); ++i) s += (i ? "x" : "") + std::to_string(shape[i]);
  return s;
}

template <class T>
T header_value(const ordered_json& header, const char* key) {
  if (!header.contains(key)) malformed(std::string("header is missing '") + key + "'");
  try {
    return header.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    malformed(std::string("header field '") + key + "' has the wrong type");
  }
}

}  // namespace

RuleWeights load_weights(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorCode::Io, "cannot open " + path.string());

  std::string line;
  char ch = 0;
  while (is.get(ch) && ch != '\n') {
    line.push_back(ch);
    if (line.size() > kMaxHeaderBytes) malformed("header line too long");
  }
  if (ch != '\n') malformed("missing header terminator");

  ordered_json header;
  try {
    header = ordered_json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    malformed(std::string("header is not valid JSON: ") + e.what());
  }
  if (!header.is_object()) malformed("header must be a JSON object");
  if (!header.contains("magic") || header["magic"] != "NCAW") malformed("bad magic");
  const auto version = header_value<std::int64_t>(header, "version");
  if (version != 1)
    throw Error(ErrorCode::VersionMismatch, "unsupported NCAW version " + std::to_string(version));

  RuleWeights w;
  w.channels = header_value<int>(header, "C");
  w.hidden = header_value<int>(header, "hidden");
  w.height = header_value<int>(header, "H");
  w.width = header_value<int>(header, "W");
  w.update_rate = header_value<double>(header, "update_rate");
  w.kernel_norm = header_value<std::string>(header, "kernel_norm");

  if (w.update_rate != 1.0)
    throw Error(ErrorCode::UnsupportedUpdateRate,
                "update_rate " + std::to_string(w.update_rate) + " is not supported; the engine is deterministic");
  if (w.kernel_norm != kKernelNorm) malformed("kernel_norm '" + w.kernel_norm + "' does not match the engine");
  if (w.channels != kChannels) malformed("expected 16 channels, found " + std::to_string(w.channels));
  if (w.hidden < 1) malformed("hidden width must be positive");

  const auto expected = expected_tensors(w.channels, w.hidden);
  if (header.contains("tensors")) {
    const auto& decl = header["tensors"];
    if (!decl.is_array() || decl.size() != expected.size()) malformed("tensor list must declare w1, b1, w2");
    for (std::size_t i = 0; i < expected.size(); ++i) {
      TensorDecl got;
      try {
        got.name = decl[i].at("name").get<std::string>();
        got.shape = decl[i].at("shape").get<std::vector<std::int64_t>>();
      } catch (const nlohmann::json::exception&) {
        malformed("bad tensor declaration");
      }
      if (got.name != expected[i].name)
        malformed("tensor " + std::to_string(i) + " is '" + got.name + "', expected '" + expected[i].name + "'");
      if (got.shape != expected[i].shape)
        malformed(got.name + " has shape " + shape_string(got.shape) + ", expected " +
                  shape_string(expected[i].shape));
    }
  }

  for (const char* key : {"magic", "version", "C", "hidden", "H", "W", "update_rate", "kernel_norm", "tensors"})
    header.erase(key);
  w.metadata = std::move(header);

  auto read_tensor = [&](std::vector<double>& dst, std::size_t n) {
    dst.resize(n);
    try {
      for (auto& v : dst) v = detail::get_f32(is);
    } catch (const Error&) {
      malformed("tensor data truncated");
    }
  };
  read_tensor(w.w1, static_cast<std::size_t>(3 * w.channels) * w.hidden);
  read_tensor(w.b1, static_cast<std::size_t>(w.hidden));
  read_tensor(w.w2, static_cast<std::size_t>(w.hidden) * w.channels);
  if (is.peek() != std::char_traits<char>::eof()) malformed("trailing bytes after tensor data");

  w.validate();
  return w;
}

void save_weights(const RuleWeights& w, const std::filesystem::path& path) {
  w.validate();
  ordered_json header;
  header["magic"] = "NCAW";
  header["version"] = 1;
  header["C"] = w.channels;
  header["hidden"] = w.hidden;
  header["H"] = w.height;
  header["W"] = w.width;
  header["update_rate"] = w.update_rate;
  header["kernel_norm"] = w.kernel_norm;
  ordered_json tensors = ordered_json::array();
  for (const auto& t : expected_tensors(w.channels, w.hidden))
    tensors.push_back({{"name", t.name}, {"shape", t.shape}});
  header["tensors"] = tensors;
  for (const auto& [key, value] : w.metadata.items()) header[key] = value;

  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream os(tmp, std::ios::binary);
    if (!os) throw Error(ErrorCode::Io, "cannot open " + tmp.string() + " for writing");
    os << header.dump() << '\n';
    for (const auto* tensor : {&w.w1, &w.b1, &w.w2})
      for (double v : *tensor) detail::put_f32(os, static_cast<float>(v));
    if (!os) throw Error(ErrorCode::Io, "write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void write_png(const Substrate& s, const std::filesystem::path& path) {
  if (s.channels < 4) throw Error(ErrorCode::InvalidArgument, "PNG export needs RGBA channels");
  std::unique_ptr<FILE, int (*)(FILE*)> fp(std::fopen(path.c_str(), "wb"), &std::fclose);
  if (!fp) throw Error(ErrorCode::Io, "cannot open " + path.string() + " for writing");

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw Error(ErrorCode::Io, "libpng initialisation failed");
  }
  std::vector<png_byte> rows(static_cast<std::size_t>(s.height) * s.width * 4);
  for (int y = 0; y < s.height; ++y)
    for (int x = 0; x < s.width; ++x)
      for (int c = 0; c < 4; ++c) {
        const double v = std::clamp(s.at(y, x, c), 0.0, 1.0);
        rows[(static_cast<std::size_t>(y) * s.width + x) * 4 + c] =
            static_cast<png_byte>(std::lround(v * 255.0));
      }
  std::vector<png_bytep> row_ptrs(s.height);
  for (int y = 0; y < s.height; ++y) row_ptrs[y] = rows.data() + static_cast<std::size_t>(y) * s.width * 4;

  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error(ErrorCode::Io, "libpng failed writing " + path.string());
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, s.width, s.height, 8, PNG_COLOR_TYPE_RGBA, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, row_ptrs.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

}  // namespace attractors::nca
