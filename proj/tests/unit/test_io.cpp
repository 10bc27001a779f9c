#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "attractors/dynsys.hpp"
#include "attractors/error.hpp"
#include "attractors/trajectory_io.hpp"
#include "test_util.hpp"

using namespace attractors;

TEST_SUITE("io") {

TEST_CASE("atrj layout is magic, version, T, D, then little-endian doubles") {
  Trajectory t(2, 3);
  t.states = {1.0, -2.5, 3.25, 0.0, 1e-300, -0.0};
  std::ostringstream os;
  write_atrj(t, os);
  const auto bytes = os.str();
  REQUIRE(bytes.size() == 4 + 4 + 8 + 8 + 6 * 8);
  CHECK(bytes.substr(0, 4) == "ATRJ");
  auto u32 = [&](std::size_t off) {
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(bytes[off + i]);
    return v;
  };
  auto u64 = [&](std::size_t off) {
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(bytes[off + i]);
    return v;
  };
  CHECK(u32(4) == 1);
  CHECK(u64(8) == 2);
  CHECK(u64(16) == 3);
  const std::uint64_t bits = u64(24 + 8);  // second value, -2.5
  double v;
  std::memcpy(&v, &bits, 8);
  CHECK(v == -2.5);
}

TEST_CASE("atrj round trip is bit exact") {
  const auto sys = make_oracle("lorenz");
  const auto t = evolve(*sys, StateVector{1, 1, 1}, 50, 1);
  testutil::TempDir dir;
  write_atrj(t, dir / "t.atrj");
  const auto back = read_atrj(dir / "t.atrj");
  CHECK(back.dim == t.dim);
  CHECK(back.states == t.states);
}

TEST_CASE("atrj rejects bad magic, version and truncation") {
  std::istringstream bad_magic(std::string("ATRX\x01\0\0\0", 8));
  CHECK_THROWS_AS(read_atrj(bad_magic), Error);

  Trajectory t(1, 1);
  std::ostringstream os;
  write_atrj(t, os);
  auto bytes = os.str();
  bytes[4] = 2;
  std::istringstream wrong_version(bytes);
  try {
    read_atrj(wrong_version);
    FAIL("expected VersionMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::VersionMismatch);
  }
  bytes[4] = 1;
  std::istringstream truncated(bytes.substr(0, bytes.size() - 3));
  CHECK_THROWS_AS(read_atrj(truncated), Error);
}

TEST_CASE("csv round trip keeps every digit") {
  const auto sys = make_oracle("van_der_pol");
  auto t = evolve(*sys, StateVector{2, 0}, 30, 1);
  t.t_start = 100;
  testutil::TempDir dir;
  write_trajectory_csv(t, dir / "t.csv");
  std::ifstream is(dir / "t.csv");
  std::string header;
  std::getline(is, header);
  CHECK(header == "t,x0,x1");
  const auto back = read_trajectory_csv(dir / "t.csv");
  CHECK(back.states == t.states);
  CHECK(back.t_start == 100);
  CHECK(back.dt == 1.0);
}

TEST_CASE("csv reader rejects malformed rows") {
  testutil::TempDir dir;
  {
    std::ofstream os(dir / "bad.csv");
    os << "t,x0,x1\n0,1,2\n1,3\n";
  }
  CHECK_THROWS_AS(read_trajectory_csv(dir / "bad.csv"), Error);
  {
    std::ofstream os(dir / "nan.csv");
    os << "t,x0\n0,abc\n";
  }
  CHECK_THROWS_AS(read_trajectory_csv(dir / "nan.csv"), Error);
}

}  // TEST_SUITE
