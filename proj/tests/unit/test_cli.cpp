#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "attractors/nca.hpp"
#include "attractors/report.hpp"
#include "test_util.hpp"

#ifndef ATTRACTORS_CLI_PATH
#error "ATTRACTORS_CLI_PATH must point at the command-line binary"
#endif

namespace fs = std::filesystem;

namespace {

struct Run {
  int status = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

// Runs the binary with `args`; `env` is prepended verbatim (e.g. "X=1 ").
Run cli(const testutil::TempDir& dir, const std::string& args, const std::string& env = "") {
  const auto out = dir / "stdout.txt";
  const auto err = dir / "stderr.txt";
  const std::string cmd = env + "'" + std::string(ATTRACTORS_CLI_PATH) + "' " + args + " >'" + out.string() +
                          "' 2>'" + err.string() + "'";
  const int raw = std::system(cmd.c_str());
  Run r;
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("lyapunov run writes its report and reruns identically") {
  testutil::TempDir dir;
  const auto a = dir / "a";
  const auto b = dir / "b";
  auto r = cli(dir, "lyapunov --system lorenz --burn-in 500 --steps 600 --seed 3 --out " + q(a));
  REQUIRE(r.status == 0);
  CHECK(r.out.find("\"command\":\"lyapunov\"") != std::string::npos);
  r = cli(dir, "lyapunov --system lorenz --burn-in 500 --steps 600 --seed 3 --out " + q(b));
  REQUIRE(r.status == 0);
  CHECK(slurp(a / "lyapunov.json") == slurp(b / "lyapunov.json"));
  CHECK(slurp(a / "lyapunov_history.csv") == slurp(b / "lyapunov_history.csv"));

  // Feeding the bundle back reproduces it.
  const auto c = dir / "c";
  r = cli(dir, "lyapunov --config " + q(a / "lyapunov.json") + " --out " + q(c));
  REQUIRE(r.status == 0);
  CHECK(slurp(a / "lyapunov.json") == slurp(c / "lyapunov.json"));

  const auto j = attractors::report::read_json(a / "lyapunov.json");
  CHECK(j["lyapunov"]["seed"] == 3);
  CHECK(j["lyapunov"]["unit"] == "per_unit_time");
  CHECK(j["lyapunov"].contains("theta"));
}

TEST_CASE("output directory comes from the environment when no flag is given") {
  testutil::TempDir dir;
  const auto target = dir / "env_out";
  const auto r = cli(dir, "volume --system torus --total 2000 --window-steps 200",
                     "ATTRACTORS_OUT=" + q(target) + " ");
  REQUIRE(r.status == 0);
  CHECK(fs::exists(target / "volume.json"));
  CHECK(fs::exists(target / "volume.csv"));
}

TEST_CASE("configuration errors exit with 2 and an error object") {
  testutil::TempDir dir;
  auto r = cli(dir, "lyapunov --system henon --out " + q(dir / "x"));
  CHECK(r.status == 2);
  CHECK(r.err.find("\"error\"") != std::string::npos);
  CHECK(r.err.find("UnknownSystem") != std::string::npos);

  r = cli(dir, "lyapunov --system lorenz --n-exponents 7 --out " + q(dir / "x"));
  CHECK(r.status == 2);

  {
    std::ofstream os(dir / "cfg.json");
    os << R"({"system": {"name": "lorenz"}, "bogus": 1})";
  }
  r = cli(dir, "lyapunov --config " + q(dir / "cfg.json") + " --out " + q(dir / "x"));
  CHECK(r.status == 2);
  CHECK(r.err.find("bogus") != std::string::npos);

  r = cli(dir, "frobnicate");
  CHECK(r.status == 2);

  r = cli(dir, "perturb --system lorenz --kind circle_damage --out " + q(dir / "x"));
  CHECK(r.status == 2);
}

TEST_CASE("numerical failures exit with 3") {
  testutil::TempDir dir;
  const auto r = cli(dir, "simulate --system linear_diag --diag 1,1e300 --record 20 --out " + q(dir / "x"));
  CHECK(r.status == 3);
  const auto j = attractors::report::Json::parse(r.err);
  CHECK(j["error"]["code"] == "NumericalBlowup");
  CHECK(j["error"]["exit_code"] == 3);
  CHECK(j["error"]["index"] == 1);
}

TEST_CASE("fourier and pca write their artifacts") {
  testutil::TempDir dir;
  const auto out = dir / "o";
  auto r = cli(dir, "fourier --system torus --burn-in 0 --record 4096 --out " + q(out));
  REQUIRE(r.status == 0);
  const auto f = attractors::report::read_json(out / "fourier.json");
  CHECK(f["spectrum"]["classification"]["kind"] == "quasi_periodic(2)");
  CHECK(fs::exists(out / "spectrum.csv"));
  CHECK(fs::exists(out / "spectrum.svg"));

  r = cli(dir, "pca --system lorenz --record 2000 --out " + q(out));
  REQUIRE(r.status == 0);
  CHECK(fs::exists(out / "pca_model.json"));
  CHECK(fs::exists(out / "projected.csv"));

  r = cli(dir, "plot " + q(out / "spectrum.csv") + " --out " + q(out));
  REQUIRE(r.status == 0);
  CHECK(fs::exists(out / "spectrum.svg"));
}

TEST_CASE("epochs: empty list is a config error") {
  testutil::TempDir dir;
  const auto r = cli(dir, "epochs --out " + q(dir / "x"));
  CHECK(r.status == 2);
}

TEST_CASE("epochs: identical checkpoints give identical top exponents") {
  testutil::TempDir dir;
  auto w = attractors::nca::RuleWeights::random(5, 0.05, 32);
  w.height = 12;
  w.width = 12;
  attractors::nca::save_weights(w, dir / "epoch_1.ncaw");
  attractors::nca::save_weights(w, dir / "epoch_2.ncaw");
  const auto r = cli(dir, "epochs " + q(dir / "epoch_1.ncaw") + " " + q(dir / "epoch_2.ncaw") +
                              " --burn-in 50 --record 40 --steps 60 --out " + q(dir / "e"));
  REQUIRE(r.status == 0);
  const auto j = attractors::report::read_json(dir / "e" / "epochs.json");
  REQUIRE(j["epochs"].size() == 2);
  CHECK(j["epochs"][0]["status"] == "ok");
  CHECK(j["epochs"][0]["epoch"] == "1");
  CHECK(j["epochs"][1]["epoch"] == "2");
  CHECK(j["epochs"][0]["lambda1"] == j["epochs"][1]["lambda1"]);
  CHECK(fs::exists(dir / "e" / "epochs.csv"));
}

TEST_CASE("epochs: a broken checkpoint fails alone") {
  testutil::TempDir dir;
  auto w = attractors::nca::RuleWeights::random(5, 0.05, 16);
  attractors::nca::save_weights(w, dir / "good.ncaw");
  {
    std::ofstream os(dir / "bad.ncaw");
    os << "not a weight file";
  }
  const auto r = cli(dir, "epochs " + q(dir / "good.ncaw") + " " + q(dir / "bad.ncaw") +
                              " --height 10 --width 10 --burn-in 20 --record 20 --steps 20 --out " + q(dir / "e"));
  CHECK(r.status == 0);
  const auto j = attractors::report::read_json(dir / "e" / "epochs.json");
  CHECK(j["epochs"][0]["status"] == "ok");
  CHECK(j["epochs"][1]["status"] == "failed");
}

}  // TEST_SUITE
