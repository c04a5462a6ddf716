#include "qhd/csv.hpp"
#include "qhd/scenario.hpp"

#include <doctest.h>

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <string>
#include <unistd.h>

using namespace qhd;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("qhd-test-" + tag + "-" + std::to_string(::getpid()));
    fs::remove_all(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

const char* kSmall = R"(
name: small
grid: {bounds: [-10, 10], points: 128}
potential: {kind: harmonic}
initial_state: {kind: gaussian, center: 1, sigma: 0.7071067811865476}
evolution: {dt: 0.005, steps: 40, snapshot_stride: 4}
trajectories: {count: 2000, seed: 5, substeps: 1}
diagnostics: [norm, energy, continuity, madelung, chetaev, uncertainty, equivariance]
)";

RunOptions at(const fs::path& dir, RunMode mode = RunMode::Run, unsigned threads = 1) {
  RunOptions o;
  o.out = dir;
  o.mode = mode;
  o.threads = threads;
  return o;
}

}  // namespace

TEST_SUITE("cli-io") {

TEST_CASE("small run writes every artifact") {
  TempDir tmp("small");
  const auto m = run_scenario(parse_config(kSmall), at(tmp.path));
  INFO(m.error);
  CHECK(m.error.empty());
  CHECK(m.pass);
  CHECK(m.exit_code == exit_code::kPass);
  for (const char* f : {"config.yaml", "potential.qhdf", "psi_000000.qhdf", "psi_000040.qhdf", "trajectories.csv",
                        "final_positions.csv", "histogram.csv", "diagnostics.csv", "summary.txt", "manifest.json"})
    CHECK_MESSAGE(fs::exists(tmp.path / f), f);
  for (const auto& f : m.files) CHECK(fs::exists(tmp.path / f));
  CHECK(!fs::exists(tmp.path / ".lock"));

  const auto j = nlohmann::json::parse(csv::read_file(tmp.path / "manifest.json"));
  CHECK(j["scenario"] == "small");
  CHECK(j["config_hash"] == config_hash(parse_config(kSmall)));
  CHECK(j["pass"] == true);
  CHECK(j["versions"].contains("fftw"));

  const auto header = csv::read_file(tmp.path / "trajectories.csv").substr(0, 17);
  CHECK(header == "t,particle_id,x\n0");
}

TEST_CASE("module errors land in a failed manifest") {
  TempDir tmp("bad-method");
  auto cfg = parse_config(R"(
name: wrong
grid: {bounds: [0, 1], points: 64, boundary: dirichlet-zero}
potential: {kind: box}
initial_state: {kind: eigenstate, n: 0}
evolution: {method: split-spectral, dt: 0.001, steps: 2}
)");
  const auto m = run_scenario(cfg, at(tmp.path));
  CHECK_FALSE(m.pass);
  CHECK(m.exit_code == exit_code::kRuntimeError);
  CHECK(m.error.find("split-spectral requires a periodic grid") != std::string::npos);
  const auto j = nlohmann::json::parse(csv::read_file(tmp.path / "manifest.json"));
  CHECK(j["pass"] == false);
  CHECK(j["error"].get<std::string>().find("periodic") != std::string::npos);
}

TEST_CASE("reruns are byte identical across thread counts") {
  TempDir a("det-a"), b("det-b");
  const auto cfg = parse_config(kSmall);
  run_scenario(cfg, at(a.path, RunMode::Run, 1));
  run_scenario(cfg, at(b.path, RunMode::Run, 4));
  for (const char* f : {"psi_000020.qhdf", "trajectories.csv", "final_positions.csv", "histogram.csv",
                        "diagnostics.csv", "config.yaml"})
    CHECK_MESSAGE(csv::read_file(a.path / f) == csv::read_file(b.path / f), f);
}

TEST_CASE("seed override changes the ensemble and the hash") {
  TempDir a("seed-a"), b("seed-b");
  auto cfg = parse_config(kSmall);
  run_scenario(cfg, at(a.path, RunMode::Trajectories));
  override_seed(cfg, 6);
  CHECK(cfg.trajectories->seed == 6);
  CHECK(config_hash(cfg) != config_hash(parse_config(kSmall)));
  run_scenario(cfg, at(b.path, RunMode::Trajectories));
  CHECK(csv::read_file(a.path / "final_positions.csv") != csv::read_file(b.path / "final_positions.csv"));
}

TEST_CASE("harmonic spectrum") {
  TempDir tmp("spectrum");
  const auto m = run_scenario(parse_config(R"(
name: ho
grid: {bounds: [-8, 8], points: 512, boundary: dirichlet-zero}
potential: {kind: harmonic}
spectrum: {states: 4}
)"),
                              at(tmp.path, RunMode::Spectrum));
  INFO(m.error);
  REQUIRE(m.pass);
  const auto text = csv::read_file(tmp.path / "spectrum.csv");
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  CHECK(line == "n,energy");
  for (int n = 0; n < 4; ++n) {
    REQUIRE(std::getline(in, line));
    const double e = std::stod(line.substr(line.find(',') + 1));
    CHECK(e == doctest::Approx(n + 0.5).epsilon(0).scale(0).epsilon(2e-3));
  }
}

TEST_CASE("diagnose reproduces the stored report") {
  TempDir tmp("diagnose");
  run_scenario(parse_config(kSmall), at(tmp.path));
  const auto d = diagnose(tmp.path);
  CHECK(d.mismatches.empty());
  CHECK(d.exit_code == exit_code::kPass);
  CHECK(d.report.to_csv() == csv::read_file(tmp.path / "diagnostics.csv"));

  csv::write_file(tmp.path / "config.yaml", "name: other\n");
  CHECK_THROWS_WITH(diagnose(tmp.path), doctest::Contains("hash"));
}

TEST_CASE("state diagnostics without evolution") {
  TempDir tmp("static");
  const auto m = run_scenario(parse_config(R"(
name: static
grid: {bounds: [-8, 8], points: 1024, boundary: dirichlet-zero}
potential: {kind: harmonic}
initial_state: {kind: eigenstate, n: 1}
diagnostics: [chetaev, uncertainty, action]
)"),
                              at(tmp.path));
  INFO(m.error);
  CHECK(m.pass);
  const auto entries = csv::read_diagnostics(tmp.path / "diagnostics.csv");
  REQUIRE(entries.size() == 3);
  CHECK(entries[0].name == "chetaev");
  CHECK(entries[0].value < 1e-10);
  CHECK(fs::exists(tmp.path / "psi_000000.qhdf"));
  CHECK(diagnose(tmp.path).mismatches.empty());
}

TEST_CASE("classical mode") {
  TempDir tmp("classical");
  const auto m = run_scenario(parse_config(R"(
name: osc
potential: {kind: harmonic}
classical:
  q: [1]
  p: [0]
  dt: 0.01
  steps: 500
  lyapunov: {horizon: 50, seed: 1}
)"),
                              at(tmp.path, RunMode::Classical));
  INFO(m.error);
  CHECK(m.pass);
  for (const char* f : {"classical.csv", "variational.csv", "lyapunov.csv", "characteristic.csv"})
    CHECK_MESSAGE(fs::exists(tmp.path / f), f);
}

TEST_CASE("a locked directory is refused") {
  TempDir tmp("lock");
  fs::create_directories(tmp.path);
  std::FILE* f = std::fopen((tmp.path / ".lock").c_str(), "w");
  std::fclose(f);
  const auto m = run_scenario(parse_config(kSmall), at(tmp.path));
  CHECK_FALSE(m.pass);
  CHECK(m.error.find("locked") != std::string::npos);
  CHECK(fs::exists(tmp.path / ".lock"));
}

}  // TEST_SUITE
