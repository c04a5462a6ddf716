#include "qhd/config.hpp"
#include "qhd/scenario.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>

namespace {

struct Globals {
  std::string out;
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
  bool quiet = false;
};

int run_mode(const std::string& path, qhd::RunMode mode, const Globals& g) {
  qhd::ScenarioConfig config;
  try {
    config = qhd::load_config(path);
  } catch (const qhd::ConfigError& e) {
    std::cerr << "config error in " << path << ":\n";
    for (const auto& p : e.problems()) std::cerr << "  " << p << "\n";
    return qhd::exit_code::kConfigError;
  }
  if (g.seed) qhd::override_seed(config, *g.seed);
  qhd::RunOptions opt;
  opt.out = g.out;
  opt.threads = g.threads;
  opt.quiet = g.quiet;
  opt.mode = mode;
  const auto m = qhd::run_scenario(config, opt);
  if (!m.error.empty()) std::cerr << "error: " << m.error << "\n";
  if (!g.quiet) std::cout << (m.pass ? "PASS " : "FAIL ") << m.directory.string() << "\n";
  return m.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qhdlab: wave-function, trajectory and stability runs from scenario configs"};
  app.require_subcommand(1);
  Globals g;
  std::uint64_t seed = 0;
  auto* seed_opt = app.add_option("--seed", seed, "override every seed of the config")->group("Global");
  app.add_option("--out", g.out, "output directory (default ./runs/<name>-<hash>)")->group("Global");
  app.add_option("--threads", g.threads, "parallelism cap")->check(CLI::Range(1u, 1024u))->group("Global");
  app.add_flag("--quiet", g.quiet, "suppress progress and summary output")->group("Global");
  app.fallthrough();

  std::string cfg;
  struct Sub {
    const char* name;
    const char* help;
    qhd::RunMode mode;
  };
  const Sub subs[] = {{"run", "full pipeline", qhd::RunMode::Run},
                      {"spectrum", "eigenvalues of the scenario potential", qhd::RunMode::Spectrum},
                      {"trajectories", "evolution plus Bohmian trajectories", qhd::RunMode::Trajectories},
                      {"classical", "classical flow, variations and exponents", qhd::RunMode::Classical}};
  std::vector<std::pair<CLI::App*, qhd::RunMode>> run_cmds;
  for (const auto& s : subs) {
    auto* cmd = app.add_subcommand(s.name, s.help);
    cmd->add_option("config", cfg, "scenario YAML")->required()->check(CLI::ExistingFile);
    run_cmds.emplace_back(cmd, s.mode);
  }
  std::string run_dir;
  auto* diag = app.add_subcommand("diagnose", "recompute diagnostics of a finished run");
  diag->add_option("run_dir", run_dir, "run output directory")->required()->check(CLI::ExistingDirectory);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : qhd::exit_code::kConfigError;
  }
  if (seed_opt->count() > 0) g.seed = seed;

  for (const auto& [cmd, mode] : run_cmds)
    if (cmd->parsed()) return run_mode(cfg, mode, g);

  try {
    const auto r = qhd::diagnose(run_dir);
    if (!g.quiet) std::cout << r.report.summary();
    for (const auto& m : r.mismatches) std::cerr << "mismatch: " << m << "\n";
    if (!g.quiet) std::cout << (r.mismatches.empty() ? "report reproduced\n" : "report NOT reproduced\n");
    return r.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return qhd::exit_code::kRuntimeError;
  }
}
