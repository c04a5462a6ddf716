#include "qhd/scenario.hpp"

#include "qhd/bohm.hpp"
#include "qhd/classical.hpp"
#include "qhd/csv.hpp"
#include "qhd/operators.hpp"
#include "qhd/qhdf.hpp"
#include "qhd/states.hpp"

#include <Eigen/Core>
#include <fftw3.h>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <limits>
#include <regex>
#include <set>

#ifndef QHD_VERSION
#define QHD_VERSION "0.0.0"
#endif
#ifndef QHD_YAML_CPP_VERSION
#define QHD_YAML_CPP_VERSION "unknown"
#endif

namespace qhd {
namespace fs = std::filesystem;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct ClassicalResults {
  HamiltonianSpec spec;
  ClassicalTrajectory reference;
  std::vector<VariationalTrajectory> variations;
  std::vector<double> invariant;
  std::optional<LyapunovResult> lyapunov;
  CharacteristicVerdict verdict;
};

/// Everything the report is computed from.
struct RunData {
  RealField potential;
  std::optional<EigenSolution> spectrum;
  std::optional<WaveTimeline> timeline;
  std::optional<TrajectoryEnsemble> ensemble;
  std::optional<ClassicalResults> classical;
};

bool wants(RunMode mode, RunMode part) { return mode == RunMode::Run || mode == part; }

std::map<std::string, std::string> versions() {
  return {{"qhdlab", QHD_VERSION},
          {"fftw", fftw_version},
          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                        std::to_string(EIGEN_MINOR_VERSION)},
          {"yaml-cpp", QHD_YAML_CPP_VERSION},
          {"compiler", __VERSION__}};
}

std::string snapshot_name(std::size_t step) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "psi_%06zu.qhdf", step);
  return buf;
}

RealField make_potential(const ScenarioConfig& c, const Grid& grid) {
  if (std::holds_alternative<potential::Tabulated>(c.potential.spec)) {
    fs::path file = c.potential.file;
    if (file.is_relative()) file = c.base_dir / file;
    auto u = real_field_from_dump(read_qhdf(file), grid.boundary());
    if (!(u.grid() == grid)) throw PreconditionError("tabulated potential grid does not match the scenario grid");
    return u;
  }
  if (std::holds_alternative<potential::Box>(c.potential.spec) && grid.periodic())
    throw PreconditionError("box potential requires a dirichlet-zero grid");
  return eval_potential(c.potential.spec, grid, c.units);
}

ComplexField make_component(const StateComponent& s, const Grid& grid, const RealField& U, const UnitSystem& units,
                            std::optional<EigenSolution>& eigen, std::size_t n_eigen) {
  if (s.kind == "gaussian") return states::gaussian(grid, s.center, s.sigma, s.momentum, units);
  if (s.kind == "plane-wave") return states::plane_wave(grid, s.momentum, units);
  if (!eigen) eigen = solve_eigenpairs(U, n_eigen, units);
  return states::from_real(eigen->states.at(s.n));
}

ComplexField make_initial(const ScenarioConfig& c, const Grid& grid, const RealField& U) {
  const auto& init = *c.initial_state;
  std::vector<const StateComponent*> parts;
  if (init.kind == "superposition")
    for (const auto& s : init.components) parts.push_back(&s);
  else
    parts.push_back(&init.state);
  std::size_t n_eigen = 0;
  for (const auto* s : parts)
    if (s->kind == "eigenstate") n_eigen = std::max(n_eigen, s->n + 1);
  std::optional<EigenSolution> eigen;
  if (parts.size() == 1) return make_component(*parts[0], grid, U, c.units, eigen, n_eigen);
  ComplexField psi(grid, Complex(0, 0));
  for (const auto* s : parts) {
    const auto f = make_component(*s, grid, U, c.units, eigen, n_eigen);
    const Complex w = std::polar(s->weight, s->phase);
    for (std::size_t i = 0; i < psi.size(); ++i) psi[i] += w * f[i];
  }
  return normalize(psi);
}

ClassicalResults run_classical(const ScenarioConfig& c) {
  const auto& k = *c.classical;
  ClassicalResults r;
  r.spec = {c.potential.spec, c.units.mass()};
  const ClassicalState x0{k.q, k.p, 0.0};
  r.reference = hamilton_flow(r.spec, x0, k.dt, k.steps);
  const std::size_t d = k.q.size();
  std::vector<VariationalState> v0;
  for (const auto& row : k.variations)
    v0.push_back({std::vector<double>(row.begin(), row.begin() + static_cast<long>(d)),
                  std::vector<double>(row.begin() + static_cast<long>(d), row.end())});
  for (const auto& v : v0) r.variations.push_back(variational_flow(r.spec, r.reference, v));
  if (r.variations.size() >= 2) r.invariant = poincare_invariant(r.variations[0], r.variations[1]);

  const LyapunovConfig ly = k.lyapunov.value_or(LyapunovConfig{});
  if (k.lyapunov) {
    std::vector<double> xs(k.q);
    xs.insert(xs.end(), k.p.begin(), k.p.end());
    LyapunovOptions opt;
    opt.horizon = ly.horizon;
    opt.renorm_interval = ly.renorm_interval;
    opt.dt = k.dt;
    opt.offset = ly.offset;
    opt.seed = ly.seed;
    r.lyapunov = lyapunov_estimate(classical_flow(r.spec, static_cast<int>(d)), xs, opt);
  }
  CharacteristicOptions co;
  co.horizon = ly.horizon;
  co.renorm_interval = ly.renorm_interval;
  co.dt = k.dt;
  co.tolerance = k.stability_tolerance;
  r.verdict = zero_characteristic_check(r.spec, x0, v0, co);
  return r;
}

/// Leading snapshots with a common spacing, as centered differences require.
WaveTimeline regular_prefix(const WaveTimeline& tl) {
  WaveTimeline out = tl;
  if (out.size() >= 3) {
    const double d0 = out[1].t - out[0].t;
    const double dl = out[out.size() - 1].t - out[out.size() - 2].t;
    if (std::abs(dl - d0) > 1e-9 * d0) out.snapshots.pop_back();
  }
  return out;
}

template <class T, class F>
double max_of(const std::vector<T>& xs, F f) {
  double m = 0.0;
  for (const auto& x : xs) m = std::max(m, f(x));
  return m;
}

double weighted_difference(const QField& a, const QField& b, const RealField& p) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (a.mask(i) || b.mask(i)) continue;
    const double d = a.values[i] - b.values[i];
    num += p[i] * d * d;
    den += p[i];
  }
  return den > 0.0 ? std::sqrt(num / den) : 0.0;
}

void timeline_diagnostic(DiagnosticsReport& rep, const DiagnosticRequest& req, const ScenarioConfig& c,
                         const RunData& data) {
  const double tol = req.tolerance.value_or(default_tolerance(req.name));
  const auto& name = req.name;
  if (name == "equivariance") {
    if (!data.ensemble) return;
    const auto st = equivariance_statistic(*data.ensemble, density(data.timeline->snapshots.back().psi),
                                           c.trajectories->bins, c.trajectories->histogram_axis);
    rep.add(name, st.tv_distance, tol);
    return;
  }
  const auto& tl = *data.timeline;
  const auto& U = data.potential;
  if (name == "norm") {
    rep.add(name, max_of(tl.snapshots, [](const Snapshot& s) { return std::abs(norm_squared(s.psi) - 1.0); }), tol);
  } else if (name == "energy") {
    const double e0 = energy(tl[0].psi, U, tl.units);
    rep.add(name, max_of(tl.snapshots, [&](const Snapshot& s) {
              return std::abs(energy(s.psi, U, tl.units) - e0) / std::max(1.0, std::abs(e0));
            }),
            tol);
  } else if (name == "continuity") {
    rep.add(name, max_of(continuity_residual(regular_prefix(tl)), [](const TimeNorm& n) { return n.norm; }), tol);
  } else if (name == "madelung") {
    rep.add(name, max_of(madelung_residuals(regular_prefix(tl), U),
                         [](const MadelungNorms& n) { return std::max(n.amplitude, n.phase); }),
            tol);
  } else if (name == "quantum-potential") {
    const auto reg = regular_prefix(tl);
    double worst = 0.0;
    for (std::size_t j = 1; j + 1 < reg.size(); ++j) {
      const auto hj = quantum_potential_hj(reg, j, U);
      const auto qa = quantum_potential_from_psi(reg[j].psi, reg.units);
      worst = std::max(worst, weighted_difference(qa, hj, density(reg[j].psi)));
    }
    rep.add(name, worst, tol);
  } else if (name == "chetaev") {
    rep.add(name, max_of(tl.snapshots, [&](const Snapshot& s) { return chetaev_residual(s.psi, tl.units).norm; }), tol);
  } else if (name == "uncertainty") {
    double worst = 0.0;
    bool bound_ok = true;
    for (const auto& s : tl.snapshots) {
      const auto u = uncertainty_check(s.psi, tl.units);
      worst = std::max(worst, u.decomposition_error());
      bound_ok = bound_ok && u.product >= u.bound * (1.0 - 1e-9);
    }
    rep.add(name, worst, tol, bound_ok && std::isfinite(worst) && worst <= tol);
  } else if (name == "action") {
    rep.add(name, max_of(tl.snapshots, [&](const Snapshot& s) {
              return perturbation_action(s.psi, tl.units).relative_gap();
            }),
            tol);
  }
}

DiagnosticsReport compute_report(const ScenarioConfig& c, const RunData& data, const std::string& hash) {
  DiagnosticsReport rep(c.name);
  rep.set_provenance("config_hash", hash);
  if (c.trajectories) rep.set_provenance("seed", std::to_string(c.trajectories->seed));
  if (data.spectrum) {
    double worst = 0.0;
    for (std::size_t n = 0; n < data.spectrum->energies.size(); ++n) {
      const auto psi = states::from_real(data.spectrum->states[n]);
      const auto h = apply_hamiltonian(psi, data.potential, c.units);
      RealField r(psi.grid(), 0.0);
      for (std::size_t i = 0; i < r.size(); ++i) r[i] = std::norm(h[i] - data.spectrum->energies[n] * psi[i]);
      worst = std::max(worst, std::sqrt(integrate(r)) / std::max(1.0, std::abs(data.spectrum->energies[n])));
    }
    rep.add("eigen-residual", worst, 1e-8);
  }
  if (data.timeline)
    for (const auto& req : c.diagnostics) timeline_diagnostic(rep, req, c, data);
  if (data.classical) {
    const auto& k = *data.classical;
    const double e0 = hamiltonian(k.spec, k.reference.states.front());
    rep.add("classical-energy", max_of(k.reference.states, [&](const ClassicalState& x) {
              return std::abs(hamiltonian(k.spec, x) - e0) / std::max(1.0, std::abs(e0));
            }),
            1e-6);
    if (!k.invariant.empty()) {
      double worst = 0.0;
      const auto& a = k.variations[0].states;
      const auto& b = k.variations[1].states;
      for (std::size_t j = 0; j < k.invariant.size(); ++j) {
        double scale = std::abs(k.invariant[0]);
        for (std::size_t s = 0; s < a[j].xi.size(); ++s)
          scale = std::max(scale, std::abs(a[j].xi[s] * b[j].eta[s]) + std::abs(a[j].eta[s] * b[j].xi[s]));
        worst = std::max(worst, std::abs(k.invariant[j] - k.invariant[0]) / std::max(scale, 1e-300));
      }
      rep.add("poincare-invariant", worst, 1e-8);
    }
    if (k.lyapunov) rep.add("lyapunov-max", k.lyapunov->lambda_max, kInf, true);
    rep.add("characteristic-max", max_of(k.verdict.exponents, [](double e) { return std::abs(e); }), kInf, true);
  }
  return rep;
}

DiagnosticsReport report_for(RunMode mode, const ScenarioConfig& c, const RunData& data, const std::string& hash) {
  if (mode != RunMode::Trajectories) return compute_report(c, data, hash);
  DiagnosticsReport rep(c.name);
  rep.set_provenance("config_hash", hash);
  rep.set_provenance("seed", std::to_string(c.trajectories->seed));
  for (const auto& req : c.diagnostics)
    if (req.name == "equivariance") timeline_diagnostic(rep, req, c, data);
  return rep;
}

std::string summary_text(const DiagnosticsReport& rep, const RunData& data) {
  std::string out = rep.summary();
  if (data.classical) {
    const auto& v = data.classical->verdict;
    out += std::string("characteristic verdict: ") + (v.stable ? "stable" : "unstable") + " (tolerance " +
           csv::number(v.tolerance) + ", gram determinant " + csv::number(v.gram_determinant) + ")\n";
    if (data.classical->lyapunov) out += "lambda_max: " + csv::number(data.classical->lyapunov->lambda_max) + "\n";
  }
  if (data.ensemble) {
    for (const auto& w : data.ensemble->warnings) out += "warning: " + w + "\n";
  }
  return out;
}

/// Exclusive ownership of an output directory for the lifetime of a run.
class DirectoryLock {
 public:
  explicit DirectoryLock(const fs::path& dir) : path_(dir / ".lock") {
    file_ = std::fopen(path_.c_str(), "wx");
    if (!file_) throw std::runtime_error("output directory " + dir.string() + " is locked by another run");
  }
  ~DirectoryLock() {
    std::fclose(file_);
    std::error_code ec;
    fs::remove(path_, ec);
  }
  DirectoryLock(const DirectoryLock&) = delete;
  DirectoryLock& operator=(const DirectoryLock&) = delete;

 private:
  fs::path path_;
  std::FILE* file_ = nullptr;
};

void clear_snapshots(const fs::path& dir) {
  static const std::regex pat(R"(psi_\d+\.qhdf)");
  for (const auto& e : fs::directory_iterator(dir))
    if (std::regex_match(e.path().filename().string(), pat)) fs::remove(e.path());
}

class ArtifactWriter {
 public:
  ArtifactWriter(fs::path dir, std::vector<std::string>& files) : dir_(std::move(dir)), files_(files) {}
  void text(const std::string& name, const std::string& content) {
    csv::write_file(dir_ / name, content);
    files_.push_back(name);
  }
  template <class F>
  void binary(const std::string& name, const F& field) {
    write_qhdf(dir_ / name, field);
    files_.push_back(name);
  }

 private:
  fs::path dir_;
  std::vector<std::string>& files_;
};

}  // namespace

std::string to_string(RunMode m) {
  switch (m) {
    case RunMode::Run: return "run";
    case RunMode::Spectrum: return "spectrum";
    case RunMode::Trajectories: return "trajectories";
    case RunMode::Classical: return "classical";
  }
  return "run";
}

std::string RunManifest::to_json() const {
  nlohmann::ordered_json j;
  j["scenario"] = scenario;
  j["mode"] = mode;
  j["config_hash"] = config_hash;
  j["files"] = files;
  j["wall_clock_seconds"] = wall_clock_seconds;
  j["versions"] = versions;
  j["pass"] = pass;
  j["exit_code"] = exit_code;
  if (!error.empty()) j["error"] = error;
  return j.dump(2) + "\n";
}

void override_seed(ScenarioConfig& config, std::uint64_t seed) {
  if (config.trajectories) config.trajectories->seed = seed;
  if (config.classical && config.classical->lyapunov) config.classical->lyapunov->seed = seed;
}

fs::path default_output_directory(const ScenarioConfig& config) {
  if (!config.output_directory.empty()) {
    fs::path p = config.output_directory;
    return p.is_relative() && !config.base_dir.empty() ? config.base_dir / p : p;
  }
  return fs::path("runs") / (config.name + "-" + config_hash(config));
}

RunManifest run_scenario(const ScenarioConfig& config, const RunOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  RunManifest m;
  m.scenario = config.name;
  m.mode = to_string(options.mode);
  m.config_hash = config_hash(config);
  m.versions = versions();
  m.directory = options.out.empty() ? default_output_directory(config) : options.out;
  const auto log = [&](const std::string& s) {
    if (options.quiet) return;
    const double el = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    char stamp[32];
    std::snprintf(stamp, sizeof stamp, "%8.2fs", el);
    std::cerr << "[" << config.name << " " << stamp << "] " << s << "\n";
  };

  try {
    fs::create_directories(m.directory);
  } catch (const std::exception& e) {
    m.error = std::string("cannot create output directory: ") + e.what();
    return m;
  }
  std::optional<DirectoryLock> lock;
  try {
    lock.emplace(m.directory);
  } catch (const std::exception& e) {
    m.error = e.what();
    return m;
  }

  ArtifactWriter out(m.directory, m.files);
  std::string stage = "setup";
  try {
    clear_snapshots(m.directory);
    out.text("config.yaml", canonical_yaml(config));
    RunData data;
    const auto mode = options.mode;

    if (mode == RunMode::Spectrum && !config.grid) throw PreconditionError("spectrum needs a grid block");
    if (mode == RunMode::Trajectories && !config.trajectories)
      throw PreconditionError("trajectories needs a trajectories block");
    if (mode == RunMode::Classical && !config.classical) throw PreconditionError("classical needs a classical block");

    const bool grid_work =
        config.grid && (mode == RunMode::Spectrum || (mode != RunMode::Classical && (config.evolution || config.spectrum || config.initial_state)));
    if (grid_work) {
      stage = "potential";
      const auto grid = config.make_grid();
      data.potential = make_potential(config, grid);
      out.binary("potential.qhdf", data.potential);
    }
    if (config.grid && (mode == RunMode::Spectrum || (mode == RunMode::Run && config.spectrum))) {
      stage = "spectrum";
      log("solving eigenpairs");
      const std::size_t n = config.spectrum ? config.spectrum->states : SpectrumConfig{}.states;
      data.spectrum = solve_eigenpairs(data.potential, n, config.units);
      out.text("spectrum.csv", csv::spectrum(*data.spectrum));
    }
    if (config.evolution && (mode == RunMode::Run || mode == RunMode::Trajectories)) {
      stage = "evolve";
      log("evolving");
      const auto psi0 = make_initial(config, data.potential.grid(), data.potential);
      EvolutionConfig ec = *config.evolution;
      ec.threads = options.threads;
      data.timeline = evolve(psi0, data.potential, ec, config.units);
      stage = "snapshots";
      for (const auto& s : data.timeline->snapshots) out.binary(snapshot_name(s.step), s.psi);
    } else if (config.initial_state && config.grid && mode == RunMode::Run) {
      stage = "initial state";
      WaveTimeline tl;
      tl.grid = data.potential.grid();
      tl.units = config.units;
      tl.snapshots.push_back({0, 0.0, make_initial(config, tl.grid, data.potential)});
      out.binary(snapshot_name(0), tl.snapshots[0].psi);
      data.timeline = std::move(tl);
    }
    if (config.trajectories && data.timeline && wants(mode, RunMode::Trajectories)) {
      stage = "trajectories";
      log("integrating trajectories");
      const auto& t = *config.trajectories;
      const auto start_positions = sample_initial_positions(density(data.timeline->snapshots[0].psi), t.count, t.seed);
      TrajectoryOptions to;
      to.substeps = t.substeps;
      to.interpolation = t.interpolation;
      to.threads = options.threads;
      to.seed = t.seed;
      data.ensemble = integrate_trajectories(*data.timeline, start_positions, to);
      for (const auto& w : data.ensemble->warnings) log("warning: " + w);
      out.text("trajectories.csv", csv::trajectories(*data.ensemble, t.write_particles));
      out.text("final_positions.csv", csv::final_positions(*data.ensemble));
      const auto st = equivariance_statistic(*data.ensemble, density(data.timeline->snapshots.back().psi), t.bins,
                                             t.histogram_axis);
      out.text("histogram.csv", csv::histogram(st));
    }
    if (config.classical && wants(mode, RunMode::Classical)) {
      stage = "classical";
      log("integrating classical flow");
      data.classical = run_classical(config);
      out.text("classical.csv", csv::classical(data.classical->reference, data.classical->spec));
      if (!data.classical->variations.empty())
        out.text("variational.csv", csv::variational(data.classical->variations[0], data.classical->invariant));
      if (data.classical->lyapunov) out.text("lyapunov.csv", csv::lyapunov(*data.classical->lyapunov));
      out.text("characteristic.csv", csv::characteristic(data.classical->verdict));
    }
    stage = "diagnostics";
    log("computing diagnostics");
    const auto rep = report_for(mode, config, data, m.config_hash);
    out.text("diagnostics.csv", rep.to_csv());
    out.text("summary.txt", summary_text(rep, data));
    m.pass = rep.all_pass();
    m.exit_code = m.pass ? exit_code::kPass : exit_code::kDiagnosticsFailed;
    if (!options.quiet) std::cerr << rep.summary();
  } catch (const NumericalError& e) {
    m.error = stage + ": numerical error: " + e.what();
  } catch (const PreconditionError& e) {
    m.error = stage + ": precondition violated: " + e.what();
  } catch (const std::exception& e) {
    m.error = stage + ": " + e.what();
  }
  if (!m.error.empty()) {
    m.pass = false;
    m.exit_code = exit_code::kRuntimeError;
    log(m.error);
  }
  m.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  m.files.push_back("manifest.json");
  try {
    csv::write_file(m.directory / "manifest.json", m.to_json());
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    m.exit_code = exit_code::kRuntimeError;
  }
  return m;
}

DiagnoseResult diagnose(const fs::path& run_dir) {
  DiagnoseResult res;
  const auto manifest = nlohmann::json::parse(csv::read_file(run_dir / "manifest.json"));
  const std::string mode = manifest.at("mode").get<std::string>();
  if (manifest.contains("error")) throw PreconditionError("run failed, nothing to diagnose: " + manifest["error"].get<std::string>());
  std::set<std::string> files;
  for (const auto& f : manifest.at("files")) files.insert(f.get<std::string>());

  auto config = load_config(run_dir / "config.yaml");
  const auto hash = config_hash(config);
  if (hash != manifest.at("config_hash").get<std::string>())
    throw PreconditionError("config.yaml does not match the manifest hash");

  RunData data;
  if (files.count("potential.qhdf")) {
    const auto grid = config.make_grid();
    data.potential = real_field_from_dump(read_qhdf(run_dir / "potential.qhdf"), grid.boundary());
  }
  if (files.count("spectrum.csv")) {
    const std::size_t n = config.spectrum ? config.spectrum->states : SpectrumConfig{}.states;
    data.spectrum = solve_eigenpairs(data.potential, n, config.units);
  }
  std::vector<std::pair<std::size_t, std::string>> snaps;
  static const std::regex pat(R"(psi_(\d+)\.qhdf)");
  for (const auto& f : files) {
    std::smatch mt;
    if (std::regex_match(f, mt, pat)) snaps.emplace_back(std::stoul(mt[1].str()), f);
  }
  std::sort(snaps.begin(), snaps.end());
  if (!snaps.empty()) {
    const auto grid = config.make_grid();
    WaveTimeline tl;
    tl.grid = grid;
    tl.units = config.units;
    if (config.evolution) {
      tl.dt = config.evolution->dt;
      tl.stride = config.evolution->snapshot_stride;
    }
    for (const auto& [step, f] : snaps)
      tl.snapshots.push_back({step, static_cast<double>(step) * tl.dt,
                              complex_field_from_dump(read_qhdf(run_dir / f), grid.boundary())});
    data.timeline = std::move(tl);
  }
  if (files.count("final_positions.csv") && data.timeline)
    data.ensemble = csv::read_final_positions(run_dir / "final_positions.csv", data.timeline->snapshots.back().t,
                                              config.grid->boundary);
  if (files.count("classical.csv")) data.classical = run_classical(config);

  res.report = report_for(mode == "trajectories" ? RunMode::Trajectories : RunMode::Run, config, data, hash);

  const auto stored = csv::read_diagnostics(run_dir / "diagnostics.csv");
  const auto& fresh = res.report.entries();
  if (stored.size() != fresh.size()) res.mismatches.push_back("entry count differs");
  for (std::size_t i = 0; i < std::min(stored.size(), fresh.size()); ++i) {
    const auto& a = stored[i];
    const auto& b = fresh[i];
    const bool same_value = (std::isnan(a.value) && std::isnan(b.value)) || a.value == b.value ||
                            std::abs(a.value - b.value) <= 1e-12 * std::max(std::abs(a.value), std::abs(b.value));
    if (a.name != b.name || !same_value || a.pass != b.pass)
      res.mismatches.push_back(a.name + ": stored " + csv::number(a.value) + ", recomputed " + csv::number(b.value));
  }
  if (!res.mismatches.empty())
    res.exit_code = exit_code::kDiagnosticsFailed;
  else
    res.exit_code = res.report.all_pass() ? exit_code::kPass : exit_code::kDiagnosticsFailed;
  return res;
}

}  // namespace qhd
