#include "qhd/config.hpp"

#include "qhd/qhdf.hpp"
#include "qhd/rng.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace qhd {
namespace {

const std::vector<std::string> kTopKeys = {"name",       "units",        "grid",      "potential",
                                           "initial_state", "evolution", "trajectories", "spectrum",
                                           "classical",  "diagnostics",  "output"};

const std::vector<std::string> kPotentialKinds = {"free",           "harmonic",    "inverted-harmonic", "box",
                                                  "gaussian-barrier", "double-slit", "tabulated"};

std::size_t edit_distance(const std::string& a, const std::string& b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j)
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

std::string fmt(double x) {
  if (std::isinf(x)) return x > 0 ? ".inf" : "-.inf";
  if (std::isnan(x)) return ".nan";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  std::string s(buf, r.ptr);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

/// Collects problems while walking the YAML tree.
class Reader {
 public:
  std::vector<std::string> problems;

  void fail(const std::string& path, const std::string& msg) { problems.push_back(path + ": " + msg); }

  void keys(const YAML::Node& node, const std::string& path, const std::vector<std::string>& allowed) {
    if (!node.IsMap()) return;
    for (const auto& kv : node) {
      const auto key = kv.first.as<std::string>();
      if (std::find(allowed.begin(), allowed.end(), key) != allowed.end()) continue;
      std::string msg = "unknown key '" + key + "'";
      const auto near = nearest_key(key, allowed);
      if (!near.empty()) msg += " (did you mean '" + near + "'?)";
      fail(path, msg);
    }
  }

  bool map(const YAML::Node& node, const std::string& path) {
    if (node.IsMap()) return true;
    fail(path, "expected a mapping");
    return false;
  }

  template <class T>
  std::optional<T> scalar(const YAML::Node& parent, const std::string& key, const std::string& path) {
    const auto node = parent[key];
    if (!node) return std::nullopt;
    try {
      if (!node.IsScalar()) throw YAML::Exception(node.Mark(), "not a scalar");
      return node.as<T>();
    } catch (const YAML::Exception&) {
      fail(path + "." + key, std::string("expected ") + type_name<T>());
      return std::nullopt;
    }
  }

  template <class T>
  T value(const YAML::Node& parent, const std::string& key, const std::string& path, T fallback) {
    return scalar<T>(parent, key, path).value_or(fallback);
  }

  template <class T>
  std::optional<T> required(const YAML::Node& parent, const std::string& key, const std::string& path) {
    if (!parent[key]) {
      fail(path, "missing required key '" + key + "'");
      return std::nullopt;
    }
    return scalar<T>(parent, key, path);
  }

  /// A number or a list of numbers.
  std::optional<std::vector<double>> vec(const YAML::Node& parent, const std::string& key, const std::string& path) {
    const auto node = parent[key];
    if (!node) return std::nullopt;
    try {
      if (node.IsScalar()) return std::vector<double>{node.as<double>()};
      if (node.IsSequence()) return node.as<std::vector<double>>();
    } catch (const YAML::Exception&) {
    }
    fail(path + "." + key, "expected a number or a list of numbers");
    return std::nullopt;
  }

  double positive(double v, const std::string& path) {
    if (!(std::isfinite(v) && v > 0.0)) fail(path, "must be finite and > 0");
    return v;
  }

  double finite(double v, const std::string& path) {
    if (!std::isfinite(v)) fail(path, "must be finite");
    return v;
  }

 private:
  template <class T>
  static const char* type_name() {
    if constexpr (std::is_same_v<T, std::string>) return "a string";
    if constexpr (std::is_same_v<T, bool>) return "a boolean";
    if constexpr (std::is_integral_v<T>) return "a non-negative integer";
    return "a number";
  }
};

std::vector<double> broadcast(const std::optional<std::vector<double>>& v, std::size_t nd, double fallback, Reader& r,
                              const std::string& path) {
  if (!v) return std::vector<double>(nd, fallback);
  if (v->size() == 1 && nd > 1) return std::vector<double>(nd, v->front());
  if (v->size() != nd) r.fail(path, "expected " + std::to_string(nd) + " component(s)");
  return *v;
}

std::optional<GridConfig> read_grid(const YAML::Node& n, Reader& r) {
  const std::string path = "grid";
  if (!r.map(n, path)) return std::nullopt;
  r.keys(n, path, {"bounds", "points", "boundary"});
  GridConfig g;
  try {
    g.boundary = boundary_from_string(r.value<std::string>(n, "boundary", path, "periodic"));
  } catch (const std::exception& e) {
    r.fail(path + ".boundary", e.what());
  }
  const auto b = n["bounds"];
  if (!b) {
    r.fail(path, "missing required key 'bounds'");
  } else {
    try {
      if (b.IsSequence() && b.size() > 0 && b[0].IsScalar()) {
        const auto v = b.as<std::vector<double>>();
        if (v.size() != 2) throw YAML::Exception(b.Mark(), "bad interval");
        g.bounds.push_back({v[0], v[1]});
      } else if (b.IsSequence()) {
        for (const auto& iv : b) {
          const auto v = iv.as<std::vector<double>>();
          if (v.size() != 2) throw YAML::Exception(iv.Mark(), "bad interval");
          g.bounds.push_back({v[0], v[1]});
        }
      } else {
        throw YAML::Exception(b.Mark(), "bad bounds");
      }
    } catch (const YAML::Exception&) {
      r.fail(path + ".bounds", "expected [lower, upper] or a list of [lower, upper] per axis");
      g.bounds.clear();
    }
  }
  const auto p = n["points"];
  if (!p) {
    r.fail(path, "missing required key 'points'");
  } else {
    try {
      if (p.IsScalar())
        g.points.push_back(p.as<std::size_t>());
      else
        g.points = p.as<std::vector<std::size_t>>();
    } catch (const YAML::Exception&) {
      r.fail(path + ".points", "expected an integer or a list of integers per axis");
    }
  }
  if (g.points.size() == 1 && g.bounds.size() == 2) g.points.push_back(g.points[0]);
  if (!g.bounds.empty() && !g.points.empty()) {
    if (g.bounds.size() != g.points.size()) {
      r.fail(path, "bounds and points describe a different number of axes");
      return std::nullopt;
    }
    if (g.bounds.size() > 2) {
      r.fail(path, "at most 2 axes are supported");
      return std::nullopt;
    }
    try {
      (void)Grid::make(g.bounds, g.points, g.boundary);
    } catch (const std::exception& e) {
      r.fail(path, e.what());
      return std::nullopt;
    }
    return g;
  }
  return std::nullopt;
}

PotentialConfig read_potential(const YAML::Node& n, Reader& r, std::size_t nd) {
  const std::string path = "potential";
  PotentialConfig out;
  if (!n) return out;
  if (!r.map(n, path)) return out;
  const auto kind = r.value<std::string>(n, "kind", path, "free");
  if (kind == "free") {
    r.keys(n, path, {"kind"});
  } else if (kind == "harmonic") {
    r.keys(n, path, {"kind", "omega"});
    out.spec = potential::Harmonic{r.value<double>(n, "omega", path, 1.0)};
  } else if (kind == "inverted-harmonic") {
    r.keys(n, path, {"kind", "kappa"});
    out.spec = potential::InvertedHarmonic{r.value<double>(n, "kappa", path, 1.0)};
  } else if (kind == "box") {
    r.keys(n, path, {"kind"});
    out.spec = potential::Box{};
  } else if (kind == "gaussian-barrier") {
    r.keys(n, path, {"kind", "height", "center", "width"});
    potential::GaussianBarrier b;
    b.height = r.value<double>(n, "height", path, 1.0);
    b.width = r.value<double>(n, "width", path, 1.0);
    b.center = broadcast(r.vec(n, "center", path), nd == 0 ? 1 : nd, 0.0, r, path + ".center");
    out.spec = b;
  } else if (kind == "double-slit") {
    r.keys(n, path, {"kind", "height", "wall_position", "slit_centers", "slit_width", "wall_cells"});
    potential::DoubleSlit d;
    d.height = r.value<double>(n, "height", path, 1.0);
    d.wall_position = r.value<double>(n, "wall_position", path, 0.0);
    d.slit_width = r.value<double>(n, "slit_width", path, 1.0);
    d.wall_cells = r.value<int>(n, "wall_cells", path, 1);
    if (auto c = r.vec(n, "slit_centers", path)) d.slit_centers = *c;
    else r.fail(path, "missing required key 'slit_centers'");
    if (nd != 0 && nd != 2) r.fail(path, "double-slit requires a 2D grid");
    out.spec = d;
  } else if (kind == "tabulated") {
    r.keys(n, path, {"kind", "file"});
    if (auto f = r.required<std::string>(n, "file", path)) out.file = *f;
    out.spec = potential::Tabulated{};
    return out;
  } else {
    std::string msg = "unknown potential kind '" + kind + "'";
    const auto near = nearest_key(kind, kPotentialKinds);
    if (!near.empty()) msg += " (did you mean '" + near + "'?)";
    r.fail(path + ".kind", msg);
    return out;
  }
  try {
    validate(out.spec);
  } catch (const std::exception& e) {
    r.fail(path, e.what());
  }
  return out;
}

StateComponent read_component(const YAML::Node& n, Reader& r, const std::string& path, std::size_t nd, bool weighted) {
  StateComponent c;
  if (!r.map(n, path)) return c;
  c.kind = r.value<std::string>(n, "kind", path, "gaussian");
  if (c.kind == "plane_wave") c.kind = "plane-wave";
  std::vector<std::string> allowed{"kind"};
  if (weighted) {
    allowed.push_back("weight");
    allowed.push_back("phase");
    c.weight = r.finite(r.value<double>(n, "weight", path, 1.0), path + ".weight");
    c.phase = r.finite(r.value<double>(n, "phase", path, 0.0), path + ".phase");
  }
  const std::size_t d = nd == 0 ? 1 : nd;
  if (c.kind == "gaussian") {
    allowed.insert(allowed.end(), {"center", "sigma", "momentum"});
    c.center = broadcast(r.vec(n, "center", path), d, 0.0, r, path + ".center");
    c.sigma = broadcast(r.vec(n, "sigma", path), d, 1.0, r, path + ".sigma");
    c.momentum = broadcast(r.vec(n, "momentum", path), d, 0.0, r, path + ".momentum");
    for (double s : c.sigma) r.positive(s, path + ".sigma");
  } else if (c.kind == "eigenstate") {
    allowed.push_back("n");
    c.n = r.value<std::size_t>(n, "n", path, 0);
  } else if (c.kind == "plane-wave") {
    allowed.push_back("momentum");
    c.momentum = broadcast(r.vec(n, "momentum", path), d, 0.0, r, path + ".momentum");
  } else {
    r.fail(path + ".kind", "unknown state kind '" + c.kind + "' (expected gaussian, eigenstate or plane-wave)");
    return c;
  }
  r.keys(n, path, allowed);
  return c;
}

InitialStateConfig read_initial(const YAML::Node& n, Reader& r, std::size_t nd) {
  const std::string path = "initial_state";
  InitialStateConfig out;
  if (!r.map(n, path)) return out;
  out.kind = r.value<std::string>(n, "kind", path, "gaussian");
  if (out.kind == "superposition") {
    r.keys(n, path, {"kind", "components"});
    const auto list = n["components"];
    if (!list || !list.IsSequence() || list.size() == 0) {
      r.fail(path, "superposition needs a non-empty 'components' list");
      return out;
    }
    for (std::size_t i = 0; i < list.size(); ++i)
      out.components.push_back(read_component(list[i], r, path + ".components[" + std::to_string(i) + "]", nd, true));
    return out;
  }
  out.state = read_component(n, r, path, nd, false);
  return out;
}

EvolutionConfig read_evolution(const YAML::Node& n, Reader& r, std::optional<Boundary> boundary) {
  const std::string path = "evolution";
  EvolutionConfig e;
  if (!r.map(n, path)) return e;
  r.keys(n, path, {"method", "dt", "steps", "snapshot_stride"});
  e.method = boundary == Boundary::DirichletZero ? Method::CrankNicolson : Method::SplitSpectral;
  if (auto m = r.scalar<std::string>(n, "method", path)) {
    try {
      e.method = method_from_string(*m);
    } catch (const std::exception& ex) {
      r.fail(path + ".method", ex.what());
    }
  }
  e.dt = r.positive(r.value<double>(n, "dt", path, 0.01), path + ".dt");
  e.steps = r.value<std::size_t>(n, "steps", path, 100);
  e.snapshot_stride = r.value<std::size_t>(n, "snapshot_stride", path, 10);
  if (e.steps < 1) r.fail(path + ".steps", "must be >= 1");
  if (e.snapshot_stride < 1) r.fail(path + ".snapshot_stride", "must be >= 1");
  return e;
}

TrajectoryConfig read_trajectories(const YAML::Node& n, Reader& r) {
  const std::string path = "trajectories";
  TrajectoryConfig t;
  if (!r.map(n, path)) return t;
  r.keys(n, path, {"count", "seed", "substeps", "interpolation", "write_particles", "bins", "histogram_axis"});
  if (auto c = r.required<std::size_t>(n, "count", path)) t.count = *c;
  if (!n["seed"])
    r.fail(path, "seed required");
  else if (auto s = r.scalar<std::uint64_t>(n, "seed", path))
    t.seed = *s;
  t.substeps = r.value<std::size_t>(n, "substeps", path, 4);
  t.write_particles = r.value<std::size_t>(n, "write_particles", path, 100);
  t.bins = r.value<std::size_t>(n, "bins", path, 50);
  t.histogram_axis = r.value<int>(n, "histogram_axis", path, 0);
  try {
    t.interpolation = interpolation_from_string(r.value<std::string>(n, "interpolation", path, "linear"));
  } catch (const std::exception& e) {
    r.fail(path + ".interpolation", e.what());
  }
  if (t.count < 1) r.fail(path + ".count", "must be >= 1");
  if (t.substeps < 1) r.fail(path + ".substeps", "must be >= 1");
  if (t.bins < 1) r.fail(path + ".bins", "must be >= 1");
  return t;
}

ClassicalConfig read_classical(const YAML::Node& n, Reader& r) {
  const std::string path = "classical";
  ClassicalConfig c;
  if (!r.map(n, path)) return c;
  r.keys(n, path, {"q", "p", "dt", "steps", "variations", "lyapunov", "stability_tolerance"});
  if (auto q = r.vec(n, "q", path)) c.q = *q;
  else r.fail(path, "missing required key 'q'");
  if (auto p = r.vec(n, "p", path)) c.p = *p;
  else r.fail(path, "missing required key 'p'");
  for (double v : c.q) r.finite(v, path + ".q");
  for (double v : c.p) r.finite(v, path + ".p");
  if (c.q.size() != c.p.size()) r.fail(path, "q and p must have the same dimension");
  if (c.q.size() > 2) r.fail(path + ".q", "at most 2 degrees of freedom are supported");
  c.dt = r.positive(r.value<double>(n, "dt", path, 0.01), path + ".dt");
  c.steps = r.value<std::size_t>(n, "steps", path, 1000);
  c.stability_tolerance = r.positive(r.value<double>(n, "stability_tolerance", path, 0.02), path + ".stability_tolerance");
  const std::size_t d = c.q.size();
  if (const auto v = n["variations"]) {
    try {
      c.variations = v.as<std::vector<std::vector<double>>>();
    } catch (const YAML::Exception&) {
      r.fail(path + ".variations", "expected a list of [xi..., eta...] vectors");
    }
    for (const auto& row : c.variations)
      if (row.size() != 2 * d) r.fail(path + ".variations", "each variation needs " + std::to_string(2 * d) + " entries");
  } else {
    for (std::size_t i = 0; i < 2 * d; ++i) {
      std::vector<double> e(2 * d, 0.0);
      e[i] = 1.0;
      c.variations.push_back(e);
    }
  }
  if (const auto l = n["lyapunov"]) {
    const std::string lp = path + ".lyapunov";
    LyapunovConfig ly;
    if (r.map(l, lp)) {
      r.keys(l, lp, {"horizon", "renorm_interval", "offset", "seed"});
      ly.horizon = r.positive(r.value<double>(l, "horizon", lp, 200.0), lp + ".horizon");
      ly.renorm_interval = r.positive(r.value<double>(l, "renorm_interval", lp, 1.0), lp + ".renorm_interval");
      ly.offset = r.positive(r.value<double>(l, "offset", lp, 1e-8), lp + ".offset");
      ly.seed = r.value<std::uint64_t>(l, "seed", lp, 0);
      if (!(ly.horizon >= 10 * ly.renorm_interval)) r.fail(lp, "horizon must be at least 10 renormalization intervals");
    }
    c.lyapunov = ly;
  }
  return c;
}

std::vector<DiagnosticRequest> read_diagnostics(const YAML::Node& n, Reader& r) {
  std::vector<DiagnosticRequest> out;
  if (!n) return out;
  if (!n.IsSequence()) {
    r.fail("diagnostics", "expected a list of diagnostic names");
    return out;
  }
  std::set<std::string> seen;
  for (std::size_t i = 0; i < n.size(); ++i) {
    const std::string path = "diagnostics[" + std::to_string(i) + "]";
    DiagnosticRequest d;
    try {
      if (n[i].IsScalar()) {
        d.name = n[i].as<std::string>();
      } else if (n[i].IsMap() && n[i].size() == 1) {
        const auto kv = *n[i].begin();
        d.name = kv.first.as<std::string>();
        d.tolerance = kv.second.as<double>();
        if (!(*d.tolerance >= 0.0)) r.fail(path, "tolerance must be >= 0");
      } else {
        throw YAML::Exception(n[i].Mark(), "bad entry");
      }
    } catch (const YAML::Exception&) {
      r.fail(path, "expected a name or a single 'name: tolerance' pair");
      continue;
    }
    const auto& names = diagnostic_names();
    if (std::find(names.begin(), names.end(), d.name) == names.end()) {
      std::string msg = "unknown diagnostic '" + d.name + "'";
      const auto near = nearest_key(d.name, names);
      if (!near.empty()) msg += " (did you mean '" + near + "'?)";
      r.fail(path, msg);
      continue;
    }
    if (!seen.insert(d.name).second) {
      r.fail(path, "diagnostic '" + d.name + "' listed twice");
      continue;
    }
    out.push_back(d);
  }
  // report order is fixed, independent of listing order
  std::vector<DiagnosticRequest> ordered;
  for (const auto& name : diagnostic_names())
    for (const auto& d : out)
      if (d.name == name) ordered.push_back(d);
  return ordered;
}

void cross_check(ScenarioConfig& c, Reader& r) {
  const std::size_t nd = c.grid ? c.grid->bounds.size() : 0;
  if ((c.initial_state || c.evolution || c.spectrum) && !c.grid) r.fail("grid", "missing required block 'grid'");
  if (std::holds_alternative<potential::Box>(c.potential.spec) && c.grid && c.grid->boundary != Boundary::DirichletZero)
    r.fail("potential", "box potential needs a dirichlet-zero grid");
  if (c.evolution && !c.initial_state) r.fail("initial_state", "missing required block 'initial_state' (needed by evolution)");
  if (c.trajectories && !c.evolution) r.fail("evolution", "missing required block 'evolution' (needed by trajectories)");
  if (c.spectrum && nd == 2) r.fail("spectrum", "the eigen-solver supports 1D grids only");
  if (c.spectrum && c.grid && c.grid->boundary == Boundary::Periodic)
    r.fail("spectrum", "the eigen-solver requires a dirichlet-zero grid");
  if (c.initial_state) {
    std::vector<const StateComponent*> parts;
    if (c.initial_state->kind == "superposition")
      for (const auto& s : c.initial_state->components) parts.push_back(&s);
    else
      parts.push_back(&c.initial_state->state);
    for (const auto* s : parts)
      if (s->kind == "eigenstate" && c.grid && (nd != 1 || c.grid->boundary != Boundary::DirichletZero))
        r.fail("initial_state", "eigenstate initial states require a 1D dirichlet-zero grid");
  }
  if (c.classical) {
    if (!has_analytic_derivatives(c.potential.spec))
      r.fail("classical", kind_name(c.potential.spec) + " potential has no analytic second derivatives");
    if (nd != 0 && c.classical->q.size() != nd) r.fail("classical.q", "dimension must match the grid");
    if (const auto* b = std::get_if<potential::GaussianBarrier>(&c.potential.spec))
      if (b->center.size() != c.classical->q.size() && !c.grid)
        c.potential.spec = potential::GaussianBarrier{b->height, std::vector<double>(c.classical->q.size(), b->center.front()), b->width};
  }
  for (const auto& d : c.diagnostics) {
    const bool needs_timeline = d.name != "uncertainty" && d.name != "action" && d.name != "chetaev";
    if (!c.evolution && (needs_timeline || !c.initial_state))
      r.fail("diagnostics", "'" + d.name + "' needs an evolution block");
    if (d.name == "uncertainty" && nd == 2) r.fail("diagnostics", "'uncertainty' is defined for 1D grids only");
    if (d.name == "equivariance" && !c.trajectories) r.fail("diagnostics", "'equivariance' needs a trajectories block");
  }
  if (c.trajectories && (c.trajectories->histogram_axis < 0 || c.trajectories->histogram_axis >= static_cast<int>(std::max<std::size_t>(nd, 1)))) {
    r.fail("trajectories.histogram_axis", "must name an axis of the grid");
  }
}

}  // namespace

Grid ScenarioConfig::make_grid() const {
  if (!grid) throw PreconditionError("scenario has no grid");
  return Grid::make(grid->bounds, grid->points, grid->boundary);
}

const std::vector<std::string>& diagnostic_names() {
  static const std::vector<std::string> names = {"norm",   "energy",      "continuity",  "madelung",    "quantum-potential",
                                                 "chetaev", "uncertainty", "action",      "equivariance"};
  return names;
}

double default_tolerance(const std::string& d) {
  if (d == "norm") return 1e-8;
  if (d == "energy") return 1e-6;
  if (d == "continuity" || d == "madelung") return 1e-3;
  if (d == "quantum-potential") return 1e-2;
  if (d == "chetaev") return std::numeric_limits<double>::infinity();
  if (d == "uncertainty") return 1e-5;
  if (d == "action") return 1e-3;
  if (d == "equivariance") return 0.03;
  throw PreconditionError("unknown diagnostic '" + d + "'");
}

std::string nearest_key(const std::string& key, const std::vector<std::string>& candidates) {
  std::string best;
  std::size_t best_d = std::string::npos;
  for (const auto& c : candidates) {
    const auto d = edit_distance(key, c);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  const std::size_t limit = std::max<std::size_t>(2, key.size() / 3);
  return best_d <= limit ? best : std::string{};
}

ScenarioConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError({std::string("malformed YAML: ") + e.what()});
  }
  if (!root.IsMap()) throw ConfigError({"top level: expected a mapping"});

  Reader r;
  r.keys(root, "top level", kTopKeys);
  ScenarioConfig c;
  c.base_dir = base_dir;
  if (auto name = r.required<std::string>(root, "name", "top level")) {
    c.name = *name;
    const bool ok = !c.name.empty() && std::all_of(c.name.begin(), c.name.end(), [](char ch) {
      return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-' || ch == '.';
    });
    if (!ok) r.fail("name", "use letters, digits, '_', '-' or '.'");
  }

  double hbar = 1.0, mass = 1.0;
  if (const auto u = root["units"]; u && r.map(u, "units")) {
    r.keys(u, "units", {"hbar", "mass"});
    hbar = r.positive(r.value<double>(u, "hbar", "units", 1.0), "units.hbar");
    mass = r.positive(r.value<double>(u, "mass", "units", 1.0), "units.mass");
  }
  if (std::isfinite(hbar) && hbar > 0 && std::isfinite(mass) && mass > 0) c.units = UnitSystem::make(hbar, mass);

  if (const auto g = root["grid"]) c.grid = read_grid(g, r);
  const std::size_t nd = c.grid ? c.grid->bounds.size() : 0;
  c.potential = read_potential(root["potential"], r, nd);
  if (const auto s = root["initial_state"]) c.initial_state = read_initial(s, r, nd);
  if (const auto e = root["evolution"])
    c.evolution = read_evolution(e, r, c.grid ? std::optional<Boundary>(c.grid->boundary) : std::nullopt);
  if (const auto t = root["trajectories"]) c.trajectories = read_trajectories(t, r);
  if (const auto s = root["spectrum"]; s && r.map(s, "spectrum")) {
    r.keys(s, "spectrum", {"states"});
    c.spectrum = SpectrumConfig{r.value<std::size_t>(s, "states", "spectrum", 4)};
    if (c.spectrum->states < 1) r.fail("spectrum.states", "must be >= 1");
  }
  if (const auto k = root["classical"]) c.classical = read_classical(k, r);
  c.diagnostics = read_diagnostics(root["diagnostics"], r);
  if (const auto o = root["output"]; o && r.map(o, "output")) {
    r.keys(o, "output", {"directory"});
    c.output_directory = r.value<std::string>(o, "directory", "output", "");
  }
  if (r.problems.empty()) cross_check(c, r);
  if (!r.problems.empty()) throw ConfigError(r.problems);
  return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot read config file '" + path.string() + "'"});
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path());
}

namespace {

void emit_vec(YAML::Emitter& e, const std::vector<double>& v) {
  e << YAML::Flow << YAML::BeginSeq;
  for (double x : v) e << fmt(x);
  e << YAML::EndSeq;
}

void emit_component(YAML::Emitter& e, const StateComponent& s, bool weighted) {
  e << YAML::Key << "kind" << YAML::Value << s.kind;
  if (s.kind == "gaussian") {
    e << YAML::Key << "center" << YAML::Value;
    emit_vec(e, s.center);
    e << YAML::Key << "sigma" << YAML::Value;
    emit_vec(e, s.sigma);
    e << YAML::Key << "momentum" << YAML::Value;
    emit_vec(e, s.momentum);
  } else if (s.kind == "eigenstate") {
    e << YAML::Key << "n" << YAML::Value << s.n;
  } else {
    e << YAML::Key << "momentum" << YAML::Value;
    emit_vec(e, s.momentum);
  }
  if (weighted) {
    e << YAML::Key << "weight" << YAML::Value << fmt(s.weight);
    e << YAML::Key << "phase" << YAML::Value << fmt(s.phase);
  }
}

std::string canonical(const ScenarioConfig& c, bool with_output) {
  YAML::Emitter e;
  e << YAML::BeginMap;
  e << YAML::Key << "name" << YAML::Value << c.name;
  e << YAML::Key << "units" << YAML::Value << YAML::BeginMap << YAML::Key << "hbar" << YAML::Value << fmt(c.units.hbar())
    << YAML::Key << "mass" << YAML::Value << fmt(c.units.mass()) << YAML::EndMap;
  if (c.grid) {
    e << YAML::Key << "grid" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "bounds" << YAML::Value << YAML::BeginSeq;
    for (const auto& b : c.grid->bounds) emit_vec(e, {b.lower, b.upper});
    e << YAML::EndSeq;
    e << YAML::Key << "points" << YAML::Value << YAML::Flow << c.grid->points;
    e << YAML::Key << "boundary" << YAML::Value << to_string(c.grid->boundary);
    e << YAML::EndMap;
  }
  e << YAML::Key << "potential" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "kind" << YAML::Value << kind_name(c.potential.spec);
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, potential::Harmonic>) {
          e << YAML::Key << "omega" << YAML::Value << fmt(p.omega);
        } else if constexpr (std::is_same_v<T, potential::InvertedHarmonic>) {
          e << YAML::Key << "kappa" << YAML::Value << fmt(p.kappa);
        } else if constexpr (std::is_same_v<T, potential::GaussianBarrier>) {
          e << YAML::Key << "height" << YAML::Value << fmt(p.height);
          e << YAML::Key << "center" << YAML::Value;
          emit_vec(e, p.center);
          e << YAML::Key << "width" << YAML::Value << fmt(p.width);
        } else if constexpr (std::is_same_v<T, potential::DoubleSlit>) {
          e << YAML::Key << "height" << YAML::Value << fmt(p.height);
          e << YAML::Key << "wall_position" << YAML::Value << fmt(p.wall_position);
          e << YAML::Key << "slit_centers" << YAML::Value;
          emit_vec(e, p.slit_centers);
          e << YAML::Key << "slit_width" << YAML::Value << fmt(p.slit_width);
          e << YAML::Key << "wall_cells" << YAML::Value << p.wall_cells;
        } else if constexpr (std::is_same_v<T, potential::Tabulated>) {
          e << YAML::Key << "file" << YAML::Value << c.potential.file;
        }
      },
      c.potential.spec);
  e << YAML::EndMap;
  if (c.initial_state) {
    e << YAML::Key << "initial_state" << YAML::Value << YAML::BeginMap;
    if (c.initial_state->kind == "superposition") {
      e << YAML::Key << "kind" << YAML::Value << "superposition";
      e << YAML::Key << "components" << YAML::Value << YAML::BeginSeq;
      for (const auto& s : c.initial_state->components) {
        e << YAML::BeginMap;
        emit_component(e, s, true);
        e << YAML::EndMap;
      }
      e << YAML::EndSeq;
    } else {
      emit_component(e, c.initial_state->state, false);
    }
    e << YAML::EndMap;
  }
  if (c.evolution) {
    e << YAML::Key << "evolution" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "method" << YAML::Value << to_string(c.evolution->method);
    e << YAML::Key << "dt" << YAML::Value << fmt(c.evolution->dt);
    e << YAML::Key << "steps" << YAML::Value << c.evolution->steps;
    e << YAML::Key << "snapshot_stride" << YAML::Value << c.evolution->snapshot_stride;
    e << YAML::EndMap;
  }
  if (c.trajectories) {
    const auto& t = *c.trajectories;
    e << YAML::Key << "trajectories" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "count" << YAML::Value << t.count;
    e << YAML::Key << "seed" << YAML::Value << t.seed;
    e << YAML::Key << "substeps" << YAML::Value << t.substeps;
    e << YAML::Key << "interpolation" << YAML::Value << to_string(t.interpolation);
    e << YAML::Key << "write_particles" << YAML::Value << t.write_particles;
    e << YAML::Key << "bins" << YAML::Value << t.bins;
    e << YAML::Key << "histogram_axis" << YAML::Value << t.histogram_axis;
    e << YAML::EndMap;
  }
  if (c.spectrum) {
    e << YAML::Key << "spectrum" << YAML::Value << YAML::BeginMap << YAML::Key << "states" << YAML::Value
      << c.spectrum->states << YAML::EndMap;
  }
  if (c.classical) {
    const auto& k = *c.classical;
    e << YAML::Key << "classical" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "q" << YAML::Value;
    emit_vec(e, k.q);
    e << YAML::Key << "p" << YAML::Value;
    emit_vec(e, k.p);
    e << YAML::Key << "dt" << YAML::Value << fmt(k.dt);
    e << YAML::Key << "steps" << YAML::Value << k.steps;
    e << YAML::Key << "variations" << YAML::Value << YAML::BeginSeq;
    for (const auto& v : k.variations) emit_vec(e, v);
    e << YAML::EndSeq;
    e << YAML::Key << "stability_tolerance" << YAML::Value << fmt(k.stability_tolerance);
    if (k.lyapunov) {
      e << YAML::Key << "lyapunov" << YAML::Value << YAML::BeginMap;
      e << YAML::Key << "horizon" << YAML::Value << fmt(k.lyapunov->horizon);
      e << YAML::Key << "renorm_interval" << YAML::Value << fmt(k.lyapunov->renorm_interval);
      e << YAML::Key << "offset" << YAML::Value << fmt(k.lyapunov->offset);
      e << YAML::Key << "seed" << YAML::Value << k.lyapunov->seed;
      e << YAML::EndMap;
    }
    e << YAML::EndMap;
  }
  if (!c.diagnostics.empty()) {
    e << YAML::Key << "diagnostics" << YAML::Value << YAML::BeginSeq;
    for (const auto& d : c.diagnostics) {
      e << YAML::Flow << YAML::BeginMap << YAML::Key << d.name << YAML::Value
        << fmt(d.tolerance.value_or(default_tolerance(d.name))) << YAML::EndMap;
    }
    e << YAML::EndSeq;
  }
  if (with_output && !c.output_directory.empty()) {
    e << YAML::Key << "output" << YAML::Value << YAML::BeginMap << YAML::Key << "directory" << YAML::Value
      << c.output_directory << YAML::EndMap;
  }
  e << YAML::EndMap;
  return std::string(e.c_str()) + "\n";
}

}  // namespace

std::string canonical_yaml(const ScenarioConfig& config) { return canonical(config, true); }

std::string config_hash(const ScenarioConfig& config) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(canonical(config, false))));
  return buf;
}

}  // namespace qhd
