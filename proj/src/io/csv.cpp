#include "qhd/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace qhd::csv {
namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc{} || r.ptr != s.data() + s.size()) throw PreconditionError("bad number '" + s + "'");
  return v;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream ss(text);
  std::string line;
  while (std::getline(ss, line))
    if (!line.empty()) out.push_back(line);
  return out;
}

}  // namespace

std::string number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

std::string spectrum(const EigenSolution& sol) {
  std::string out = "n,energy\n";
  for (std::size_t n = 0; n < sol.energies.size(); ++n) out += std::to_string(n) + "," + number(sol.energies[n]) + "\n";
  return out;
}

std::string trajectories(const TrajectoryEnsemble& ens, std::size_t max_particles) {
  const std::size_t np = std::min(max_particles, ens.particles);
  std::string out = ens.ndim == 2 ? "t,particle_id,x,y\n" : "t,particle_id,x\n";
  for (std::size_t j = 0; j < ens.times.size(); ++j)
    for (std::size_t k = 0; k < np; ++k) {
      const auto& q = ens.at(j, k);
      out += number(ens.times[j]) + "," + std::to_string(k) + "," + number(q[0]);
      if (ens.ndim == 2) out += "," + number(q[1]);
      out += "\n";
    }
  return out;
}

std::string final_positions(const TrajectoryEnsemble& ens) {
  std::string out = ens.ndim == 2 ? "particle_id,escaped,x,y\n" : "particle_id,escaped,x\n";
  const std::size_t last = ens.times.size() - 1;
  for (std::size_t k = 0; k < ens.particles; ++k) {
    const auto& q = ens.at(last, k);
    out += std::to_string(k) + "," + (ens.escaped(k) ? "1" : "0") + "," + number(q[0]);
    if (ens.ndim == 2) out += "," + number(q[1]);
    out += "\n";
  }
  return out;
}

std::string histogram(const EquivarianceStats& st) {
  std::string out = "bin_lower,bin_upper,empirical,expected\n";
  for (std::size_t b = 0; b < st.empirical.size(); ++b)
    out += number(st.bin_edges[b]) + "," + number(st.bin_edges[b + 1]) + "," + number(st.empirical[b]) + "," +
           number(st.expected[b]) + "\n";
  return out;
}

std::string classical(const ClassicalTrajectory& traj, const HamiltonianSpec& spec) {
  const std::size_t d = traj.states.empty() ? 0 : traj.states[0].q.size();
  std::string out = "t";
  for (std::size_t a = 0; a < d; ++a) out += ",q" + std::to_string(a);
  for (std::size_t a = 0; a < d; ++a) out += ",p" + std::to_string(a);
  out += ",energy\n";
  for (const auto& x : traj.states) {
    out += number(x.t);
    for (double v : x.q) out += "," + number(v);
    for (double v : x.p) out += "," + number(v);
    out += "," + number(hamiltonian(spec, x)) + "\n";
  }
  return out;
}

std::string variational(const VariationalTrajectory& first, const std::vector<double>& invariant) {
  const std::size_t d = first.states.empty() ? 0 : first.states[0].xi.size();
  std::string out = "t";
  for (std::size_t a = 0; a < d; ++a) out += ",xi" + std::to_string(a);
  for (std::size_t a = 0; a < d; ++a) out += ",eta" + std::to_string(a);
  if (!invariant.empty()) out += ",C";
  out += "\n";
  for (std::size_t j = 0; j < first.states.size(); ++j) {
    out += number(first.times[j]);
    for (double x : first.states[j].xi) out += "," + number(x);
    for (double x : first.states[j].eta) out += "," + number(x);
    if (!invariant.empty()) out += "," + number(invariant[j]);
    out += "\n";
  }
  return out;
}

std::string lyapunov(const LyapunovResult& r) {
  std::string out = "interval,log_growth,lambda_running\n";
  for (const auto& iv : r.intervals)
    out += std::to_string(iv.interval) + "," + number(iv.log_growth) + "," + number(iv.lambda_running) + "\n";
  return out;
}

std::string characteristic(const CharacteristicVerdict& v) {
  std::string out = "solution,exponent,stable\n";
  for (std::size_t s = 0; s < v.exponents.size(); ++s)
    out += std::to_string(s) + "," + number(v.exponents[s]) + "," +
           (std::abs(v.exponents[s]) <= v.tolerance ? "true" : "false") + "\n";
  return out;
}

TrajectoryEnsemble read_final_positions(const std::filesystem::path& path, double t_final, Boundary boundary) {
  const auto rows = lines(read_file(path));
  if (rows.empty()) throw PreconditionError("empty file " + path.string());
  const auto header = split(rows[0]);
  TrajectoryEnsemble ens;
  ens.ndim = header.size() == 4 ? 2 : 1;
  ens.boundary = boundary;
  ens.times = {t_final};
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto cells = split(rows[r]);
    if (cells.size() != header.size()) throw PreconditionError("malformed row in " + path.string());
    Point q{parse_double(cells[2]), ens.ndim == 2 ? parse_double(cells[3]) : 0.0};
    ens.positions.push_back(q);
    ens.valid_samples.push_back(cells[1] == "1" ? 0 : 1);
  }
  ens.particles = ens.positions.size();
  return ens;
}

std::vector<ReportEntry> read_diagnostics(const std::filesystem::path& path) {
  const auto rows = lines(read_file(path));
  std::vector<ReportEntry> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto c = split(rows[r]);
    if (c.size() != 4) throw PreconditionError("malformed row in " + path.string());
    out.push_back({c[0], parse_double(c[1]), parse_double(c[2]), c[3] == "true"});
  }
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace qhd::csv
