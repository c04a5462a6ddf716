#include "qhd/diagnostics.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

namespace qhd {

void DiagnosticsReport::add(std::string name, double value, double tolerance) {
  const bool pass = std::isfinite(value) && std::abs(value) <= tolerance;
  add(std::move(name), value, tolerance, pass);
}

void DiagnosticsReport::add(std::string name, double value, double tolerance, bool pass) {
  entries_.push_back({std::move(name), value, tolerance, pass});
}

bool DiagnosticsReport::all_pass() const noexcept {
  for (const auto& e : entries_)
    if (!e.pass) return false;
  return true;
}

std::string DiagnosticsReport::to_csv() const {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "name,value,tolerance,pass\n";
  for (const auto& e : entries_)
    out << e.name << ',' << e.value << ',' << e.tolerance << ',' << (e.pass ? "true" : "false") << '\n';
  return out.str();
}

std::string DiagnosticsReport::summary() const {
  std::ostringstream out;
  out << "scenario: " << (scenario_.empty() ? "(unnamed)" : scenario_) << '\n';
  for (const auto& [k, v] : provenance_) out << "  " << k << " = " << v << '\n';
  std::size_t width = 4;
  for (const auto& e : entries_) width = std::max(width, e.name.size());
  out << std::setprecision(6);
  for (const auto& e : entries_) {
    out << (e.pass ? "  PASS  " : "  FAIL  ") << std::left << std::setw(static_cast<int>(width)) << e.name
        << std::right << "  " << std::setw(14) << e.value << "  (tol " << e.tolerance << ")\n";
  }
  out << (all_pass() ? "overall: PASS\n" : "overall: FAIL\n");
  return out.str();
}

}  // namespace qhd
