#include "qhd/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <numbers>
#include <utility>

namespace qhd::fft {
namespace {

// FFTW planning is not thread-safe; execution with the new-array interface is.
struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
};

struct PlanCache {
  std::mutex mutex;
  std::map<std::pair<std::size_t, std::size_t>, PlanPair> plans;

  ~PlanCache() {
    for (auto& [_, p] : plans) {
      fftw_destroy_plan(p.forward);
      fftw_destroy_plan(p.backward);
    }
  }
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

const PlanPair& plans_for(const Grid& grid) {
  const std::size_t n0 = grid.count(0);
  const std::size_t n1 = grid.ndim() == 2 ? grid.count(1) : 0;
  auto& c = cache();
  std::lock_guard lock(c.mutex);
  auto key = std::make_pair(n0, n1);
  if (auto it = c.plans.find(key); it != c.plans.end()) return it->second;

  std::vector<Complex> scratch(grid.size());
  auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  PlanPair p;
  if (n1 == 0) {
    p.forward = fftw_plan_dft_1d(static_cast<int>(n0), buf, buf, FFTW_FORWARD, flags);
    p.backward = fftw_plan_dft_1d(static_cast<int>(n0), buf, buf, FFTW_BACKWARD, flags);
  } else {
    p.forward = fftw_plan_dft_2d(static_cast<int>(n0), static_cast<int>(n1), buf, buf, FFTW_FORWARD, flags);
    p.backward = fftw_plan_dft_2d(static_cast<int>(n0), static_cast<int>(n1), buf, buf, FFTW_BACKWARD, flags);
  }
  return c.plans.emplace(key, p).first->second;
}

}  // namespace

void forward(const Grid& grid, std::span<Complex> data) {
  const auto& p = plans_for(grid);
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(p.forward, buf, buf);
}

void inverse(const Grid& grid, std::span<Complex> data) {
  const auto& p = plans_for(grid);
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(p.backward, buf, buf);
  const double scale = 1.0 / static_cast<double>(data.size());
  for (auto& z : data) z *= scale;
}

std::vector<double> wavenumbers(const Grid& grid, int axis) {
  const std::size_t n = grid.count(axis);
  const double length = grid.bounds(axis).length();
  std::vector<double> k(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double m = j < (n + 1) / 2 ? static_cast<double>(j) : static_cast<double>(j) - static_cast<double>(n);
    k[j] = 2.0 * std::numbers::pi * m / length;
  }
  return k;
}

}  // namespace qhd::fft
