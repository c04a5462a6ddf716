#include "qhd/bohm.hpp"

#include "qhd/operators.hpp"

#include <algorithm>
#include <cmath>

namespace qhd {
namespace {

/// Inverse-CDF sampler for a piecewise-linear density on uniform nodes.
/// Periodic lines include the wrap-around cell from the last node back to the first.
class LinearCdf {
 public:
  LinearCdf(std::span<const double> nodes, double lower, double h, bool periodic)
      : nodes_(nodes.begin(), nodes.end()), lower_(lower), h_(h), periodic_(periodic) {
    const std::size_t cells = periodic ? nodes_.size() : nodes_.size() - 1;
    cumulative_.resize(cells + 1, 0.0);
    for (std::size_t c = 0; c < cells; ++c)
      cumulative_[c + 1] = cumulative_[c] + 0.5 * h_ * (left(c) + right(c));
  }

  double total() const { return cumulative_.back(); }

  double sample(double u) const {
    const double target = u * total();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
    std::size_t c = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, it - cumulative_.begin() - 1));
    c = std::min(c, cumulative_.size() - 2);
    // Rounding can put target at the very top; back off to a cell with mass.
    while (c > 0 && cumulative_[c + 1] - cumulative_[c] <= 0.0) --c;
    const double r = std::max(0.0, target - cumulative_[c]);
    const double a = left(c), b = right(c);
    // Mass within the cell up to s: a s + (b - a) s^2 / (2h) = r.
    const double disc = std::max(0.0, a * a + 2.0 * (b - a) * r / h_);
    const double denom = a + std::sqrt(disc);
    double s = denom > 0.0 ? 2.0 * r / denom : 0.0;
    s = std::clamp(s, 0.0, h_);
    return lower_ + static_cast<double>(c) * h_ + s;
  }

 private:
  double left(std::size_t c) const { return nodes_[c]; }
  double right(std::size_t c) const { return nodes_[(c + 1) % nodes_.size()]; }

  std::vector<double> nodes_;
  double lower_;
  double h_;
  bool periodic_;
  std::vector<double> cumulative_;
};

double wrap(double x, const Interval& b) {
  const double l = b.length();
  double y = std::fmod(x - b.lower, l);
  if (y < 0.0) y += l;
  return b.lower + y;
}

}  // namespace

std::vector<Point> sample_initial_positions(const RealField& density, std::size_t count, Rng& rng) {
  const Grid& g = density.grid();
  for (double p : density.values())
    if (!std::isfinite(p) || p < 0.0) throw PreconditionError("sampling density must be finite and non-negative");
  const double mass = integrate(density);
  if (!(std::abs(mass - 1.0) <= 1e-6)) throw PreconditionError("sampling density is not normalized (integral " + std::to_string(mass) + ")");

  const bool periodic = g.periodic();
  std::vector<Point> out(count, Point{0.0, 0.0});
  if (g.ndim() == 1) {
    LinearCdf cdf(density.values(), g.bounds(0).lower, g.spacing(0), periodic);
    for (auto& p : out) {
      p[0] = cdf.sample(rng.uniform());
      if (periodic) p[0] = wrap(p[0], g.bounds(0));
    }
    return out;
  }

  const std::size_t n0 = g.count(0), n1 = g.count(1);
  std::vector<double> marginal(n0);
  std::vector<LinearCdf> rows;
  rows.reserve(n0);
  for (std::size_t i0 = 0; i0 < n0; ++i0) {
    rows.emplace_back(density.values().subspan(i0 * n1, n1), g.bounds(1).lower, g.spacing(1), periodic);
    marginal[i0] = rows.back().total();
  }
  LinearCdf cdf0(marginal, g.bounds(0).lower, g.spacing(0), periodic);
  std::vector<double> slice(n1);
  for (auto& p : out) {
    const double x = cdf0.sample(rng.uniform());
    const double s = (x - g.bounds(0).lower) / g.spacing(0);
    auto i0 = static_cast<std::size_t>(std::floor(s));
    i0 = std::min(i0, periodic ? n0 - 1 : n0 - 2);
    const double w = std::clamp(s - static_cast<double>(i0), 0.0, 1.0);
    const std::size_t i0n = (i0 + 1) % n0;
    for (std::size_t i1 = 0; i1 < n1; ++i1)
      slice[i1] = (1.0 - w) * density.at(i0, i1) + w * density.at(i0n, i1);
    LinearCdf cdf1(slice, g.bounds(1).lower, g.spacing(1), periodic);
    p[0] = periodic ? wrap(x, g.bounds(0)) : x;
    const double y = cdf1.sample(rng.uniform());
    p[1] = periodic ? wrap(y, g.bounds(1)) : y;
  }
  return out;
}

std::vector<Point> sample_initial_positions(const RealField& density, std::size_t count, std::uint64_t seed) {
  Rng rng(seed, streams::kSampling);
  return sample_initial_positions(density, count, rng);
}

}  // namespace qhd
