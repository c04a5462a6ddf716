#include "support.hpp"

#include "qhd/classical.hpp"
#include "qhd/operators.hpp"

#include <doctest.h>

using namespace qhd;
using qhd::test::kPi;

namespace {

HamiltonianSpec harmonic() { return {potential::Harmonic{1.0}, 1.0}; }
HamiltonianSpec inverted() { return {potential::InvertedHarmonic{1.0}, 1.0}; }
HamiltonianSpec free_particle() { return {potential::Free{}, 1.0}; }

ClassicalState state(double q, double p) { return {{q}, {p}, 0.0}; }

}  // namespace

TEST_SUITE("classical") {

TEST_CASE("harmonic orbit closes after one period") {
  const auto tr = hamilton_flow(harmonic(), state(1, 0), 2 * kPi / 1000, 1000);
  CHECK(std::abs(tr.states.back().q[0] - 1.0) < 1e-6);
  CHECK(std::abs(tr.states.back().p[0]) < 1e-6);
  const double e0 = hamiltonian(harmonic(), tr.states.front());
  for (const auto& s : tr.states) CHECK(std::abs(hamiltonian(harmonic(), s) - e0) <= 1e-8 * e0);
}

TEST_CASE("free particle moves in a straight line") {
  const auto tr = hamilton_flow(free_particle(), state(0, 1), 0.01, 300);
  CHECK(std::abs(tr.states.back().q[0] - 3.0) < 1e-10);
  CHECK(tr.states.back().t == doctest::Approx(3.0));
}

TEST_CASE("hamilton flow reports the failing step") {
  try {
    hamilton_flow(inverted(), state(1, 0), 1.0, 2000);
    FAIL("expected a numerical error");
  } catch (const NumericalError& e) {
    CHECK(e.step() > 0);
  }
  CHECK_THROWS_AS(hamilton_flow(harmonic(), state(1, 0), 0.0, 10), PreconditionError);
  CHECK_THROWS_AS(hamilton_flow({potential::Box{}, 1.0}, state(1, 0), 0.1, 10), PreconditionError);
  CHECK_THROWS_AS(hamilton_flow({potential::Free{}, 0.0}, state(1, 0), 0.1, 10), PreconditionError);
}

TEST_CASE("variational flow oracles") {
  SUBCASE("harmonic rotation") {
    const auto ref = hamilton_flow(harmonic(), state(0.3, 0.2), kPi / 1000, 1000);
    const auto v = variational_flow(harmonic(), ref, {{1.0}, {0.0}});
    CHECK(std::abs(v.states.back().xi[0] + 1.0) < 1e-8);
    CHECK(std::abs(v.states.back().eta[0]) < 1e-8);
  }
  SUBCASE("zero variation stays zero") {
    const auto ref = hamilton_flow(inverted(), state(0.5, -0.1), 0.01, 300);
    const auto v = variational_flow(inverted(), ref, {{0.0}, {0.0}});
    for (const auto& s : v.states) {
      CHECK(s.xi[0] == 0.0);
      CHECK(s.eta[0] == 0.0);
    }
  }
  SUBCASE("free particle") {
    const HamiltonianSpec spec{potential::Free{}, 2.0};
    const auto ref = hamilton_flow(spec, state(0, 1), 0.01, 500);
    const auto v = variational_flow(spec, ref, {{0.3}, {0.8}});
    for (std::size_t n = 0; n < v.times.size(); ++n) {
      CHECK(std::abs(v.states[n].xi[0] - (0.3 + 0.8 * v.times[n] / 2.0)) < 1e-10);
      CHECK(std::abs(v.states[n].eta[0] - 0.8) < 1e-10);
    }
  }
  SUBCASE("reference samples are reproduced") {
    const auto ref = hamilton_flow(harmonic(), state(1, 0), 0.01, 100);
    CHECK_NOTHROW(variational_flow(harmonic(), ref, {{1.0}, {1.0}}));
    CHECK_THROWS_AS(variational_flow(harmonic(), ref, {{1.0, 2.0}, {1.0, 0.0}}), PreconditionError);
  }
}

TEST_CASE("variational flow linearizes the nonlinear flow") {
  const HamiltonianSpec spec{potential::GaussianBarrier{1.0, {0.0}, 1.0}, 1.0};
  const auto x0 = state(-1.5, 0.8);
  const auto ref = hamilton_flow(spec, x0, 0.01, 300);
  auto error = [&](double scale) {
    const VariationalState v0{{0.01 * scale}, {-0.02 * scale}};
    const auto pert = hamilton_flow(spec, {{x0.q[0] + v0.xi[0]}, {x0.p[0] + v0.eta[0]}, 0.0}, 0.01, 300);
    const auto v = variational_flow(spec, ref, v0);
    const double dq = pert.states.back().q[0] - ref.states.back().q[0] - v.states.back().xi[0];
    const double dp = pert.states.back().p[0] - ref.states.back().p[0] - v.states.back().eta[0];
    return std::hypot(dq, dp);
  };
  const double ratio = error(1.0) / error(0.5);
  CHECK(ratio == doctest::Approx(4.0).epsilon(0.2));
}

TEST_CASE("poincare invariant") {
  const auto ref = hamilton_flow(harmonic(), state(1, 0), 0.01, static_cast<std::size_t>(std::lround(20 * kPi / 0.01)));
  const auto a = variational_flow(harmonic(), ref, {{1.0}, {0.0}});
  const auto b = variational_flow(harmonic(), ref, {{0.0}, {1.0}});
  const auto c = poincare_invariant(a, b);
  CHECK(c.front() == 1.0);
  double drift = 0.0;
  for (double x : c) drift = std::max(drift, std::abs(x - c.front()));
  CHECK(drift <= 1e-9);
  for (double x : poincare_invariant(a, a)) CHECK(x == 0.0);
  const auto swapped = poincare_invariant(b, a);
  for (std::size_t n = 0; n < c.size(); ++n) CHECK(swapped[n] == -c[n]);

  // monodromy determinant is C for a unit initial basis
  CHECK(std::abs(c.back() - 1.0) <= 1e-8);

  const auto shorter = hamilton_flow(harmonic(), state(1, 0), 0.01, 10);
  CHECK_THROWS_AS(poincare_invariant(a, variational_flow(harmonic(), shorter, {{1.0}, {0.0}})), PreconditionError);
}

TEST_CASE("poincare invariant in two dimensions with a barrier") {
  const HamiltonianSpec spec{potential::GaussianBarrier{2.0, {0.0, 0.5}, 1.0}, 1.0};
  const auto ref = hamilton_flow(spec, {{-2.0, 0.0}, {1.0, 0.3}, 0.0}, 0.005, 1000);
  const auto a = variational_flow(spec, ref, {{1.0, 0.0}, {0.0, 0.5}});
  const auto b = variational_flow(spec, ref, {{0.2, 1.0}, {1.0, 0.0}});
  const auto c = poincare_invariant(a, b);
  for (double x : c) CHECK(std::abs(x - c.front()) <= 1e-8 * std::max(1.0, std::abs(c.front())));
}

TEST_CASE("lyapunov estimates") {
  SUBCASE("harmonic") {
    const std::vector<double> x0{1.0, 0.0};
    const auto r = lyapunov_estimate(classical_flow(harmonic(), 1), x0, {200, 1.0, 0.01, 1e-8, 1});
    CHECK(std::abs(r.lambda_max) <= 0.01);
    CHECK(r.intervals.size() == 200);
    const auto half = lyapunov_estimate(classical_flow(harmonic(), 1), x0, {200, 0.5, 0.01, 1e-8, 1});
    CHECK(std::abs(half.lambda_max - r.lambda_max) <= 0.01);
  }
  SUBCASE("inverted harmonic") {
    const std::vector<double> x0{0.0, 0.0};
    const auto r = lyapunov_estimate(classical_flow(inverted(), 1), x0, {200, 1.0, 0.01, 1e-8, 1});
    CHECK(std::abs(r.lambda_max - 1.0) <= 0.02);
    const auto half = lyapunov_estimate(classical_flow(inverted(), 1), x0, {200, 0.5, 0.01, 1e-8, 1});
    CHECK(std::abs(half.lambda_max - r.lambda_max) <= 0.01);
  }
  SUBCASE("free particle") {
    const std::vector<double> x0{0.0, 1.0};
    const auto r = lyapunov_estimate(classical_flow(free_particle(), 1), x0, {2000, 1.0, 0.1, 1e-8, 1});
    CHECK(std::abs(r.lambda_max) <= 0.01);
  }
  SUBCASE("seed only moves the offset direction") {
    const std::vector<double> x0{0.0, 0.0};
    const auto a = lyapunov_estimate(classical_flow(inverted(), 1), x0, {50, 1.0, 0.01, 1e-8, 1});
    const auto b = lyapunov_estimate(classical_flow(inverted(), 1), x0, {50, 1.0, 0.01, 1e-8, 1});
    CHECK(a.lambda_max == b.lambda_max);
  }
  SUBCASE("preconditions and breakdown") {
    const std::vector<double> x0{0.0, 0.0};
    CHECK_THROWS_AS(lyapunov_estimate(classical_flow(harmonic(), 1), x0, {5, 1.0, 0.01, 1e-8, 1}), PreconditionError);
    const std::vector<double> far{1e6, 0.0};
    CHECK_THROWS_AS(lyapunov_estimate(classical_flow(harmonic(), 1), far, {200, 1.0, 0.01, 1e-8, 1}), NumericalError);
  }
  SUBCASE("frozen guidance field") {
    // v = x/2 on a periodic-free window: psi = exp(-x^2/8 + i x^2/4)
    const auto g = Grid::make_1d({-20, 20}, 512, Boundary::Periodic);
    const auto psi = test::complex_from(g, [](double x, double) { return std::exp(Complex(-x * x / 8, x * x / 4)); });
    const FrozenVelocity v(velocity_field(psi, UnitSystem::make(1, 1)), Interpolation::Linear);
    const std::vector<double> x0{0.0};
    const auto r = lyapunov_estimate(bohm_flow(v), x0, {20, 1.0, 0.01, 1e-8, 1});
    CHECK(std::abs(r.lambda_max - 0.5) < 1e-3);
  }
}

TEST_CASE("zero characteristic check") {
  const std::vector<VariationalState> basis{{{1.0}, {0.0}}, {{0.0}, {1.0}}};
  const auto h = zero_characteristic_check(harmonic(), state(1, 0), basis);
  CHECK(h.stable);
  for (double l : h.exponents) CHECK(std::abs(l) <= 0.02);
  CHECK(h.gram_determinant == doctest::Approx(1.0));

  const auto inv = zero_characteristic_check(inverted(), state(0, 0), basis);
  CHECK_FALSE(inv.stable);
  CHECK(*std::max_element(inv.exponents.begin(), inv.exponents.end()) == doctest::Approx(1.0).epsilon(0.02));

  CharacteristicOptions longer;
  longer.horizon = 1000;
  const auto fr = zero_characteristic_check(free_particle(), state(0, 1), basis, longer);
  CHECK(fr.stable);

  const std::vector<VariationalState> dependent{{{1.0}, {1.0}}, {{2.0}, {2.0 + 1e-7}}};
  CHECK_THROWS_AS(zero_characteristic_check(harmonic(), state(1, 0), dependent), PreconditionError);
}

}  // TEST_SUITE
