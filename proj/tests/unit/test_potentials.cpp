#include "support.hpp"

#include "qhd/potentials.hpp"

#include <doctest.h>

using namespace qhd;

TEST_SUITE("potentials") {

TEST_CASE("harmonic values") {
  const auto u = UnitSystem::make(1, 1);
  const auto g = Grid::make_1d({-2, 2}, 9, Boundary::DirichletZero);
  const auto U = eval_potential(potential::Harmonic{1.0}, g, u);
  CHECK(U[4] == 0.0);  // x = 0
  CHECK(U[6] == doctest::Approx(0.5));  // x = 1
  const auto heavy = eval_potential(potential::Harmonic{2.0}, g, UnitSystem::make(1, 3));
  CHECK(heavy[6] == doctest::Approx(0.5 * 3 * 4));
}

TEST_CASE("harmonic and inverted are even on symmetric grids") {
  const auto u = UnitSystem::make(1, 1);
  const auto g = Grid::make_2d({-3, 3}, 31, {-2, 2}, 21, Boundary::DirichletZero);
  for (const PotentialSpec& s : {PotentialSpec(potential::Harmonic{1.3}), PotentialSpec(potential::InvertedHarmonic{0.7})}) {
    const auto U = eval_potential(s, g, u);
    for (std::size_t i = 0; i < 31; ++i)
      for (std::size_t j = 0; j < 21; ++j) CHECK(U.at(i, j) == doctest::Approx(U.at(30 - i, 20 - j)).epsilon(1e-13));
  }
  const auto inv = eval_potential(potential::InvertedHarmonic{2.0}, g, u);
  CHECK(inv.at(25, 10) == doctest::Approx(-0.5 * 2.0 * 4.0));
}

TEST_CASE("free and box are identically zero") {
  const auto g = Grid::make_1d({0, 1}, 16, Boundary::DirichletZero);
  for (const PotentialSpec& s : {PotentialSpec(potential::Free{}), PotentialSpec(potential::Box{})}) {
    const auto U = eval_potential(s, g, UnitSystem::make(1, 1));
    for (double v : U.values()) CHECK(v == 0.0);
  }
}

TEST_CASE("double slit geometry") {
  const auto g = Grid::make_2d({-10, 10}, 101, {-10, 10}, 101, Boundary::DirichletZero);
  potential::DoubleSlit ds;
  ds.height = 50.0;
  ds.wall_position = 0.0;
  ds.slit_centers = {-2.0, 2.0};
  ds.slit_width = 1.0;
  const auto U = eval_potential(ds, g, UnitSystem::make(1, 1));
  const std::size_t wall = 50;  // x = 0
  CHECK(U.at(wall, 60) == 0.0);   // y = 2, inside aperture
  CHECK(U.at(wall, 40) == 0.0);   // y = -2
  CHECK(U.at(wall, 50) == 50.0);  // y = 0, between the slits
  CHECK(U.at(wall, 90) == 50.0);
  for (std::size_t i = 0; i < 101; ++i)
    for (std::size_t j = 0; j < 101; ++j)
      if (i != wall) CHECK(U.at(i, j) == 0.0);

  ds.wall_cells = 3;
  const auto thick = eval_potential(ds, g, UnitSystem::make(1, 1));
  std::size_t rows = 0;
  for (std::size_t i = 0; i < 101; ++i) rows += thick.at(i, 50) != 0.0 ? 1 : 0;
  CHECK(rows == 3);
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(validate(potential::Harmonic{0.0}), PreconditionError);
  CHECK_THROWS_AS(validate(potential::InvertedHarmonic{-1.0}), PreconditionError);
  CHECK_THROWS_AS(validate(potential::GaussianBarrier{-1.0, {}, 1.0}), PreconditionError);
  potential::DoubleSlit ds;
  ds.slit_width = 0.0;
  ds.slit_centers = {0.0};
  CHECK_THROWS_AS(validate(ds), PreconditionError);
  CHECK_NOTHROW(validate(potential::Harmonic{1.0}));
}

TEST_CASE("double slit needs a 2D grid") {
  potential::DoubleSlit ds;
  ds.slit_centers = {0.0};
  CHECK_THROWS_AS(eval_potential(ds, Grid::make_1d({0, 1}, 16, Boundary::DirichletZero), UnitSystem::make(1, 1)),
                  PreconditionError);
}

TEST_CASE("tabulated field must match the grid") {
  const auto g = Grid::make_1d({0, 1}, 16, Boundary::DirichletZero);
  const auto other = Grid::make_1d({0, 2}, 16, Boundary::DirichletZero);
  potential::Tabulated t{test::real_from(g, [](double x, double) { return x; })};
  CHECK(eval_potential(t, g, UnitSystem::make(1, 1))[3] == doctest::Approx(g.coord(0, 3)));
  CHECK_THROWS_AS(eval_potential(t, other, UnitSystem::make(1, 1)), PreconditionError);
}

TEST_CASE("gaussian barrier point derivatives match finite differences") {
  potential::GaussianBarrier b{2.0, {0.3, -0.2}, 0.8};
  const auto u = UnitSystem::make(1, 1);
  const std::vector<double> q{0.5, 0.1};
  const auto d = eval_point(b, q, u);
  const double h = 1e-5;
  for (std::size_t a = 0; a < 2; ++a) {
    auto qp = q, qm = q;
    qp[a] += h;
    qm[a] -= h;
    const auto dp = eval_point(b, qp, u);
    const auto dm = eval_point(b, qm, u);
    CHECK(d.gradient[a] == doctest::Approx((dp.value - dm.value) / (2 * h)).epsilon(1e-7));
    for (std::size_t c = 0; c < 2; ++c)
      CHECK(d.hessian[a * 2 + c] == doctest::Approx((dp.gradient[c] - dm.gradient[c]) / (2 * h)).epsilon(1e-6));
  }
  CHECK_THROWS_AS(eval_point(potential::Box{}, q, u), PreconditionError);
  CHECK_FALSE(has_analytic_derivatives(potential::Box{}));
  CHECK(has_analytic_derivatives(potential::InvertedHarmonic{1.0}));
}

}  // TEST_SUITE
