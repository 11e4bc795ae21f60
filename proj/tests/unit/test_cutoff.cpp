#include "talbot/cutoff.hpp"
#include "talbot/errors.hpp"
#include "talbot/units.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace talbot;

namespace {

Molecule molecule(double g_e)
{
  Molecule m;
  m.mass = 1000 * si::dalton;
  m.omega1 = 2 * std::numbers::pi * 1e15;
  m.rotatory = cgs_rotatory_to_si(1000);
  m.g_e = g_e;
  return m;
}

constexpr double b = 160e-9;
constexpr double v = 140.0;
constexpr double u_max = 40e-9;

} // namespace

TEST_SUITE("cutoff")
{
  TEST_CASE("deflection closed form for a pure 1/x^3 wall")
  {
    const double theta = 2e-3;
    for (double g_e : {2.0, 0.2, 0.02, 0.002}) {
      const Molecule m = molecule(g_e);
      const WallPotential wall(BareSiN{}, m);
      const double C = wall.coefficients().c3;
      const double p = m.mass * v;
      const double exact = std::pow(3 * C * m.mass * b / (theta * p * p), 0.25);
      const CutoffResult r = cutoff_deflection(wall, m.mass, b, p, theta, u_max);
      CHECK(r.converged);
      CHECK(r.x_c == doctest::Approx(exact).epsilon(1e-9));
    }
  }

  TEST_CASE("fly-through closed form for a pure 1/x^3 wall")
  {
    for (double g_e : {2.0, 0.2, 0.02, 0.002}) {
      const Molecule m = molecule(g_e);
      const WallPotential wall(BareSiN{}, m);
      const double C = wall.coefficients().c3;
      // (2/5) x^{5/2} / sqrt(C) = (b / v) / sqrt(m / 2)
      const double exact = std::pow(2.5 * std::sqrt(C) * (b / v) / std::sqrt(0.5 * m.mass), 0.4);
      const CutoffResult r = cutoff_flythrough(wall, m.mass, b, v, u_max);
      CHECK(r.x_c == doctest::Approx(exact).epsilon(1e-9));
      CHECK(capture_integral(wall, exact) == doctest::Approx(0.4 * std::pow(exact, 2.5) / std::sqrt(C)).epsilon(1e-12));
    }
  }

  TEST_CASE("no interaction")
  {
    const Molecule m = molecule(0.2);
    const WallPotential none(IdealWall{}, m);
    CHECK(cutoff_deflection(none, m.mass, b, m.mass * v, 2e-3, u_max).x_c == 0.0);
    CHECK(cutoff_flythrough(none, m.mass, b, v, u_max).x_c == 0.0);
    const WallPotential bare(BareSiN{}, m);
    CHECK(cutoff_flythrough(bare, m.mass, 0.0, v, u_max).x_c == 0.0);
    const CutoffResult tiny = cutoff_flythrough(bare, m.mass, 1e-16, v, u_max);
    CHECK(tiny.x_c == cutoff_min_distance);
    CHECK(tiny.diagnostic.find("clamped") != std::string::npos);
  }

  TEST_CASE("repulsive wall is never captured")
  {
    const Molecule m = molecule(0.2);
    // Opposite-handed perfect mirror with a left-handed molecule is repulsive.
    const Molecule hex = [] {
      Molecule h;
      h.mass = 328 * si::dalton;
      h.omega1 = 2 * std::numbers::pi * 1e15;
      h.rotatory = cgs_rotatory_to_si(-700);
      return h;
    }();
    const WallPotential wall(PerfectChiral{1}, hex);
    CHECK(cutoff_flythrough(wall, hex.mass, b, 180, u_max).x_c == 0.0);
    CHECK(cutoff_deflection(wall, hex.mass, b, hex.mass * 180, 2e-3, u_max).x_c == 0.0);
    (void)m;
  }

  TEST_CASE("hexahelicene at a perfect chiral grating")
  {
    Molecule hex;
    hex.mass = 328 * si::dalton;
    hex.omega1 = 2 * std::numbers::pi * 1e15;
    hex.rotatory = cgs_rotatory_to_si(700);
    GratingSpec g;
    g.period = 257e-9;
    g.thickness = 160e-9;
    g.open_fraction = 0.45;
    g.wall = PerfectChiral{1};
    g.cutoff = Deflection{2e-3};
    // Independent 30-digit root of the same threshold condition.
    const CutoffResult r = solve_cutoff(g, hex, 180);
    CHECK(r.x_c == doctest::Approx(2.40651758549e-9).epsilon(1e-9));
    CHECK(solve_cutoff(g, hex.mirrored(), 180).x_c == 0.0);
  }

  TEST_CASE("closed slit")
  {
    const Molecule m = molecule(0.0002);
    const WallPotential wall(BareSiN{}, m);
    CHECK_THROWS_WITH_AS(cutoff_deflection(wall, m.mass, b, m.mass * 1.0, 2e-3, 2e-9), "slit_closed", ConfigError);
  }
}
