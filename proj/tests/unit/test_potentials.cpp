#include "talbot/potentials.hpp"
#include "talbot/units.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

using namespace talbot;

namespace {

Molecule hexahelicene()
{
  Molecule m;
  m.mass = 328 * si::dalton;
  m.omega1 = 2 * std::numbers::pi * 1e15;
  m.rotatory = cgs_rotatory_to_si(700);
  return m;
}

Molecule fig3_molecule()
{
  Molecule m;
  m.mass = 1000 * si::dalton;
  m.omega1 = 2 * std::numbers::pi * 1e15;
  m.rotatory = cgs_rotatory_to_si(1000);
  m.g_e = 0.2;
  m.g_m = 5.0;
  return m;
}

// Central difference with one Richardson step.
template <class F>
double derivative(const F& f, double x)
{
  auto cd = [&](double h) { return (f(x + h) - f(x - h)) / (2 * h); };
  const double h = 1e-3 * x;
  return (4 * cd(0.5 * h) - cd(h)) / 3;
}

} // namespace

TEST_SUITE("potentials")
{
  TEST_CASE("polarizability")
  {
    const Molecule m = fig3_molecule();
    const double d2 = dipole_moments(m).d2;
    const double a0 = alpha_imag(m, 0.0);
    CHECK(a0 == doctest::Approx(2.0 / (3.0 * si::hbar) * d2 / m.omega1).epsilon(1e-14));
    CHECK(alpha_imag(m, m.omega1) == doctest::Approx(0.5 * a0).epsilon(1e-14));
    CHECK(alpha_imag(m, 10 * m.omega1) < alpha_imag(m, m.omega1));
    CHECK(alpha_imag(m, 1e30) < 1e-20 * a0);
  }

  TEST_CASE("dielectric function on the imaginary axis")
  {
    const DielectricModel sin = DielectricModel::silicon_nitride();
    CHECK(epsilon_imag(sin, 0.0) == doctest::Approx(4.09073435468).epsilon(1e-11));
    CHECK(epsilon_imag(sin, 0.0) == doctest::Approx(sin.Omega_L * sin.Omega_L / (sin.Omega_T * sin.Omega_T)).epsilon(1e-12));
    CHECK(epsilon_imag(sin, 1e22) == doctest::Approx(1.0).epsilon(1e-5));
    // The SiN constants give a shallow rise below Omega_T; the decay is
    // monotone from there on.
    for (double xi = 1e12; xi < sin.Omega_T; xi *= 3)
      CHECK(epsilon_imag(sin, xi) < 1.003 * epsilon_imag(sin, 0.0));
    double prev = epsilon_imag(sin, sin.Omega_T);
    for (double xi = sin.Omega_T; xi < 1e19; xi *= 1.5) {
      const double e = epsilon_imag(sin, xi);
      CHECK(e > 1.0);
      CHECK(e <= prev);
      prev = e;
    }
  }

  TEST_CASE("chiral mirror")
  {
    const Molecule hex = hexahelicene();
    CHECK(v_chiral_mirror(10e-9, hex, 0.0, 1.0) == doctest::Approx(-1.16060006249e-27).epsilon(1e-10));
    CHECK(v_chiral_mirror(10e-9, hex.mirrored(), 0.0, 1.0) == -v_chiral_mirror(10e-9, hex, 0.0, 1.0));
    CHECK(force_chiral_mirror(5e-9, hex.mirrored(), 0.0, 1.0) == -force_chiral_mirror(5e-9, hex, 0.0, 1.0));
    CHECK(v_chiral_mirror(si::c / hex.omega1, hex, 0.0, 1.0) == doctest::Approx(0.0).epsilon(1e-40));
    const double root = si::c * std::exp(1.0 / 3.0) / hex.omega1;
    CHECK(std::abs(force_chiral_mirror(root, hex, 0.0, 1.0)) < 1e-12 * std::abs(force_chiral_mirror(1e-8, hex, 0.0, 1.0)));
    CHECK(v_chiral_mirror(10e-9, fig3_molecule(), 0.1, 1.0) == doctest::Approx(-2.05800008949e-27).epsilon(1e-10));
    CHECK_THROWS_AS(v_chiral_mirror(0.0, hex, 0.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(force_chiral_mirror(-1e-9, hex, 0.0, 1.0), std::domain_error);
  }

  TEST_CASE("coating")
  {
    const Molecule m = fig3_molecule();
    CHECK(v_coating(20e-9, m, m, 5e28, 10e-9) == doctest::Approx(-3.11606195017e-29).epsilon(1e-10));
    CHECK(v_coating(20e-9, m, m, 5e28, 0.0) == 0.0);
    CHECK_THROWS_AS(v_coating(5e-9, m, m, 5e28, 10e-9), std::domain_error);
    // Thin layer: V / a tends to a finite limit.
    const double x = 20e-9;
    const double r1 = v_coating(x, m, m, 5e28, 1e-12) / 1e-12;
    const double r2 = v_coating(x, m, m, 5e28, 2e-12) / 2e-12;
    CHECK(r1 == doctest::Approx(r2).epsilon(1e-3));
    // Opposite-handed coating weakens the attraction.
    CHECK(v_coating(x, m.mirrored(), m, 5e28, 10e-9) > v_coating(x, m, m, 5e28, 10e-9));
  }

  TEST_CASE("bare grating")
  {
    const Molecule m = fig3_molecule();
    const DielectricModel sin = DielectricModel::silicon_nitride();
    CHECK(v_bare_grating(20e-9, m, sin) == doctest::Approx(-2.64181127546e-28).epsilon(1e-9));
    CHECK(v_bare_grating(10e-9, m, sin) == doctest::Approx(8 * v_bare_grating(20e-9, m, sin)).epsilon(1e-13));
    DielectricModel vacuum{1e16, 1e16, 1e15, 1e15};
    CHECK(v_bare_grating(20e-9, m, vacuum) == 0.0);
  }

  TEST_CASE("reflection integral: adaptive and fixed rules agree")
  {
    const DielectricModel sin = DielectricModel::silicon_nitride();
    const double w1 = 2 * std::numbers::pi * 1e15;
    CHECK(reflection_integral(w1, sin) == doctest::Approx(reflection_integral_fixed(w1, sin, 1e-10)).epsilon(1e-8));
  }

  TEST_CASE("forces match finite differences")
  {
    const Molecule m = fig3_molecule();
    const DielectricModel sin = DielectricModel::silicon_nitride();
    for (double x : {2e-9, 7e-9, 30e-9}) {
      CHECK(force_chiral_mirror(x, m, 0.1, 1.0) ==
            doctest::Approx(-derivative([&](double u) { return v_chiral_mirror(u, m, 0.1, 1.0); }, x)).epsilon(1e-6));
      CHECK(force_bare_grating(x, m, sin) ==
            doctest::Approx(-derivative([&](double u) { return v_bare_grating(u, m, sin); }, x)).epsilon(1e-6));
    }
    for (double x : {11e-9, 15e-9, 40e-9})
      CHECK(force_coating(x, m, m, 5e28, 10e-9) ==
            doctest::Approx(-derivative([&](double u) { return v_coating(u, m, m, 5e28, 10e-9); }, x)).epsilon(1e-6));
  }

  TEST_CASE("slit potential")
  {
    GratingSpec g;
    g.period = 80e-9;
    g.thickness = 160e-9;
    g.open_fraction = 0.45;
    CoatedSiN c;
    c.coating = fig3_molecule();
    c.n_B = 5e28;
    c.a = 10e-9;
    g.wall = c;
    const Molecule m = fig3_molecule();
    const WallPotential wall(g.wall, m);
    CHECK(slit_potential(0.0, g, m) == doctest::Approx(2 * wall.value(g.half_opening())).epsilon(1e-14));
    CHECK(slit_potential(3e-9, g, m) == doctest::Approx(slit_potential(-3e-9, g, m)).epsilon(1e-14));
    CHECK_THROWS_AS(slit_potential(g.accessible_half_width() + 1e-9, g, m), std::domain_error);

    g.wall = IdealWall{};
    CHECK(slit_potential(5e-9, g, m) == 0.0);
    const SlitPotential s(g, m);
    CHECK(s.is_null());
  }

  TEST_CASE("wall potential composes the pieces")
  {
    const Molecule m = fig3_molecule();
    CoatedSiN c;
    c.coating = m;
    c.n_B = 5e28;
    c.a = 10e-9;
    const WallPotential w(c, m);
    const double x = 20e-9;
    CHECK(w.value(x) == doctest::Approx(v_bare_grating(x, m, c.dielectric) + v_coating(x, m, m, 5e28, 10e-9)).epsilon(1e-12));
    CHECK(w.force(x) == doctest::Approx(force_bare_grating(x, m, c.dielectric) + force_coating(x, m, m, 5e28, 10e-9)).epsilon(1e-12));
    CHECK(w.surface() == 10e-9);

    const WallPotential p(PerfectChiral{1}, hexahelicene());
    CHECK(p.value(10e-9) == doctest::Approx(-1.16060006249e-27).epsilon(1e-10));
  }
}
