#include "talbot/units.hpp"

#include <doctest.h>

#include <stdexcept>

using namespace talbot;

TEST_SUITE("units")
{
  TEST_CASE("rotatory strength conversion")
  {
    CHECK(cgs_rotatory_to_si(0.0) == 0.0);
    // Values frozen from an independent 30-digit evaluation.
    CHECK(rotatory_cgs_to_si == doctest::Approx(3.33564095198e-15).epsilon(1e-11));
    CHECK(cgs_rotatory_to_si(700.0) == doctest::Approx(2.33494866639e-52).epsilon(1e-11));
    CHECK(cgs_rotatory_to_si(-700.0) == -cgs_rotatory_to_si(700.0));
    CHECK(cgs_rotatory_to_si(1400.0) == doctest::Approx(2.0 * cgs_rotatory_to_si(700.0)).epsilon(1e-15));
  }

  TEST_CASE("round trip")
  {
    for (double r : {-7000.0, -1.0, 0.3, 700.0, 1e4}) {
      CHECK(si_rotatory_to_cgs(cgs_rotatory_to_si(r)) == doctest::Approx(r).epsilon(1e-14));
      CHECK(RotatoryStrength::from_cgs_1e40(r).cgs_1e40() == doctest::Approx(r).epsilon(1e-14));
    }
  }

  TEST_CASE("constants are consistent")
  {
    CHECK(si::eps0 * si::mu0 * si::c * si::c == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(si::eps0 == doctest::Approx(8.8541878128e-12).epsilon(1e-10));
  }

  TEST_CASE("de Broglie wavelength")
  {
    CHECK(de_broglie_wavelength(328 * si::dalton, 180) == doctest::Approx(6.75865974640e-12).epsilon(1e-11));
    CHECK(de_broglie_wavelength(1000 * si::dalton, 140) == doctest::Approx(2.85022336734e-12).epsilon(1e-11));
    const double l1 = de_broglie_wavelength(500 * si::dalton, 150);
    CHECK(de_broglie_wavelength(1000 * si::dalton, 150) == doctest::Approx(0.5 * l1).epsilon(1e-15));
    CHECK_THROWS_AS(de_broglie_wavelength(0.0, 100), std::domain_error);
    CHECK_THROWS_AS(de_broglie_wavelength(1e-25, -1), std::domain_error);
  }
}
