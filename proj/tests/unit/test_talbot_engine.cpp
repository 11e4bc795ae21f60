#include "talbot/errors.hpp"
#include "talbot/scenarios.hpp"
#include "talbot/talbot_engine.hpp"
#include "talbot/units.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace talbot;

namespace {

InterferometerConfig ideal(double talbot_ratio)
{
  GratingSpec g;
  g.period = 257e-9;
  g.thickness = 160e-9;
  g.open_fraction = 0.45;
  InterferometerConfig cfg;
  cfg.g1 = cfg.g2 = cfg.g3 = g;
  cfg.molecule.mass = 328 * si::dalton;
  cfg.molecule.omega1 = 2 * std::numbers::pi * 1e15;
  cfg.v_z = 180;
  cfg.separation = talbot_ratio * g.period * g.period / de_broglie_wavelength(cfg.molecule.mass, cfg.v_z);
  return cfg;
}

} // namespace

TEST_SUITE("talbot_engine")
{
  TEST_CASE("geometric coefficients")
  {
    const FourierSpectrum a = geometric_coeffs(0.45, 257e-9, 16);
    CHECK(a[0].real() == doctest::Approx(0.45));
    CHECK(a[1].real() == doctest::Approx(0.314390963280).epsilon(1e-11));
    CHECK(a[-3] == a[3]);
    CHECK(a[17] == cdouble{});
    const FourierSpectrum open = geometric_coeffs(1.0, 257e-9, 8);
    CHECK(open[0].real() == 1.0);
    for (int l = 1; l <= 8; ++l)
      CHECK(std::abs(open[l]) == 0.0);
    CHECK_THROWS_WITH_AS(geometric_coeffs(0.0, 257e-9, 8), "slit_closed", ConfigError);
  }

  TEST_CASE("window coefficient by direct numerical integration")
  {
    // (1/d) int_{-fd/2}^{fd/2} cos(2 pi x / d) dx by the midpoint rule.
    const int n = 200000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      const double x = -0.225 + 0.45 * (i + 0.5) / n;
      sum += std::cos(2 * std::numbers::pi * x);
    }
    CHECK(talbot_A_exact(0.45, 1) == doctest::Approx(sum * 0.45 / n).epsilon(1e-9));
    CHECK(talbot_A_exact(0.45, 0) == 0.45);
  }

  TEST_CASE("autocorrelations")
  {
    const FourierSpectrum open = geometric_coeffs(1.0, 1.0, 8);
    CHECK(std::abs(talbot_A(open, 0) - 1.0) < 1e-15);
    CHECK(std::abs(talbot_A(open, 2)) < 1e-15);
    for (double t : {0.0, 0.7, 5.12})
      CHECK(std::abs(talbot_B(open, 1, t)) < 1e-15);

    const FourierSpectrum a = geometric_coeffs(0.45, 1.0, 4096);
    for (int l : {0, 1, 2, 5})
      CHECK(std::abs(talbot_A(a, l) - talbot_A_exact(0.45, l)) < 2e-4);
    for (int l : {1, 3})
      CHECK(std::abs(talbot_B(a, l, 0.0) - talbot_A(a, l)) < 1e-14);
  }

  TEST_CASE("eikonal coefficients without a potential are geometric")
  {
    const InterferometerConfig cfg = ideal(1.0);
    const FourierSpectrum b = eikonal_coeffs(cfg.g2, cfg.molecule, cfg.v_z, 0.0, 32);
    const FourierSpectrum a = geometric_coeffs(0.45, cfg.g2.period, 32);
    for (int l = -32; l <= 32; ++l)
      CHECK(std::abs(b[l] - a[l]) < 1e-12);
  }

  TEST_CASE("exact and truncated B agree for a dressed mask")
  {
    const EnantiomerPair pair = make_pair(preset("fig2i"));
    const InterferometerConfig& cfg = pair.right;
    const double x_c = solve_cutoffs(cfg)[1].x_c;
    const EikonalMask mask(cfg.g2, cfg.molecule, cfg.v_z, x_c);
    CHECK_FALSE(mask.singular_edges());
    const FourierSpectrum b = eikonal_coeffs(cfg.g2, cfg.molecule, cfg.v_z, x_c, 2048);
    for (int l : {0, 1, 2, 3})
      CHECK(std::abs(talbot_B_exact(mask, l, 5.1164) - talbot_B(b, l, 5.1164)) < 2e-3);
  }

  TEST_CASE("convolution path matches direct integration")
  {
    const EnantiomerPair pair = make_pair(preset("fig2i"));
    const InterferometerConfig& cfg = pair.right;
    const double x_c = solve_cutoffs(cfg)[1].x_c;
    const FourierSpectrum direct = eikonal_coeffs(cfg.g2, cfg.molecule, cfg.v_z, x_c, 32);
    const FourierSpectrum conv = eikonal_coeffs_convolution(cfg.g2, cfg.molecule, cfg.v_z, x_c, 32);
    for (int l = -32; l <= 32; ++l)
      CHECK(std::abs(direct[l] - conv[l]) < 1e-6);
    CHECK_THROWS_AS(eikonal_coeffs_convolution(pair.left.g2, pair.left.molecule, cfg.v_z, 0.0, 32), NumericalError);
  }

  TEST_CASE("series visibility")
  {
    TalbotSeries s;
    s.period = 1.0;
    s.coefficients.resize(2);
    s.coefficients << 1.0, 0.25;
    CHECK(s.visibility() == doctest::Approx(0.5));
    CHECK(s.evaluate(0.0) == doctest::Approx(1.5));
    CHECK(s.evaluate(0.5) == doctest::Approx(0.5));
    TalbotSeries empty;
    CHECK_THROWS_WITH_AS(empty.visibility(), "no_transmission", ConfigError);

    const TalbotSeries avg = average({s, s}, {1.0, 3.0});
    CHECK(std::abs(avg.coefficients[1] - 0.25) < 1e-15);
  }

  TEST_CASE("ideal visibility is periodic in the Talbot ratio")
  {
    for (double t : {0.3, 1.0, 2.7})
      CHECK(visibility(ideal(t)) == doctest::Approx(visibility(ideal(t + 4.0))).epsilon(1e-9));
    // Moire shadow of three identical binary masks at the Talbot length.
    CHECK(visibility(ideal(1.0)) == doctest::Approx(0.117241).epsilon(1e-5));
  }

  TEST_CASE("hexahelicene Talbot ratio")
  {
    const EnantiomerPair pair = make_pair(preset("fig2i"));
    const SignalResult r = compute_signal(pair.right);
    CHECK(r.talbot_ratio == doctest::Approx(5.11639824).epsilon(1e-8));
    CHECK(r.cutoffs[1].x_c == doctest::Approx(2.40651758549e-9).epsilon(1e-9));
    CHECK(r.cutoffs[0].x_c == 0.0);
  }

  TEST_CASE("l_max doubling is stable")
  {
    const EnantiomerPair pair = make_pair(preset("fig3i"));
    EngineOptions opt;
    const SignalResult r = compute_signal(pair.right, opt);
    opt.l_max_initial = 2 * r.series.l_max();
    opt.l_max_limit = 4 * opt.l_max_initial;
    const SignalResult r2 = compute_signal(pair.right, opt);
    const FringeResult f1 = sample_fringe(r.series, 256), f2 = sample_fringe(r2.series, 256);
    CHECK((f1.S - f2.S).cwiseAbs().maxCoeff() <= 1e-6 * r.series.dc_level());
    CHECK(std::abs(r.series.visibility() - r2.series.visibility()) <= 1e-6);
  }

  TEST_CASE("sample fringe covers one period")
  {
    const SignalResult r = compute_signal(ideal(2.0));
    const FringeResult coarse = sample_fringe(r.series, 64);
    CHECK(coarse.x3.size() == 64);
    CHECK(coarse.x3[0] == doctest::Approx(-0.5 * 257e-9));
    // Enough samples that no harmonic aliases onto the mean.
    const FringeResult f = sample_fringe(r.series, 2 * r.series.l_max() + 2);
    CHECK(f.S.mean() == doctest::Approx(r.series.dc_level()).epsilon(1e-12));
    CHECK(r.series.dc_level() == doctest::Approx(0.45 * 0.45 * 0.45).epsilon(1e-12));
  }

  TEST_CASE("prescribed cut-offs")
  {
    const InterferometerConfig cfg = ideal(1.0);
    const SignalResult r = compute_signal(cfg, std::array<double, 3>{0.0, 10e-9, 0.0});
    CHECK(r.effective_fraction[1] == doctest::Approx(0.45 - 20e-9 / 257e-9).epsilon(1e-12));
    CHECK(r.series.dc_level() < compute_signal(cfg).series.dc_level());
  }
}
