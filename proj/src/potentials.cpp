#include "talbot/potentials.hpp"

#include "talbot/errors.hpp"
#include "talbot/quadrature.hpp"
#include "talbot/units.hpp"

#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace talbot {

namespace {

constexpr double pi = std::numbers::pi;

template <class... Ts>
struct overloaded : Ts...
{
  using Ts::operator()...;
};

void require_positive_distance(double x, const char* who)
{
  if (!(x > 0.0))
    throw std::domain_error(std::string(who) + ": distance must be positive");
}

// Reflection factor (eps - 1) / (eps + 1) at imaginary frequency.
double reflection(const DielectricModel& diel, double xi)
{
  const double eps = epsilon_imag(diel, xi);
  return (eps - 1.0) / (eps + 1.0);
}

// Integrand after xi = omega1 t / (1 - t); the Lorentzian and the Jacobian
// combine into 1 / ((1 - t)^2 + t^2).
double mapped_integrand(double omega1, const DielectricModel& diel, double t)
{
  if (t >= 1.0)
    return 0.0;
  const double xi = omega1 * t / (1.0 - t);
  const double u = 1.0 - t;
  return reflection(diel, xi) / (u * u + t * t);
}

WallCoefficients mirror_coefficients(const Molecule& mol, double r, double r_c)
{
  const DipoleMoments dm = dipole_moments(mol);
  WallCoefficients c;
  c.c3 = r * dm.d2 / (48.0 * pi * si::eps0) - r * dm.m2 / (48.0 * pi * si::eps0 * si::c * si::c);
  c.chiral = r_c * si::mu0 * si::c * mol.rotatory / (12.0 * pi * pi);
  c.log_scale = mol.omega1 / si::c;
  return c;
}

double bare_c3(const Molecule& mol, const DielectricModel& diel)
{
  const DipoleMoments dm = dipole_moments(mol);
  if (dm.d2 == 0.0)
    return 0.0;
  // hbar / (16 pi^2 eps0) * (2 / (3 hbar)) d^2 * J
  return dm.d2 * reflection_integral(mol.omega1, diel) / (24.0 * pi * pi * si::eps0);
}

void add_coating(WallCoefficients& c, const Molecule& A, const Molecule& B, double n_B, bool chiral)
{
  const DipoleMoments a = dipole_moments(A);
  const DipoleMoments b = dipole_moments(B);
  const double energy = si::hbar * (A.omega1 + B.omega1);
  const double e2 = si::eps0 * si::eps0;
  const double c2 = si::c * si::c;
  c.coat_e = n_B * a.d2 * b.d2 / (144.0 * pi * e2 * energy);
  c.coat_m = n_B * a.m2 * b.m2 / (144.0 * pi * e2 * c2 * c2 * energy);
  c.coat_c = chiral ? n_B * A.rotatory * B.rotatory / (72.0 * pi * e2 * c2 * energy) : 0.0;
}

double eval_value(const WallCoefficients& c, double x)
{
  const double ix3 = 1.0 / (x * x * x);
  double v = -c.c3 * ix3;
  if (c.chiral != 0.0)
    v += c.chiral * std::log(c.log_scale * x) * ix3;
  const double coat = c.coat_e + c.coat_m + c.coat_c;
  if (coat != 0.0) {
    const double s = x - c.a;
    v -= coat * (1.0 / (s * s * s) - ix3);
  }
  return v;
}

double eval_slope(const WallCoefficients& c, double x)
{
  const double ix4 = 1.0 / (x * x * x * x);
  double dv = 3.0 * c.c3 * ix4;
  if (c.chiral != 0.0)
    dv += c.chiral * (1.0 - 3.0 * std::log(c.log_scale * x)) * ix4;
  const double coat = c.coat_e + c.coat_m + c.coat_c;
  if (coat != 0.0) {
    const double s = x - c.a;
    dv += 3.0 * coat * (1.0 / (s * s * s * s) - ix4);
  }
  return dv;
}

} // namespace

double alpha_imag(const Molecule& mol, double xi)
{
  const DipoleMoments dm = dipole_moments(mol);
  const double w = mol.omega1;
  return 2.0 / (3.0 * si::hbar) * w * dm.d2 / (w * w + xi * xi);
}

double epsilon_imag(const DielectricModel& diel, double xi)
{
  const double num = diel.Omega_L * diel.Omega_L + xi * xi + xi * diel.gamma_L;
  const double den = diel.Omega_T * diel.Omega_T + xi * xi + xi * diel.gamma_T;
  return num / den;
}

double reflection_integral(double omega1, const DielectricModel& diel)
{
  static std::mutex mutex;
  static std::map<std::array<double, 5>, double> cache;
  const std::array<double, 5> key{omega1, diel.Omega_L, diel.Omega_T, diel.gamma_L, diel.gamma_T};
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(key); it != cache.end())
      return it->second;
  }
  quad::Options opt;
  opt.rel_tol = 1e-14;
  opt.abs_tol = 1e-300;
  opt.initial_intervals = 8;
  const auto res = quad::integrate([&](double t) { return mapped_integrand(omega1, diel, t); }, 0.0, 1.0, opt);
  if (!res.converged)
    throw NumericalError("reflection_integral: adaptive quadrature did not converge");
  std::lock_guard lock(mutex);
  cache.emplace(key, res.value);
  return res.value;
}

double reflection_integral_fixed(double omega1, const DielectricModel& diel, double rel_tol)
{
  auto f = [&](double t) { return mapped_integrand(omega1, diel, t); };
  double prev = quad::integrate_fixed(f, 0.0, 1.0, quad::gauss_legendre(16), 1);
  for (int n = 32; n <= 4096; n *= 2) {
    const double next = quad::integrate_fixed(f, 0.0, 1.0, quad::gauss_legendre(n), 1);
    if (std::abs(next - prev) <= rel_tol * std::abs(next))
      return next;
    prev = next;
  }
  throw NumericalError("reflection_integral_fixed: node doubling did not converge");
}

double v_chiral_mirror(double x, const Molecule& mol, double r, double r_c)
{
  require_positive_distance(x, "v_chiral_mirror");
  return eval_value(mirror_coefficients(mol, r, r_c), x);
}

double force_chiral_mirror(double x, const Molecule& mol, double r, double r_c)
{
  require_positive_distance(x, "force_chiral_mirror");
  return -eval_slope(mirror_coefficients(mol, r, r_c), x);
}

double v_coating(double x, const Molecule& molA, const Molecule& molB, double n_B, double a)
{
  if (!(x > a))
    throw std::domain_error("v_coating: position inside the coating");
  WallCoefficients c;
  c.a = a;
  add_coating(c, molA, molB, n_B, true);
  return eval_value(c, x);
}

double force_coating(double x, const Molecule& molA, const Molecule& molB, double n_B, double a)
{
  if (!(x > a))
    throw std::domain_error("force_coating: position inside the coating");
  WallCoefficients c;
  c.a = a;
  add_coating(c, molA, molB, n_B, true);
  return -eval_slope(c, x);
}

double v_bare_grating(double x, const Molecule& mol, const DielectricModel& diel)
{
  require_positive_distance(x, "v_bare_grating");
  return -bare_c3(mol, diel) / (x * x * x);
}

double force_bare_grating(double x, const Molecule& mol, const DielectricModel& diel)
{
  require_positive_distance(x, "force_bare_grating");
  return -3.0 * bare_c3(mol, diel) / (x * x * x * x);
}

WallPotential::WallPotential(const WallModel& wall, const Molecule& mol)
{
  std::visit(overloaded{
                 [&](const IdealWall&) {},
                 [&](const PerfectChiral& w) { coef_ = mirror_coefficients(mol, 0.0, w.r_c_sign); },
                 [&](const ChiralMirror& w) { coef_ = mirror_coefficients(mol, w.r, w.r_c); },
                 [&](const BareSiN& w) { coef_.c3 = bare_c3(mol, w.dielectric); },
                 [&](const CoatedSiN& w) {
                   coef_.c3 = bare_c3(mol, w.dielectric);
                   coef_.a = w.a;
                   if (w.a > 0.0)
                     add_coating(coef_, mol, w.coating, w.n_B, w.chiral);
                 },
             },
             wall);
  coef_.log_scale = mol.omega1 / si::c;
  null_ = coef_.c3 == 0.0 && coef_.chiral == 0.0 && coef_.coat_e == 0.0 && coef_.coat_m == 0.0 &&
          coef_.coat_c == 0.0;
}

double WallPotential::value(double x) const
{
  if (!(x > coef_.a))
    throw std::domain_error("WallPotential: position inside the wall");
  return null_ ? 0.0 : eval_value(coef_, x);
}

double WallPotential::force(double x) const
{
  if (!(x > coef_.a))
    throw std::domain_error("WallPotential: position inside the wall");
  return null_ ? 0.0 : -eval_slope(coef_, x);
}

SlitPotential::SlitPotential(const GratingSpec& spec, const Molecule& mol)
    : wall_(spec.wall, mol), x_o_(spec.half_opening())
{}

double SlitPotential::value(double x) const
{
  return wall_.value(x_o_ - x) + wall_.value(x_o_ + x);
}

double SlitPotential::slope(double x) const
{
  return wall_.slope(x_o_ + x) - wall_.slope(x_o_ - x);
}

double slit_potential(double x, const GratingSpec& spec, const Molecule& mol)
{
  return SlitPotential(spec, mol).value(x);
}

} // namespace talbot
