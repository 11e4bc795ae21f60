#include "talbot/domain.hpp"

#include "talbot/errors.hpp"
#include "talbot/units.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace talbot {

namespace {

template <class... Ts>
struct overloaded : Ts...
{
  using Ts::operator()...;
};

bool positive(double x) { return std::isfinite(x) && x > 0.0; }

} // namespace

Molecule Molecule::mirrored() const
{
  Molecule m = *this;
  m.rotatory = -rotatory;
  return m;
}

void Molecule::validate() const
{
  if (!positive(mass))
    throw ConfigError("mass");
  if (!positive(omega1))
    throw ConfigError("omega1");
  if (!std::isfinite(rotatory))
    throw ConfigError("rotatory_strength");
  if (g_e && !positive(*g_e))
    throw ConfigError("g_e");
  if (g_m && !positive(*g_m))
    throw ConfigError("g_m");
}

DipoleMoments dipole_moments(const Molecule& mol)
{
  if ((mol.g_e && *mol.g_e == 0.0) || (mol.g_m && *mol.g_m == 0.0))
    throw std::domain_error("dipole_moments: anisotropy factor must be nonzero");
  const double r = std::abs(mol.rotatory);
  DipoleMoments out;
  if (mol.g_e)
    out.d2 = r / (si::c * *mol.g_e);
  if (mol.g_m)
    out.m2 = r * si::c / *mol.g_m;
  return out;
}

DielectricModel DielectricModel::silicon_nitride()
{
  return {2.69e16, 1.33e16, 3.05e16, 6.40e15};
}

void DielectricModel::validate() const
{
  if (!positive(Omega_L) || !positive(Omega_T) || !positive(gamma_L) || !positive(gamma_T))
    throw ConfigError("dielectric");
}

double coating_thickness(const WallModel& wall)
{
  if (const auto* coated = std::get_if<CoatedSiN>(&wall))
    return coated->a;
  return 0.0;
}

WallModel mirrored(const WallModel& wall)
{
  return std::visit(overloaded{
                        [](const PerfectChiral& w) -> WallModel { return PerfectChiral{-w.r_c_sign}; },
                        [](const ChiralMirror& w) -> WallModel { return ChiralMirror{w.r, -w.r_c}; },
                        [](const CoatedSiN& w) -> WallModel {
                          CoatedSiN m = w;
                          m.coating = w.coating.mirrored();
                          return m;
                        },
                        [](const auto& w) -> WallModel { return w; },
                    },
                    wall);
}

void GratingSpec::validate() const
{
  if (!positive(period))
    throw ConfigError("period");
  if (!positive(thickness))
    throw ConfigError("thickness");
  if (!(open_fraction > 0.0 && open_fraction < 1.0))
    throw ConfigError("open_fraction");
  std::visit(overloaded{
                 [](const PerfectChiral& w) {
                   if (w.r_c_sign < -1 || w.r_c_sign > 1)
                     throw ConfigError("r_c");
                 },
                 [](const ChiralMirror& w) {
                   if (!(std::abs(w.r) <= 1.0))
                     throw ConfigError("r");
                   if (!(std::abs(w.r_c) <= 1.0))
                     throw ConfigError("r_c");
                 },
                 [](const BareSiN& w) { w.dielectric.validate(); },
                 [](const CoatedSiN& w) {
                   w.dielectric.validate();
                   w.coating.validate();
                   if (!positive(w.n_B))
                     throw ConfigError("n_B");
                   if (!(w.a >= 0.0) || !std::isfinite(w.a))
                     throw ConfigError("coating_thickness");
                 },
                 [](const IdealWall&) {},
             },
             wall);
  if (!(accessible_half_width() > 0.0))
    throw ConfigError("coating_thickness");
  if (const auto* defl = std::get_if<Deflection>(&cutoff); defl && !positive(defl->theta))
    throw ConfigError("theta");
}

void InterferometerConfig::validate() const
{
  g1.validate();
  g2.validate();
  g3.validate();
  if (g1.period != g2.period || g2.period != g3.period)
    throw ConfigError("period");
  if (!positive(separation))
    throw ConfigError("separation");
  molecule.validate();
  if (!positive(v_z))
    throw ConfigError("velocity");
}

InterferometerConfig InterferometerConfig::mirrored() const
{
  InterferometerConfig m = *this;
  m.molecule = molecule.mirrored();
  m.g1.wall = talbot::mirrored(g1.wall);
  m.g2.wall = talbot::mirrored(g2.wall);
  m.g3.wall = talbot::mirrored(g3.wall);
  return m;
}

AnisotropyCheck anisotropy_condition_ok(const Molecule& mol, const ChiralMirror& wall)
{
  if (wall.r_c == 0.0)
    return {false, "r_c = 0: no chiral reflection, chiral potential vanishes"};
  const double ratio = wall.r / wall.r_c;
  std::ostringstream why;
  if (mol.g_e && ratio > *mol.g_e)
    why << "r/r_c = " << ratio << " exceeds g_e = " << *mol.g_e << "; ";
  if (mol.g_m && ratio > *mol.g_m)
    why << "r/r_c = " << ratio << " exceeds g_m = " << *mol.g_m << "; ";
  const std::string msg = why.str();
  return {msg.empty(), msg};
}

} // namespace talbot
