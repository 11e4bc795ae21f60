#ifndef TALBOT_DOMAIN_HPP
#define TALBOT_DOMAIN_HPP

#include <optional>
#include <string>
#include <variant>

namespace talbot {

/// Chiral molecule with a single dominant transition.
struct Molecule
{
  double mass = 0.0;         ///< kg
  double omega1 = 0.0;       ///< dominant transition angular frequency, rad/s
  double rotatory = 0.0;     ///< signed rotatory strength R01, C^2 m^3 / s
  std::optional<double> g_e; ///< electric anisotropy factor |R/c| / |d|^2
  std::optional<double> g_m; ///< magnetic anisotropy factor |R c| / |m|^2

  /// The enantiomer: identical except for the sign of R01.
  Molecule mirrored() const;
  void validate() const;
};

/// Squared transition moments |d01|^2 (C^2 m^2) and |m01|^2 ((A m^2)^2).
struct DipoleMoments
{
  double d2 = 0.0;
  double m2 = 0.0;
};

/// Moments follow from |R01| and the anisotropy factors. An absent factor
/// means the corresponding moment is not modelled and is set to zero.
DipoleMoments dipole_moments(const Molecule& mol);

/// Lorentz-oscillator dielectric function of the grating substrate.
struct DielectricModel
{
  double Omega_L = 0.0;
  double Omega_T = 0.0;
  double gamma_L = 0.0;
  double gamma_T = 0.0;

  static DielectricModel silicon_nitride();
  void validate() const;
};

/// Grating walls without any dispersion interaction.
struct IdealWall
{};

/// Perfectly chiral mirror: r = 0, r_c = sign (+1 right-handed, -1 left, 0 off).
struct PerfectChiral
{
  int r_c_sign = 1;
};

/// Chiral mirror with reflection matrix ((-r, r_c), (r_c, r)).
struct ChiralMirror
{
  double r = 0.0;
  double r_c = 0.0;
};

/// Non-chiral bare dielectric wall.
struct BareSiN
{
  DielectricModel dielectric = DielectricModel::silicon_nitride();
};

/// Dielectric wall carrying a layer of chiral molecules of thickness a.
/// The handedness of the layer is the sign of coating.rotatory; `chiral`
/// switches the chiral coating term off while keeping electric and magnetic.
struct CoatedSiN
{
  DielectricModel dielectric = DielectricModel::silicon_nitride();
  Molecule coating;
  double n_B = 0.0; ///< number density of coating molecules, 1/m^3
  double a = 0.0;   ///< layer thickness, m
  bool chiral = true;
};

using WallModel = std::variant<IdealWall, PerfectChiral, ChiralMirror, BareSiN, CoatedSiN>;

/// Thickness of material on top of the bare wall (0 unless coated).
double coating_thickness(const WallModel& wall);

/// Apply a parity transformation to the wall (flip every handedness).
WallModel mirrored(const WallModel& wall);

struct Deflection
{
  double theta = 0.0; ///< detector acceptance angle, rad
};
struct FlyThrough
{};
using CutoffRule = std::variant<Deflection, FlyThrough>;

struct GratingSpec
{
  double period = 0.0;        ///< d, m
  double thickness = 0.0;     ///< b, m
  double open_fraction = 0.0; ///< f = s / d
  WallModel wall = IdealWall{};
  CutoffRule cutoff = FlyThrough{};

  /// Half width of the bare slit, x_o = f d / 2.
  double half_opening() const { return 0.5 * open_fraction * period; }
  /// Half width of the region a molecule can occupy, x_o - a.
  double accessible_half_width() const { return half_opening() - coating_thickness(wall); }
  void validate() const;
};

struct InterferometerConfig
{
  GratingSpec g1, g2, g3;
  double separation = 0.0; ///< L, m
  Molecule molecule;
  double v_z = 0.0; ///< m/s

  void validate() const;
  /// Full parity image: molecule and every grating handedness flipped.
  InterferometerConfig mirrored() const;
};

/// Result of the anisotropy requirement r / r_c <= g_e, g_m.
struct AnisotropyCheck
{
  bool ok = false;
  std::string diagnostic;
  explicit operator bool() const { return ok; }
};

AnisotropyCheck anisotropy_condition_ok(const Molecule& mol, const ChiralMirror& wall);

} // namespace talbot

#endif
