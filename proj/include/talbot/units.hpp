#ifndef TALBOT_UNITS_HPP
#define TALBOT_UNITS_HPP

#include <numbers>

namespace talbot {

/// Physical constants in SI units (CODATA 2018).
namespace si {
  /// speed of light in vacuum in m / s (exact)
  inline constexpr double c = 299792458.0;
  /// Planck constant in J s (exact)
  inline constexpr double h = 6.62607015e-34;
  /// reduced Planck constant in J s
  inline constexpr double hbar = h / (2.0 * std::numbers::pi);
  /// vacuum permeability in N / A^2
  inline constexpr double mu0 = 1.25663706212e-6;
  /// vacuum permittivity in F / m (derived so that c^2 eps0 mu0 = 1)
  inline constexpr double eps0 = 1.0 / (mu0 * c * c);
  /// unified atomic mass unit in kg
  inline constexpr double dalton = 1.66053906660e-27;
}

/// Gaussian-cgs unit of rotatory strength (statC cm * erg / G) expressed in
/// SI (C m * J / T = C^2 m^3 / s).
///   1 statC cm = 1e-3 / c C m  and  1 erg / G = 1e-3 J / T.
inline constexpr double rotatory_cgs_to_si = 1e-3 / si::c * 1e-3;

/// Scale of the "10^-40 cgs" unit used to quote molecular rotatory strengths.
inline constexpr double rotatory_cgs_scale = 1e-40;

/// Signed rotatory strength; positive means right-handed.
struct RotatoryStrength
{
  double value_si = 0.0;

  static RotatoryStrength from_cgs_1e40(double r);
  double cgs_1e40() const;
};

double cgs_rotatory_to_si(double r_cgs_1e40);
double si_rotatory_to_cgs(double r_si);

/// de Broglie wavelength h / (m v) in m. Throws std::domain_error for
/// non-positive inputs.
double de_broglie_wavelength(double mass_kg, double v_z);

inline constexpr double nm = 1e-9;
inline constexpr double mm = 1e-3;

} // namespace talbot

#endif
