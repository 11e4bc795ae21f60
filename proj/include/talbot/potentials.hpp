#ifndef TALBOT_POTENTIALS_HPP
#define TALBOT_POTENTIALS_HPP

#include "talbot/domain.hpp"

namespace talbot {

/// Isotropic electric polarizability at imaginary frequency, C m^2 / V.
double alpha_imag(const Molecule& mol, double xi);

/// Real dielectric function on the imaginary axis, eps(i xi).
double epsilon_imag(const DielectricModel& diel, double xi);

/// Non-retarded potential of a chiral mirror (electric + magnetic + chiral), J.
double v_chiral_mirror(double x, const Molecule& mol, double r, double r_c);
/// F = -dV/dx of v_chiral_mirror, N.
double force_chiral_mirror(double x, const Molecule& mol, double r, double r_c);

/// Potential of a coating layer of thickness a made of molecules B acting on
/// molecule A at distance x from the bare grating surface, J.
double v_coating(double x, const Molecule& molA, const Molecule& molB, double n_B, double a);
double force_coating(double x, const Molecule& molA, const Molecule& molB, double n_B, double a);

/// Potential of a bare dielectric half-space, J (strictly -C3 / x^3).
double v_bare_grating(double x, const Molecule& mol, const DielectricModel& diel);
double force_bare_grating(double x, const Molecule& mol, const DielectricModel& diel);

/// Frequency integral of (omega1 / (omega1^2 + xi^2)) (eps - 1) / (eps + 1)
/// over xi in [0, inf). Adaptive Gauss-Kronrod under xi = omega1 t / (1 - t);
/// memoized per (omega1, dielectric) behind a mutex.
double reflection_integral(double omega1, const DielectricModel& diel);
/// Same integral by a fixed Gauss-Legendre rule on the same substitution,
/// doubling the node count until two successive values agree to rel_tol.
double reflection_integral_fixed(double omega1, const DielectricModel& diel, double rel_tol = 1e-8);

/// Components of a wall potential that scale as 1/x^3 or 1/(x-a)^3; used for
/// fast repeated evaluation inside the slit.
struct WallCoefficients
{
  double c3 = 0.0;          ///< V contains -c3 / x^3 (electric - magnetic, bare substrate)
  double chiral = 0.0;      ///< V contains chiral * log(k x) / x^3
  double log_scale = 0.0;   ///< k = omega1 / c
  double coat_e = 0.0;      ///< coating electric: V contains -coat_e (1/(x-a)^3 - 1/x^3)
  double coat_m = 0.0;      ///< coating magnetic
  double coat_c = 0.0;      ///< coating chiral (signed)
  double a = 0.0;
};

/// A single wall model bound to a molecule; potential and analytic force as
/// functions of the distance x from the bare wall surface.
class WallPotential
{
public:
  WallPotential() = default;
  WallPotential(const WallModel& wall, const Molecule& mol);

  double value(double x) const;
  /// F = -dV/dx; negative values pull the molecule towards the wall.
  double force(double x) const;
  /// dV/dx, positive when the wall attracts.
  double slope(double x) const { return -force(x); }
  /// Distance of the accessible surface from the bare wall (coating thickness).
  double surface() const { return coef_.a; }
  bool is_null() const { return null_; }
  const WallCoefficients& coefficients() const { return coef_; }

private:
  WallCoefficients coef_;
  bool null_ = true;
};

/// Two-wall slit potential with bare walls at +/- x_o.
class SlitPotential
{
public:
  SlitPotential() = default;
  SlitPotential(const GratingSpec& spec, const Molecule& mol);

  /// V(x) = V_wall(x_o - x) + V_wall(x_o + x). Throws std::domain_error for
  /// |x| >= x_o - a.
  double value(double x) const;
  /// dV/dx.
  double slope(double x) const;
  double accessible_half_width() const { return x_o_ - wall_.surface(); }
  double half_opening() const { return x_o_; }
  const WallPotential& wall() const { return wall_; }
  bool is_null() const { return wall_.is_null(); }

private:
  WallPotential wall_;
  double x_o_ = 0.0;
};

double slit_potential(double x, const GratingSpec& spec, const Molecule& mol);

} // namespace talbot

#endif
