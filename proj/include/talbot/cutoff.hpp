#ifndef TALBOT_CUTOFF_HPP
#define TALBOT_CUTOFF_HPP

#include "talbot/domain.hpp"
#include "talbot/potentials.hpp"

#include <string>

namespace talbot {

/// Effective cut-off distance, measured from the accessible wall surface
/// (the coating surface for coated walls).
struct CutoffResult
{
  double x_c = 0.0;
  CutoffRule rule = FlyThrough{};
  bool converged = false;
  double residual = 0.0;
  std::string diagnostic;
};

/// Below this distance the continuum dispersion model is not trusted.
inline constexpr double cutoff_min_distance = 0.1e-9;

/// Largest distance u at which the attractive wall force reaches the
/// deflection threshold:  |F(u)| m b / p_z^2 = theta.
/// Searches u in (0, u_max); u_max is the distance from the accessible
/// surface to the slit centre. Throws ConfigError("slit_closed") when the
/// threshold is exceeded across the whole slit.
CutoffResult cutoff_deflection(const WallPotential& wall, double mass, double b, double p_z, double theta,
                               double u_max);

/// Capture distance for a molecule flying past an attractive wall:
///   b / v_z = sqrt(m / 2) * int_0^{x_c} du / sqrt(-V(u)).
CutoffResult cutoff_flythrough(const WallPotential& wall, double mass, double b, double v_z, double u_max);

/// Dispatch on the grating's cut-off rule.
CutoffResult solve_cutoff(const GratingSpec& spec, const Molecule& mol, double v_z);

/// The flight-time integral int_0^X du / sqrt(-V(u)) used by the capture rule.
double capture_integral(const WallPotential& wall, double X);

} // namespace talbot

#endif
