#include "talbot/units.hpp"

#include <cmath>
#include <stdexcept>

namespace talbot {

RotatoryStrength RotatoryStrength::from_cgs_1e40(double r)
{
  return {cgs_rotatory_to_si(r)};
}

double RotatoryStrength::cgs_1e40() const
{
  return si_rotatory_to_cgs(value_si);
}

double cgs_rotatory_to_si(double r_cgs_1e40)
{
  return r_cgs_1e40 * rotatory_cgs_scale * rotatory_cgs_to_si;
}

double si_rotatory_to_cgs(double r_si)
{
  return r_si / rotatory_cgs_to_si / rotatory_cgs_scale;
}

double de_broglie_wavelength(double mass_kg, double v_z)
{
  if (!(mass_kg > 0.0) || !(v_z > 0.0))
    throw std::domain_error("de_broglie_wavelength: mass and velocity must be positive");
  return si::h / (mass_kg * v_z);
}

} // namespace talbot
