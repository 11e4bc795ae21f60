#include "talbot/cutoff.hpp"

#include "talbot/errors.hpp"
#include "talbot/quadrature.hpp"

#include <cmath>
#include <sstream>

namespace talbot {

namespace {

constexpr double scan_floor = 1e-3 * cutoff_min_distance;
constexpr int points_per_decade = 64;

// Log-spaced scan from `hi` down to `lo`.
template <class Pred>
int scan_inward(double lo, double hi, const Pred& hit, double& u_hit, double& u_miss)
{
  const int n = std::max(2, static_cast<int>(std::ceil(std::log10(hi / lo) * points_per_decade)));
  double prev = hi;
  for (int k = 0; k <= n; ++k) {
    const double u = hi * std::pow(lo / hi, static_cast<double>(k) / n);
    if (hit(u)) {
      u_hit = u;
      u_miss = prev;
      return k;
    }
    prev = u;
  }
  return -1;
}

template <class G>
double bisect(const G& g, double lo, double hi)
{
  // g(lo) >= 0, g(hi) < 0
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (!(mid > lo && mid < hi))
      break;
    (g(mid) >= 0.0 ? lo : hi) = mid;
  }
  return lo;
}

} // namespace

CutoffResult cutoff_deflection(const WallPotential& wall, double mass, double b, double p_z, double theta,
                               double u_max)
{
  CutoffResult res;
  res.rule = Deflection{theta};
  res.converged = true;
  if (wall.is_null()) {
    res.diagnostic = "no interaction";
    return res;
  }
  const double a = wall.surface();
  const double threshold = theta * p_z * p_z / (mass * b);
  auto g = [&](double u) { return wall.slope(a + u) - threshold; };

  double u_hit = 0.0, u_miss = 0.0;
  const int k = scan_inward(scan_floor, u_max, [&](double u) { return g(u) >= 0.0; }, u_hit, u_miss);
  if (k < 0) {
    res.diagnostic = "attractive force below deflection threshold";
    return res;
  }
  if (k == 0)
    throw ConfigError("slit_closed");
  const double root = bisect(g, u_hit, u_miss);
  res.residual = g(root) / threshold;
  if (root < cutoff_min_distance) {
    std::ostringstream msg;
    msg << "root " << root << " m below minimum distance, clamped";
    res.diagnostic = msg.str();
    res.x_c = cutoff_min_distance;
    return res;
  }
  res.x_c = root;
  return res;
}

double capture_integral(const WallPotential& wall, double X)
{
  if (!(X > 0.0))
    return 0.0;
  const double a = wall.surface();
  // u = X s^2 removes the x^{3/2} behaviour at the wall.
  auto f = [&](double s) -> double {
    if (s <= 0.0)
      return 0.0;
    const double v = wall.value(a + X * s * s);
    return v < 0.0 ? 2.0 * X * s / std::sqrt(-v) : 0.0;
  };
  quad::Options opt;
  opt.rel_tol = 1e-14;
  opt.abs_tol = 1e-300;
  opt.initial_intervals = 4;
  const auto res = quad::integrate(f, 0.0, 1.0, opt);
  if (!res.converged)
    throw NumericalError("capture_integral: quadrature did not converge");
  return res.value;
}

CutoffResult cutoff_flythrough(const WallPotential& wall, double mass, double b, double v_z, double u_max)
{
  CutoffResult res;
  res.rule = FlyThrough{};
  res.converged = true;
  if (wall.is_null() || b <= 0.0) {
    res.diagnostic = "no interaction";
    return res;
  }
  const double a = wall.surface();
  auto V = [&](double u) { return wall.value(a + u); };
  if (V(scan_floor) >= 0.0) {
    res.diagnostic = "wall not attractive: no capture";
    return res;
  }

  // Attractive range: up to the first outward sign change of V.
  double x_max = u_max;
  {
    const int n = static_cast<int>(std::ceil(std::log10(u_max / scan_floor) * points_per_decade));
    double prev = scan_floor;
    for (int k = 1; k <= n; ++k) {
      const double u = scan_floor * std::pow(u_max / scan_floor, static_cast<double>(k) / n);
      if (V(u) >= 0.0) {
        x_max = bisect([&](double x) { return -V(x); }, prev, u);
        break;
      }
      prev = u;
    }
  }

  const double target = (b / v_z) / std::sqrt(0.5 * mass);
  const double i_max = capture_integral(wall, x_max);
  if (i_max < target) {
    if (x_max >= u_max)
      throw ConfigError("slit_closed");
    res.x_c = x_max;
    res.diagnostic = "capture extends to the end of the attractive range";
    return res;
  }

  // Safeguarded Newton on I(X) - target, dI/dX = 1 / sqrt(-V(X)).
  double lo = 0.0, hi = x_max, X = 0.5 * x_max;
  for (int it = 0; it < 200; ++it) {
    const double r = capture_integral(wall, X) - target;
    (r < 0.0 ? lo : hi) = X;
    if (std::abs(r) <= 1e-13 * target || hi - lo <= 1e-15 * hi) {
      res.residual = r / target;
      break;
    }
    double next = X - r * std::sqrt(-V(X));
    if (!(next > lo && next < hi))
      next = 0.5 * (lo + hi);
    X = next;
    res.residual = r / target;
  }
  res.x_c = X;
  if (X < cutoff_min_distance) {
    res.diagnostic = "capture distance below minimum distance, clamped";
    res.x_c = cutoff_min_distance;
  }
  return res;
}

CutoffResult solve_cutoff(const GratingSpec& spec, const Molecule& mol, double v_z)
{
  const WallPotential wall(spec.wall, mol);
  const double u_max = spec.accessible_half_width();
  if (const auto* defl = std::get_if<Deflection>(&spec.cutoff))
    return cutoff_deflection(wall, mol.mass, spec.thickness, mol.mass * v_z, defl->theta, u_max);
  return cutoff_flythrough(wall, mol.mass, spec.thickness, v_z, u_max);
}

} // namespace talbot
