#include "talbot/talbot_engine.hpp"

#include "talbot/errors.hpp"
#include "talbot/quadrature.hpp"
#include "talbot/units.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace talbot {

namespace {

constexpr double pi = std::numbers::pi;
const cdouble I{0.0, 1.0};

// exp(i pi q) for large q, reduced modulo 2 first.
cdouble exp_i_pi(double q)
{
  const double r = std::fmod(q, 2.0);
  return {std::cos(pi * r), std::sin(pi * r)};
}

// Outermost distance u in (0, max_dist] from an endpoint at which |theta(u)|
// reaches EikonalMask::phase_cap; 0 when it never does.
template <class Theta>
double find_edge_cut(const Theta& theta, double max_dist)
{
  constexpr double floor = 1e-22;
  const double cap = EikonalMask::phase_cap;
  if (std::abs(theta(max_dist)) >= cap)
    return max_dist;
  const int n = static_cast<int>(std::ceil(std::log10(max_dist / floor) * 32));
  double prev = max_dist;
  for (int k = 1; k <= n; ++k) {
    const double u = max_dist * std::pow(floor / max_dist, static_cast<double>(k) / n);
    if (std::abs(theta(u)) >= cap) {
      double lo = u, hi = prev; // |theta(lo)| >= cap > |theta(hi)|
      for (int it = 0; it < 100 && hi - lo > 1e-14 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (std::abs(theta(mid)) >= cap ? lo : hi) = mid;
      }
      return hi;
    }
    prev = u;
  }
  return 0.0;
}

// cos(l theta), l = 0..n, by the three-term recurrence.
void cos_multiples(double theta, Eigen::Ref<Eigen::ArrayXd> out)
{
  // Rotation recurrence, re-anchored every 32 steps to keep the error flat in l.
  const cdouble step = std::polar(1.0, theta);
  cdouble z = 1.0;
  for (Eigen::Index l = 0; l < out.size(); ++l) {
    if (l % 32 == 0)
      z = std::polar(1.0, static_cast<double>(l) * theta);
    out[l] = z.real();
    z *= step;
  }
}

FourierSpectrum symmetric_spectrum(const Eigen::VectorXcd& half, int l_max)
{
  FourierSpectrum s;
  s.l_max = l_max;
  s.coefficients.resize(2 * l_max + 1);
  for (int l = 0; l <= l_max; ++l) {
    s.coefficients[l_max + l] = half[l];
    s.coefficients[l_max - l] = half[l];
  }
  s.tail_bound = std::abs(half[l_max]);
  return s;
}

double window_half_width(const GratingSpec& spec, double x_c)
{
  const double w = spec.accessible_half_width() - x_c;
  if (!(w > 0.0))
    throw ConfigError("slit_closed");
  return w;
}

} // namespace

FourierSpectrum geometric_coeffs(double f_eff, double /*d*/, int l_max)
{
  if (!(f_eff > 0.0))
    throw ConfigError("slit_closed");
  if (f_eff > 1.0)
    throw ConfigError("open_fraction");
  Eigen::VectorXcd half(l_max + 1);
  half[0] = f_eff;
  for (int l = 1; l <= l_max; ++l)
    half[l] = f_eff == 1.0 ? 0.0 : std::sin(pi * l * f_eff) / (pi * l);
  return symmetric_spectrum(half, l_max);
}

EikonalMask::EikonalMask(const GratingSpec& spec, const Molecule& mol, double v_z, double x_c)
    : slit_(spec, mol), d_(spec.period), w_(window_half_width(spec, x_c)),
      kappa_(spec.thickness / (v_z * si::hbar))
{
  singular_ = x_c == 0.0 && !slit_.is_null();
  if (singular_)
    edge_cut_ = find_edge_cut([this](double u) { return phase(w_ - u); }, w_);
}

FourierSpectrum eikonal_coeffs(const GratingSpec& spec, const Molecule& mol, double v_z, double x_c, int l_max,
                               double rel_tol)
{
  const EikonalMask mask(spec, mol, v_z, x_c);
  const double d = mask.period(), w = mask.half_width();
  if (mask.is_null())
    return geometric_coeffs(2.0 * w / d, d, l_max);

  const double k1 = 2.0 * pi / d;
  const double end = w - mask.edge_cut();
  auto integrand = [&](double x) -> Eigen::VectorXcd {
    Eigen::ArrayXd c(l_max + 1);
    cos_multiples(k1 * x, c);
    const double ph = mask.phase(x);
    const cdouble e{std::cos(ph), -std::sin(ph)};
    return (c.cast<cdouble>() * (2.0 / d) * e).matrix();
  };
  const int n0 = 8 + static_cast<int>(std::ceil(2.0 * l_max * w / d));
  const double abs_tol = rel_tol * 2.0 * w / d;
  auto res = quad::integrate_recursive(integrand, 0.0, end, abs_tol, n0);
  if (!res.converged) {
    std::ostringstream msg;
    msg << "eikonal_coeffs: quadrature did not converge (l_max " << l_max << ", window " << w << " m)";
    throw NumericalError(msg.str());
  }
  Eigen::VectorXcd half = res.value;
  if (mask.edge_cut() > 0.0) {
    // Right-end remainder of (1/d) exp(i(+-k x - phi)), leading order.
    const double ph = mask.phase(end), dph = mask.phase_slope(end);
    for (int l = 0; l <= l_max; ++l) {
      const double k = k1 * l;
      for (double sgn : {1.0, -1.0}) {
        const double theta = sgn * k * end - ph;
        const double dtheta = sgn * k - dph;
        half[l] += I * std::exp(I * theta) / dtheta / d;
      }
    }
  }
  return symmetric_spectrum(half, l_max);
}

FourierSpectrum eikonal_coeffs_convolution(const GratingSpec& spec, const Molecule& mol, double v_z, double x_c,
                                           int l_max, int j_max)
{
  const EikonalMask mask(spec, mol, v_z, x_c);
  const double d = mask.period(), w = mask.half_width();
  const double f = 2.0 * w / d;
  if (mask.is_null())
    return geometric_coeffs(f, d, l_max);
  if (mask.singular_edges())
    throw NumericalError("eikonal_coeffs_convolution: edge phase diverges");

  // Blocked region (w, d - w): phase continued by the C^1 parabola
  // phi_w + h phi'_w tau (1 - tau), h = d - 2w, tau = (x - w) / h.
  const double phi_w = mask.phase(w), dphi_w = mask.phase_slope(w), h = d - 2.0 * w;
  auto phase_ext = [&](double x) {
    if (x <= w)
      return mask.phase(x);
    const double tau = (x - w) / h;
    return phi_w + h * dphi_w * tau * (1.0 - tau);
  };

  const int M = j_max + l_max;
  const double k1 = 2.0 * pi / d;
  auto integrand = [&](double x) -> Eigen::VectorXcd {
    Eigen::ArrayXd c(M + 1);
    cos_multiples(k1 * x, c);
    const double ph = phase_ext(x);
    const cdouble e{std::cos(ph), -std::sin(ph)};
    return (c.cast<cdouble>() * (2.0 / d) * e).matrix();
  };
  // Tighter than this drowns in the rounding noise of the cos(m x) recurrence.
  const double abs_tol = 1e-11;
  auto inner = quad::integrate_recursive(integrand, 0.0, w, abs_tol * w / (0.5 * d),
                                         8 + static_cast<int>(std::ceil(2.0 * M * w / d)));
  auto outer = quad::integrate_recursive(integrand, w, 0.5 * d, abs_tol * (0.5 * d - w) / (0.5 * d),
                                         8 + static_cast<int>(std::ceil(2.0 * M * (0.5 * d - w) / d)));
  if (!inner.converged || !outer.converged)
    throw NumericalError("eikonal_coeffs_convolution: quadrature did not converge");
  const Eigen::VectorXcd c = inner.value + outer.value; // c_m = c_{-m}, m = 0..M

  const FourierSpectrum window = geometric_coeffs(f, d, j_max);
  Eigen::VectorXcd half(l_max + 1);
  for (int l = 0; l <= l_max; ++l) {
    cdouble sum = 0.0;
    for (int j = -j_max; j <= j_max; ++j)
      sum += window[j] * c[std::abs(l - j)];
    half[l] = sum;
  }
  return symmetric_spectrum(half, l_max);
}

cdouble talbot_A(const FourierSpectrum& a, int l)
{
  cdouble sum = 0.0;
  for (int j = -a.l_max; j <= a.l_max; ++j)
    sum += a[j] * std::conj(a[j - l]);
  return sum;
}

cdouble talbot_B(const FourierSpectrum& b, int l, double talbot_ratio)
{
  cdouble sum = 0.0;
  const double ll = static_cast<double>(l) * l;
  for (int j = -b.l_max; j <= b.l_max; ++j) {
    const cdouble bj = b[j], bjl = b[j - l];
    if (bj == 0.0 || bjl == 0.0)
      continue;
    const long double q = std::fmod(0.5L * (ll - 2.0L * j * l) * talbot_ratio, 2.0L);
    sum += bj * std::conj(bjl) * exp_i_pi(static_cast<double>(q));
  }
  return sum;
}

double talbot_A_exact(double f_eff, int l)
{
  if (l == 0)
    return f_eff;
  if (f_eff == 1.0)
    return 0.0;
  return std::sin(pi * l * f_eff) / (pi * l);
}

cdouble talbot_B_exact(const EikonalMask& mask, int l, double talbot_ratio, double abs_tol)
{
  const double d = mask.period(), w = mask.half_width();
  const double ll = static_cast<double>(l) * l;
  const long double q = 0.5L * ll * talbot_ratio;
  const cdouble prefactor = exp_i_pi(static_cast<double>(std::fmod(q, 2.0L)));
  double s = static_cast<double>(std::fmod(0.5L * l * talbot_ratio, 1.0L)) * d;
  s -= d * std::round(s / d);
  const double k = 2.0 * pi * l / d;

  auto plain = [&](double a, double b) -> cdouble {
    if (l == 0)
      return b - a;
    return (std::exp(-I * (k * b)) - std::exp(-I * (k * a))) / (-I * k);
  };

  cdouble total = 0.0;
  for (int n = -1; n <= 1; ++n) {
    const double sigma = s + n * d;
    const double a = std::max(-w, sigma - w), b = std::min(w, sigma + w);
    if (!(b > a))
      continue;
    if (mask.is_null() || sigma == 0.0) {
      total += plain(a, b);
      continue;
    }
    auto dphase = [&](double x) {
      double y = x - sigma;
      y = std::clamp(y, -w, w);
      return mask.phase(x) - mask.phase(y);
    };
    auto theta = [&](double x) { return dphase(x) - k * x; };
    auto dphase_slope = [&](double x) {
      const double y = std::clamp(x - sigma, -w, w);
      return mask.phase_slope(x) - mask.phase_slope(y);
    };
    auto dtheta = [&](double x) { return dphase_slope(x) - k; };

    // Cut where u |dphase'| / 3 reaches the cap (|phase| = cap for a single
    // 1/u^3 edge); this stays valid when two divergent edges nearly meet.
    double cut_a = 0.0, cut_b = 0.0;
    if (mask.singular_edges()) {
      const double half_len = 0.5 * (b - a);
      cut_a = find_edge_cut([&](double u) { return u * dphase_slope(a + u) / 3.0; }, half_len);
      cut_b = find_edge_cut([&](double u) { return u * dphase_slope(b - u) / 3.0; }, half_len);
    }
    const double lo = a + cut_a, hi = b - cut_b;
    if (!(hi > lo))
      continue; // overlap lies entirely in the rapidly oscillating edge zone
    const double tol = abs_tol * d * (hi - lo) / (2.0 * w);
    auto res = quad::integrate_filon([&](double x) { return std::exp(I * dphase(x)); }, lo, hi, k, tol);
    if (!res.converged) {
      std::ostringstream msg;
      msg << "talbot_B_exact: quadrature did not converge at l = " << l << ", window " << w << " m";
      throw NumericalError(msg.str());
    }
    total += res.value;
    if (cut_a > 0.0)
      total += -I * std::exp(I * theta(lo)) / dtheta(lo);
    if (cut_b > 0.0)
      total += I * std::exp(I * theta(hi)) / dtheta(hi);
  }
  return prefactor * total / d;
}

double TalbotSeries::evaluate(double x3) const
{
  if (coefficients.size() == 0)
    return 0.0;
  double s = coefficients[0].real();
  const cdouble step = std::exp(I * (2.0 * pi * x3 / period));
  cdouble phase = 1.0;
  for (Eigen::Index l = 1; l < coefficients.size(); ++l) {
    phase *= step;
    if (l % 64 == 0)
      phase = std::exp(I * (2.0 * pi * static_cast<double>(l) * x3 / period));
    s += 2.0 * (coefficients[l] * phase).real();
  }
  return s;
}

Eigen::VectorXd TalbotSeries::sample(const Eigen::VectorXd& x3) const
{
  Eigen::VectorXd out(x3.size());
  for (Eigen::Index i = 0; i < x3.size(); ++i)
    out[i] = evaluate(x3[i]);
  return out;
}

double TalbotSeries::visibility() const
{
  if (coefficients.size() == 0)
    throw ConfigError("no_transmission");
  cdouble odd = 0.0;
  double even = 0.5 * coefficients[0].real();
  for (Eigen::Index l = 1; l < coefficients.size(); ++l) {
    if (l % 2 == 1)
      odd += coefficients[l];
    else
      even += coefficients[l].real();
  }
  if (!(even > 0.0))
    throw ConfigError("no_transmission");
  return std::abs(odd) / even;
}

TalbotSeries average(const std::vector<TalbotSeries>& series, const std::vector<double>& weights)
{
  TalbotSeries out;
  if (series.empty())
    return out;
  Eigen::Index n = 0;
  for (const auto& s : series)
    n = std::max(n, s.coefficients.size());
  out.period = series.front().period;
  out.coefficients = Eigen::VectorXcd::Zero(n);
  double wsum = 0.0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double wi = weights.empty() ? 1.0 : weights[i];
    out.coefficients.head(series[i].coefficients.size()) += wi * series[i].coefficients;
    wsum += wi;
  }
  out.coefficients /= wsum;
  return out;
}

std::array<CutoffResult, 3> solve_cutoffs(const InterferometerConfig& cfg)
{
  return {solve_cutoff(cfg.g1, cfg.molecule, cfg.v_z), solve_cutoff(cfg.g2, cfg.molecule, cfg.v_z),
          solve_cutoff(cfg.g3, cfg.molecule, cfg.v_z)};
}

namespace {

SignalResult assemble(const InterferometerConfig& cfg, const std::array<CutoffResult, 3>& cutoffs,
                      const EngineOptions& opt)
{
  SignalResult out;
  out.cutoffs = cutoffs;
  const double d = cfg.g1.period;
  out.wavelength = de_broglie_wavelength(cfg.molecule.mass, cfg.v_z);
  out.talbot_ratio = cfg.separation * out.wavelength / (d * d);

  const double f1 = 2.0 * window_half_width(cfg.g1, cutoffs[0].x_c) / d;
  const double f3 = 2.0 * window_half_width(cfg.g3, cutoffs[2].x_c) / d;
  const EikonalMask mask(cfg.g2, cfg.molecule, cfg.v_z, cutoffs[1].x_c);
  out.effective_fraction = {f1, 2.0 * mask.half_width() / d, f3};

  std::vector<cdouble> coeffs;
  auto extend = [&](int L) {
    for (int l = static_cast<int>(coeffs.size()); l <= L; ++l) {
      const double a = talbot_A_exact(f1, l) * talbot_A_exact(f3, l);
      coeffs.push_back(a == 0.0 ? cdouble{} : a * talbot_B_exact(mask, 2 * l, out.talbot_ratio));
    }
  };
  auto series_of = [&](int L) {
    TalbotSeries s;
    s.period = d;
    s.coefficients = Eigen::Map<const Eigen::VectorXcd>(coeffs.data(), L + 1);
    return s;
  };

  int L = std::max(1, opt.l_max_initial);
  extend(L);
  TalbotSeries coarse = series_of(L);
  while (true) {
    const int L2 = 2 * L;
    if (L2 > opt.l_max_limit) {
      std::ostringstream msg;
      msg << "truncation: l_max limit " << opt.l_max_limit << " reached";
      throw NumericalError(msg.str());
    }
    extend(L2);
    TalbotSeries fine = series_of(L2);
    double change = 0.0;
    for (int l = L + 1; l <= L2; ++l)
      change += 2.0 * std::abs(coeffs[l]);
    const double dc = fine.dc_level();
    const double dvis = std::abs(fine.visibility() - coarse.visibility());
    if (change <= opt.truncation_tol * dc && dvis <= opt.truncation_tol) {
      out.series = std::move(fine);
      return out;
    }
    L = L2;
    coarse = std::move(fine);
  }
}

} // namespace

SignalResult compute_signal(const InterferometerConfig& cfg, const EngineOptions& opt)
{
  cfg.validate();
  return assemble(cfg, solve_cutoffs(cfg), opt);
}

SignalResult compute_signal(const InterferometerConfig& cfg, const std::array<double, 3>& x_c,
                            const EngineOptions& opt)
{
  cfg.validate();
  std::array<CutoffResult, 3> cutoffs;
  for (int i = 0; i < 3; ++i) {
    cutoffs[i].x_c = x_c[i];
    cutoffs[i].converged = true;
    cutoffs[i].diagnostic = "prescribed";
  }
  return assemble(cfg, cutoffs, opt);
}

FringeResult sample_fringe(const TalbotSeries& series, int n)
{
  FringeResult out;
  const double d = series.period;
  out.x3 = Eigen::VectorXd::LinSpaced(n, -0.5 * d, 0.5 * d - d / n);
  out.S = series.sample(out.x3);
  out.dc_level = series.dc_level();
  out.visibility = series.visibility();
  if (out.S.minCoeff() < -1e-5 * out.dc_level)
    throw NumericalError("truncation: negative signal");
  return out;
}

FringeResult signal(const InterferometerConfig& cfg, const EngineOptions& opt)
{
  return sample_fringe(compute_signal(cfg, opt).series, std::max(256, opt.x3_samples));
}

double visibility(const InterferometerConfig& cfg, const EngineOptions& opt)
{
  return compute_signal(cfg, opt).series.visibility();
}

std::vector<std::pair<double, double>> visibility_curve(const InterferometerConfig& cfg, double v_min,
                                                        double v_max, int n, const EngineOptions& opt)
{
  if (!(v_min > 0.0) || !(v_max >= v_min) || n < 1)
    throw ConfigError("v_range");
  std::vector<std::pair<double, double>> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    InterferometerConfig c = cfg;
    c.v_z = n == 1 ? v_min : v_min + (v_max - v_min) * i / (n - 1);
    out.emplace_back(c.v_z, visibility(c, opt));
  }
  return out;
}

TalbotSeries bin_averaged_series(const InterferometerConfig& cfg, double v_lo, double v_hi, int nodes,
                                 const EngineOptions& opt)
{
  if (!(v_lo > 0.0) || !(v_hi > v_lo))
    throw ConfigError("v_range");
  const quad::Rule rule = quad::gauss_legendre(nodes);
  std::vector<TalbotSeries> series;
  std::vector<double> weights;
  for (int i = 0; i < nodes; ++i) {
    InterferometerConfig c = cfg;
    c.v_z = 0.5 * (v_lo + v_hi) + 0.5 * (v_hi - v_lo) * rule.nodes[i];
    series.push_back(compute_signal(c, opt).series);
    weights.push_back(rule.weights[i]);
  }
  return average(series, weights);
}

} // namespace talbot
