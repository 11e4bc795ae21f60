#include "talbot/oracle.hpp"

#include "talbot/errors.hpp"
#include "talbot/potentials.hpp"
#include "talbot/units.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace talbot {

namespace {

constexpr double pi = std::numbers::pi;

// Position folded into [-d/2, d/2).
double fold(double x, double d) { return x - d * std::floor(x / d + 0.5); }

double window_of(const GratingSpec& spec, double x_c)
{
  const double w = spec.accessible_half_width() - x_c;
  if (!(w > 0.0))
    throw ConfigError("slit_closed");
  return w;
}

// Length of [lo, hi] inside the periodic window |x| <= w.
double open_length(double lo, double hi, double w, double d)
{
  double len = 0.0;
  const double c = fold(0.5 * (lo + hi), d);
  const double shift = c - 0.5 * (lo + hi);
  for (int n = -1; n <= 1; ++n) {
    const double a = std::max(lo + shift, -w + n * d), b = std::min(hi + shift, w + n * d);
    if (b > a)
      len += b - a;
  }
  return len;
}

bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

struct Fringe
{
  Eigen::VectorXd x3, S;
};

Fringe oracle_fringe(const InterferometerConfig& cfg, const std::array<double, 3>& x_c, const WaveGrid& grid)
{
  const int M = grid.samples_per_period, H = M / 2;
  const double d = cfg.g1.period;
  const double lambda = de_broglie_wavelength(cfg.molecule.mass, cfg.v_z);

  Eigen::VectorXcd u = rasterize_amplitude(cfg.g2, cfg.molecule, cfg.v_z, x_c[1], M, grid.subsamples);
  if (grid.propagate)
    u = free_flight(u, d, lambda, 0.5 * cfg.separation);
  const Eigen::VectorXd I2 = u.cwiseAbs2();
  const Eigen::VectorXd T1 = rasterize_intensity(cfg.g1, x_c[0], H);
  const Eigen::VectorXd T3 = rasterize_intensity(cfg.g3, x_c[2], H);

  // w(x_q) = (1/M) sum_p T1(x0_p) I2(p + q), x0 over two periods of G1.
  Eigen::VectorXd w = Eigen::VectorXd::Zero(H);
  for (int q = 0; q < H; ++q) {
    double acc = 0.0;
    for (int p = 0; p < M; ++p)
      acc += T1[p % H] * I2[(p + q) % M];
    w[q] = acc / M;
  }

  Fringe out;
  out.x3.resize(H);
  out.S.resize(H);
  for (int i = 0; i < H; ++i) {
    const int r = i - H / 2; // x3 = 2 r delta, r in [-H/2, H/2)
    double acc = 0.0;
    for (int q = 0; q < H; ++q)
      acc += w[q] * T3[((q - r) % H + H) % H];
    out.x3[i] = 2.0 * r * d / M;
    out.S[i] = acc / H;
  }
  return out;
}

double endpoint_visibility(const Eigen::VectorXd& S, int i0, int ihalf)
{
  const double a = S[i0], b = S[ihalf];
  if (!(a + b > 0.0))
    throw ConfigError("no_transmission");
  return std::abs(a - b) / (a + b);
}

} // namespace

void WaveGrid::validate() const
{
  if (!is_pow2(samples_per_period) || samples_per_period < 16)
    throw ConfigError("grid: samples_per_period must be a power of two >= 16");
  if (subsamples < 1)
    throw ConfigError("grid: subsamples");
  if (!(max_unresolved_fraction >= 0.0 && max_unresolved_fraction < 1.0))
    throw ConfigError("grid: max_unresolved_fraction");
}

Eigen::VectorXcd rasterize_amplitude(const GratingSpec& spec, const Molecule& mol, double v_z, double x_c, int n,
                                     int subsamples)
{
  const double d = spec.period, delta = d / n;
  const double w = window_of(spec, x_c);
  const SlitPotential slit(spec, mol);
  const double kappa = spec.thickness / (v_z * si::hbar);
  Eigen::VectorXcd t = Eigen::VectorXcd::Zero(n);
  for (int j = 0; j < n; ++j) {
    const double c = fold(j * delta, d);
    const double lo = std::max(c - 0.5 * delta, -w), hi = std::min(c + 0.5 * delta, w);
    if (!(hi > lo))
      continue;
    std::complex<double> acc = 0.0;
    const double h = (hi - lo) / subsamples;
    for (int s = 0; s < subsamples; ++s) {
      const double x = lo + (s + 0.5) * h;
      acc += slit.is_null() ? std::complex<double>(1.0) : std::polar(1.0, -kappa * slit.value(x));
    }
    t[j] = acc * h / delta;
  }
  // Cells straddling the period boundary (only when the window nearly fills it).
  if (2.0 * w > d - delta)
    for (int j = 0; j < n; ++j)
      if (slit.is_null())
        t[j] = open_length(j * delta - 0.5 * delta, j * delta + 0.5 * delta, w, d) / delta;
  return t;
}

Eigen::VectorXd rasterize_intensity(const GratingSpec& spec, double x_c, int n)
{
  const double d = spec.period, delta = d / n;
  const double w = window_of(spec, x_c);
  Eigen::VectorXd t(n);
  for (int j = 0; j < n; ++j)
    t[j] = open_length(j * delta - 0.5 * delta, j * delta + 0.5 * delta, w, d) / delta;
  return t;
}

Eigen::VectorXcd free_flight(const Eigen::VectorXcd& field, double period, double wavelength, double z)
{
  const Eigen::Index n = field.size();
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> in(field.data(), field.data() + n), spec;
  fft.fwd(spec, in);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double m = static_cast<double>(k <= n / 2 ? k : k - n);
    const double nu = m / period;
    // pi lambda z nu^2 reduced modulo 2 pi before forming the phase factor.
    const double phase = std::fmod(pi * wavelength * z * nu * nu, 2.0 * pi);
    spec[k] *= std::polar(1.0, -phase);
  }
  std::vector<std::complex<double>> out;
  fft.inv(out, spec);
  return Eigen::Map<Eigen::VectorXcd>(out.data(), n);
}

void check_nyquist(const InterferometerConfig& cfg, const std::array<double, 3>& x_c, const WaveGrid& grid)
{
  grid.validate();
  const double d = cfg.g1.period, delta = d / grid.samples_per_period;
  const GratingSpec* g[3] = {&cfg.g1, &cfg.g2, &cfg.g3};
  for (int i = 0; i < 3; ++i) {
    // G1 and G3 live on the 2 delta lattice.
    const double cell = i == 1 ? delta : 2.0 * delta;
    const double w = window_of(*g[i], x_c[i]);
    if (2.0 * w < 8.0 * cell) {
      std::ostringstream msg;
      msg << "Nyquist: G" << i + 1 << " window spans " << 2.0 * w / cell << " samples (< 8)";
      throw ConfigError(msg.str());
    }
  }
  // Eikonal phase step between neighbouring samples. Near a divergent wall
  // the step is never resolved; there the cell average takes over, as long
  // as that zone is a small part of the window.
  const SlitPotential slit(cfg.g2, cfg.molecule);
  if (slit.is_null())
    return;
  const double kappa = cfg.g2.thickness / (cfg.v_z * si::hbar);
  const double w = window_of(cfg.g2, x_c[1]);
  const int probes = 4096;
  int bad = 0;
  double worst = 0.0;
  for (int i = 0; i < probes; ++i) {
    const double x = (i + 0.5) / probes * w;
    const double step = std::abs(kappa * slit.slope(x)) * delta;
    if (step > pi)
      ++bad;
    worst = std::max(worst, step);
  }
  if (bad > grid.max_unresolved_fraction * probes) {
    std::ostringstream msg;
    msg << "Nyquist: eikonal phase step exceeds pi over " << 100.0 * bad / probes
        << "% of the G2 window (max " << worst << " rad)";
    throw ConfigError(msg.str());
  }
}

OracleResult propagate_three_gratings(const InterferometerConfig& cfg, const std::array<double, 3>& x_c,
                                      const WaveGrid& grid)
{
  cfg.validate();
  check_nyquist(cfg, x_c, grid);
  const int H = grid.samples_per_period / 2;
  const Fringe fine = oracle_fringe(cfg, x_c, grid);

  OracleResult res;
  res.fringe.x3 = fine.x3;
  res.fringe.S = fine.S;
  res.fringe.dc_level = fine.S.mean();
  res.visibility = endpoint_visibility(fine.S, H / 2, 0);
  const double smax = fine.S.maxCoeff(), smin = fine.S.minCoeff();
  res.visibility_sampled = (smax - smin) / (smax + smin);
  res.fringe.visibility = res.visibility;

  WaveGrid half = grid;
  half.samples_per_period /= 2;
  if (half.samples_per_period >= 16) {
    const Fringe coarse = oracle_fringe(cfg, x_c, half);
    res.visibility_coarse = endpoint_visibility(coarse.S, H / 4, 0);
    res.source_converged = std::abs(res.visibility_coarse - res.visibility) <= 0.002;
  }
  return res;
}

double ray_shadow_visibility(const InterferometerConfig& cfg, const std::array<double, 3>& x_c, int bins,
                             int rays_per_bin)
{
  cfg.validate();
  if (bins < 4 || bins % 2 != 0 || rays_per_bin < 1)
    throw ConfigError("bins");
  const double d = cfg.g1.period;
  const double w1 = window_of(cfg.g1, x_c[0]), w2 = window_of(cfg.g2, x_c[1]), w3 = window_of(cfg.g3, x_c[2]);
  const int n = bins * rays_per_bin;
  const double step = d / n;

  std::vector<double> x0, x2;
  for (int i = 0; i < n; ++i) {
    const double x = -0.5 * d + (i + 0.5) * step;
    if (std::abs(x) <= w1)
      x0.push_back(x);
    if (std::abs(x) <= w2)
      x2.push_back(x);
  }
  // Landing histogram on bins centred at k d / bins.
  Eigen::VectorXd hist = Eigen::VectorXd::Zero(bins);
  for (double a : x0)
    for (double b : x2) {
      const double x3 = fold(2.0 * b - a, d);
      const int k = static_cast<int>(std::floor(x3 / d * bins + 0.5));
      hist[((k % bins) + bins) % bins] += 1.0;
    }
  // Detector: fraction of each bin seen through G3 displaced by x3.
  auto S = [&](double shift) {
    double acc = 0.0;
    for (int k = 0; k < bins; ++k) {
      const double c = k * d / bins - shift;
      acc += hist[k] * open_length(c - 0.5 * d / bins, c + 0.5 * d / bins, w3, d) * bins / d;
    }
    return acc;
  };
  const double s0 = S(0.0), sh = S(0.5 * d);
  return std::abs(s0 - sh) / (s0 + sh);
}

OracleComparison compare_with_engine(const InterferometerConfig& cfg, const WaveGrid& grid, const EngineOptions& opt,
                                     const OracleTolerances& tol)
{
  const auto cut = solve_cutoffs(cfg);
  const std::array<double, 3> x_c{cut[0].x_c, cut[1].x_c, cut[2].x_c};
  const SignalResult eng = compute_signal(cfg, x_c, opt);
  const OracleResult orc = propagate_three_gratings(cfg, x_c, grid);

  OracleComparison c;
  c.x3 = orc.fringe.x3;
  c.S_oracle = orc.fringe.S;
  c.S_engine = eng.series.sample(c.x3);
  c.visibility_engine = eng.series.visibility();
  c.visibility_oracle = orc.visibility;
  const double dc = eng.series.dc_level();
  c.rms_relative = std::sqrt((c.S_engine - c.S_oracle).squaredNorm() / c.x3.size()) / dc;
  c.source_converged = orc.source_converged;

  std::ostringstream msg;
  msg << "visibility engine " << c.visibility_engine << " oracle " << c.visibility_oracle << ", rms/dc "
      << c.rms_relative << ", oracle refinement change " << std::abs(orc.visibility - orc.visibility_coarse);
  c.diagnostic = msg.str();
  c.pass = std::abs(c.visibility_engine - c.visibility_oracle) <= tol.visibility && c.rms_relative <= tol.rms &&
           std::abs(orc.visibility - orc.visibility_coarse) <= tol.source_convergence;
  return c;
}

} // namespace talbot
