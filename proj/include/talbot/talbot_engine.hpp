#ifndef TALBOT_TALBOT_ENGINE_HPP
#define TALBOT_TALBOT_ENGINE_HPP

#include "talbot/cutoff.hpp"
#include "talbot/domain.hpp"
#include "talbot/potentials.hpp"

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <utility>
#include <vector>

namespace talbot {

using cdouble = std::complex<double>;

/// Fourier coefficients c_l, |l| <= l_max, of a periodic transmission function.
struct FourierSpectrum
{
  Eigen::VectorXcd coefficients; ///< index l + l_max
  int l_max = 0;
  double tail_bound = 0.0; ///< max |c_l| at |l| = l_max

  cdouble operator[](int l) const
  {
    return std::abs(l) > l_max ? cdouble{} : coefficients[l + l_max];
  }
};

/// Coefficients of a centred binary window of open fraction f_eff:
/// a_l = sin(pi l f) / (pi l), a_0 = f.
FourierSpectrum geometric_coeffs(double f_eff, double d, int l_max);

/// Phase-dressed transmission of the second grating, t(x) = 1_W(x) exp(-i phi(x)),
/// phi = m b V_slit / (p_z hbar), window |x| <= x_o - a - x_c.
///
/// When the window edge sits on a divergent wall (x_c = 0 with a non-zero
/// potential) the phase oscillates without bound near the edge; integrals are
/// cut where |phi| reaches `phase_cap` and the remainder is replaced by its
/// leading integration-by-parts term.
class EikonalMask
{
public:
  EikonalMask(const GratingSpec& spec, const Molecule& mol, double v_z, double x_c);

  double half_width() const { return w_; }
  double period() const { return d_; }
  bool is_null() const { return slit_.is_null(); }
  bool singular_edges() const { return singular_; }
  double phase(double x) const { return kappa_ * slit_.value(x); }
  double phase_slope(double x) const { return kappa_ * slit_.slope(x); }
  /// Distance from the window edge inside which the phase exceeds phase_cap.
  double edge_cut() const { return edge_cut_; }

  static constexpr double phase_cap = 200.0;

private:
  SlitPotential slit_;
  double d_ = 0.0;
  double w_ = 0.0;
  double kappa_ = 0.0;
  bool singular_ = false;
  double edge_cut_ = 0.0;
};

/// b_l by direct windowed integration (vector adaptive Gauss-Kronrod).
FourierSpectrum eikonal_coeffs(const GratingSpec& spec, const Molecule& mol, double v_z, double x_c, int l_max,
                               double rel_tol = 1e-10);

/// b_l via the convolution b_l = sum_j b'_j c_{l-j}, where b' is the window
/// and c the full-period coefficients of a C^1 periodic continuation of the
/// phase factor across the blocked part of the period. Only defined for
/// windows whose edge phase is finite. `j_max` bounds the convolution sum.
FourierSpectrum eikonal_coeffs_convolution(const GratingSpec& spec, const Molecule& mol, double v_z, double x_c,
                                           int l_max, int j_max = 2048);

/// Truncated autocorrelation A_l = sum_j a_j a*_{j-l}.
cdouble talbot_A(const FourierSpectrum& a, int l);
/// Truncated B_l = sum_j b_j b*_{j-l} exp(i pi (l^2 - 2 j l) / 2 * L/L_lambda).
cdouble talbot_B(const FourierSpectrum& b, int l, double talbot_ratio);

/// Exact A_l of a binary window (the Fourier coefficient of |t|^2).
double talbot_A_exact(double f_eff, int l);
/// Exact B_l from the real-space overlap of the mask with its copy shifted by
/// s = l (L/L_lambda) d / 2:
///   B_l = exp(i pi l^2 t / 2) (1/d) int t(x - s) t*(x) exp(-2 pi i l x / d) dx.
cdouble talbot_B_exact(const EikonalMask& mask, int l, double talbot_ratio, double abs_tol = 1e-12);

/// Harmonic content of the detector signal: S(x3) = sum_l C_l exp(2 pi i l x3 / d),
/// stored for l >= 0 (C_{-l} = conj(C_l)).
struct TalbotSeries
{
  double period = 0.0;
  Eigen::VectorXcd coefficients;

  int l_max() const { return static_cast<int>(coefficients.size()) - 1; }
  double dc_level() const { return coefficients.size() ? coefficients[0].real() : 0.0; }
  double evaluate(double x3) const;
  Eigen::VectorXd sample(const Eigen::VectorXd& x3) const;
  /// Sinusoidal visibility from the alternating harmonic sums.
  double visibility() const;
};

/// Weighted average of several series (zero-padded to the longest); equal
/// weights when `weights` is empty.
TalbotSeries average(const std::vector<TalbotSeries>& series, const std::vector<double>& weights = {});

struct EngineOptions
{
  int l_max_initial = 64;
  int l_max_limit = 16384;
  /// Doubling l_max must change every S sample by at most tol * dc and the
  /// visibility by at most tol.
  double truncation_tol = 1e-6;
  int x3_samples = 512;
};

struct SignalResult
{
  TalbotSeries series;
  std::array<CutoffResult, 3> cutoffs;
  double talbot_ratio = 0.0; ///< L / L_lambda
  double wavelength = 0.0;
  std::array<double, 3> effective_fraction{};
};

/// G1 and G2 by deflection, G3 by fly-through (as configured per grating).
std::array<CutoffResult, 3> solve_cutoffs(const InterferometerConfig& cfg);

/// Full pipeline: cut-offs, coefficients, truncation control.
SignalResult compute_signal(const InterferometerConfig& cfg, const EngineOptions& opt = {});

/// Same pipeline with externally supplied cut-off distances (metres from the
/// accessible surface of G1, G2, G3).
SignalResult compute_signal(const InterferometerConfig& cfg, const std::array<double, 3>& x_c,
                            const EngineOptions& opt = {});

struct FringeResult
{
  Eigen::VectorXd x3;
  Eigen::VectorXd S;
  double visibility = 0.0;
  double dc_level = 0.0;
};

/// S sampled on n points per period over [-d/2, d/2).
FringeResult sample_fringe(const TalbotSeries& series, int n);
FringeResult signal(const InterferometerConfig& cfg, const EngineOptions& opt = {});
double visibility(const InterferometerConfig& cfg, const EngineOptions& opt = {});

/// Visibility at n equally spaced velocities in [v_min, v_max].
std::vector<std::pair<double, double>> visibility_curve(const InterferometerConfig& cfg, double v_min,
                                                        double v_max, int n, const EngineOptions& opt = {});

/// Series averaged over [v_lo, v_hi] with an n-point Gauss-Legendre rule.
TalbotSeries bin_averaged_series(const InterferometerConfig& cfg, double v_lo, double v_hi, int nodes = 11,
                                 const EngineOptions& opt = {});

} // namespace talbot

#endif
