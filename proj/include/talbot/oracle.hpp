#ifndef TALBOT_ORACLE_HPP
#define TALBOT_ORACLE_HPP

#include "talbot/domain.hpp"
#include "talbot/talbot_engine.hpp"

#include <Eigen/Dense>

#include <array>
#include <string>

namespace talbot {

/// Sampling of one grating period for the brute-force wave oracle.
///
/// A point source at x0 on G1 produces |u((x0 + x3) / 2)|^2 / (2 lambda L)
/// on the G3 plane, where u is a plane wave that passed G2 and flew L / 2.
/// With u on `samples_per_period` points (spacing delta), sources and
/// detector positions live on the 2 delta sub-lattice, and every source in
/// two periods of G1 is summed incoherently.
struct WaveGrid
{
  int samples_per_period = 8192; ///< power of two, >= 16
  int subsamples = 64;           ///< midpoint points per cell for the G2 phase average
  bool propagate = true;         ///< false: geometric (ray) limit, u = t2
  /// Largest part of the G2 window on which the eikonal phase may step by
  /// more than pi between samples (divergent edges are never resolved).
  double max_unresolved_fraction = 0.02;

  void validate() const;
};

/// Cell-averaged transmissions on cells of width d / n centred at j d / n.
Eigen::VectorXcd rasterize_amplitude(const GratingSpec& spec, const Molecule& mol, double v_z, double x_c, int n,
                                     int subsamples);
Eigen::VectorXd rasterize_intensity(const GratingSpec& spec, double x_c, int n);

/// Periodic paraxial free flight over distance z: each Fourier component
/// k / d is multiplied by exp(-i pi lambda z (k / d)^2).
Eigen::VectorXcd free_flight(const Eigen::VectorXcd& field, double period, double wavelength, double z);

struct OracleResult
{
  FringeResult fringe; ///< x3 in [-d/2, d/2), spacing 2 d / samples
  /// |S(0) - S(d/2)| / (S(0) + S(d/2)), comparable to TalbotSeries::visibility.
  double visibility = 0.0;
  /// (S_max - S_min) / (S_max + S_min) on the sample grid.
  double visibility_sampled = 0.0;
  /// Same with half the sources and samples.
  double visibility_coarse = 0.0;
  bool source_converged = false;
};

/// Throws ConfigError("Nyquist: ...") when the grid cannot resolve the
/// masks or the eikonal phase.
void check_nyquist(const InterferometerConfig& cfg, const std::array<double, 3>& x_c, const WaveGrid& grid);

OracleResult propagate_three_gratings(const InterferometerConfig& cfg, const std::array<double, 3>& x_c,
                                      const WaveGrid& grid);

/// Geometric three-mask shadow: rays x0 -> x2 -> x3 = 2 x2 - x0 binned on
/// `bins` detector cells. Returns |S(0) - S(d/2)| / (S(0) + S(d/2)).
double ray_shadow_visibility(const InterferometerConfig& cfg, const std::array<double, 3>& x_c, int bins,
                             int rays_per_bin = 8);

struct OracleComparison
{
  Eigen::VectorXd x3;
  Eigen::VectorXd S_engine;
  Eigen::VectorXd S_oracle;
  double visibility_engine = 0.0;
  double visibility_oracle = 0.0;
  double rms_relative = 0.0; ///< RMS(S_engine - S_oracle) / dc
  bool source_converged = false;
  bool pass = false;
  std::string diagnostic;
};

struct OracleTolerances
{
  double visibility = 0.01;
  double rms = 0.02;
  double source_convergence = 0.002;
};

/// Runs both sides with the same cut-off distances (taken from the cutoff
/// module) and compares them.
OracleComparison compare_with_engine(const InterferometerConfig& cfg, const WaveGrid& grid,
                                     const EngineOptions& opt = {}, const OracleTolerances& tol = {});

} // namespace talbot

#endif
