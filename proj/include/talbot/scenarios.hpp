#ifndef TALBOT_SCENARIOS_HPP
#define TALBOT_SCENARIOS_HPP

#include "talbot/domain.hpp"
#include "talbot/talbot_engine.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace talbot {

enum class Scenario
{
  PerfectChiralG2, ///< G1, G3 bare SiN; G2 a perfect right-handed chiral mirror
  CoatedG2,        ///< G1, G3 bare SiN; G2 SiN coated with right-handed molecules
  AllCoated,       ///< all three gratings coated with right-handed molecules
};

std::string to_string(Scenario s);
/// Accepts perfect_chiral_g2, coated_g2, all_coated.
Scenario scenario_from_string(const std::string& name);

/// Flat parameter set from which a scenario builds its interferometer.
/// Lengths in metres; R in units of 1e-40 cgs (magnitude; the sign is set
/// per enantiomer).
struct ScenarioParams
{
  Scenario scenario = Scenario::PerfectChiralG2;
  double mass_da = 0.0;
  double omega1 = 0.0;
  double R_cgs_1e40 = 0.0;
  std::optional<double> g_e;
  std::optional<double> g_m;
  double d = 0.0;
  double b = 0.0;
  double L = 0.0;
  double f = 0.0;
  double a = 0.0;   ///< coating thickness
  double n_B = 0.0; ///< coating number density
  double v_z = 0.0;
  double theta_g1 = 1e-3;
  double theta_g2 = 2e-3;
  /// Switch every chiral coupling of the walls off (the molecule keeps R).
  bool chiral_walls = true;
};

/// Preset parameters: fig2i, fig2ii, fig3i, fig3ii, fig4i, fig4ii, fig5.
ScenarioParams preset(const std::string& name);

/// Left- and right-handed runs; they differ only in the sign of R01 of the
/// matter-wave molecule.
struct EnantiomerPair
{
  InterferometerConfig left;
  InterferometerConfig right;
};

EnantiomerPair make_pair(const ScenarioParams& p);

/// Signal on n uniform points over [-2 f d, 2 f d].
FringeResult fringe_window(const TalbotSeries& series, double f, int n = 1025);

/// (1 / 4fd) int_{-2fd}^{2fd} (S_L - S_R) / S_L dx3 by the trapezoidal rule.
/// Both fringes must share an x3 grid spanning [-2fd, 2fd].
double delta_s(const FringeResult& fringe_L, const FringeResult& fringe_R, double f, double d);

struct VelocityBins
{
  double v_min = 100.0;
  double v_max = 200.0;
  double bin = 10.0;

  int count() const;
  double center(int i) const;
  void validate() const;
};

struct BinMetrics
{
  double v_center = 0.0;
  double vis_left = 0.0;
  double vis_right = 0.0;
  double delta_s = 0.0;
};

/// Bin-averaged visibilities and per-bin delta S for an enantiomer pair.
std::vector<BinMetrics> bin_metrics(const EnantiomerPair& pair, const VelocityBins& bins, int nodes = 11,
                                    const EngineOptions& opt = {});

/// max over bins of |V_L - V_R|.
double delta_v_max(const std::vector<BinMetrics>& bins);
double delta_v_max(const EnantiomerPair& pair, const VelocityBins& bins, int nodes = 11,
                   const EngineOptions& opt = {});
/// max over bins of the per-bin delta S.
double delta_s_max(const std::vector<BinMetrics>& bins);

struct SweepGrid
{
  std::vector<double> R_values;   ///< 1e-40 cgs
  std::vector<double> g_e_values;
  VelocityBins velocities;
  double g_m = 5.0;
  int nodes = 11;

  /// R log-spaced over [100, 10000], g_e linear over [0.1, 0.5].
  static SweepGrid make_default(int n_R = 21, int n_g = 17);
  void validate() const;
};

struct SweepCell
{
  double R_cgs_1e40 = 0.0;
  double g_e = 0.0;
  double delta_s = 0.0;
  double delta_v_max = 0.0;
  bool ok = false;
  std::string error;
};

struct SweepOptions
{
  int threads = 1;
  EngineOptions engine;
  /// Completed cells are appended here and skipped on a rerun.
  std::optional<std::filesystem::path> journal;
};

/// Row-major (R outer, g_e inner) sweep of the AllCoated scenario built from
/// `base`, with the molecule and coating parameters replaced per cell.
std::vector<SweepCell> run_sweep(const SweepGrid& grid, const ScenarioParams& base, const SweepOptions& opt = {});

} // namespace talbot

#endif
