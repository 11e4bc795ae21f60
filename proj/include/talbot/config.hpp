#ifndef TALBOT_CONFIG_HPP
#define TALBOT_CONFIG_HPP

#include "talbot/oracle.hpp"
#include "talbot/scenarios.hpp"
#include "talbot/talbot_engine.hpp"

#include <filesystem>
#include <optional>
#include <string>

namespace talbot {

/// Per-grating description used by the `custom` scenario.
struct CustomGrating
{
  WallModel wall = IdealWall{};
  CutoffRule cutoff = FlyThrough{};
};

/// A validated run description. JSON layout:
///
///   {
///     "scenario": "perfect_chiral_g2" | "coated_g2" | "all_coated" | "custom",
///     "molecule": {"mass_da", "omega1_rad_s", "R01_cgs_1e40", "g_e", "g_m"},
///     "geometry": {"d_nm", "b_nm", "L_mm", "f", "a_nm", "n_B_per_m3",
///                  "theta_g1_mrad", "theta_g2_mrad"},
///     "run": {"v_z_mps" | "v_range": {"min", "max", "bin"}, "x3_samples",
///             "l_max", "velocity_nodes", "tolerances": {"truncation"}},
///     "sweep": {"R_min_cgs_1e40", "R_max_cgs_1e40", "n_R", "g_e_min",
///               "g_e_max", "n_g_e", "g_m"},
///     "oracle": {"samples_per_period", "subsamples", "max_unresolved_fraction",
///                "L_over_L_lambda", "visibility_tol", "rms_tol"},
///     "gratings": {"g1" | "g2" | "g3": {"wall", "handedness", "r", "r_c",
///                  "cutoff", "theta_mrad"}},          (custom only)
///     "output": {"directory"}
///   }
///
/// The magnitude of R01 describes the molecule; both enantiomers are always
/// run. The sign of R01 sets the handedness of the chiral walls (+ right,
/// - left), and R01 = 0 switches chirality off entirely.
struct RunConfig
{
  std::string scenario = "perfect_chiral_g2";
  ScenarioParams params;
  int wall_handedness = 1;
  std::optional<std::array<CustomGrating, 3>> custom;

  std::optional<double> v_z;
  std::optional<VelocityBins> v_range;
  int x3_samples = 512;
  int velocity_nodes = 11;
  EngineOptions engine;

  std::optional<SweepGrid> sweep;

  WaveGrid oracle_grid;
  std::optional<double> oracle_talbot_ratio;
  OracleTolerances oracle_tol;

  std::filesystem::path output_dir = ".";

  /// Left- and right-handed interferometers at velocity v_z.
  EnantiomerPair pair(double v_z) const;
};

/// Parses and validates; throws ConfigError with the offending key.
RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::filesystem::path& path);

} // namespace talbot

#endif
