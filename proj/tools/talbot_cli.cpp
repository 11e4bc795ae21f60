// talbot: command-line driver for the chiral Talbot-Lau simulation.
//
//   talbot fringe       CONFIG   -> fringe.csv, meta.json
//   talbot visibility   CONFIG   -> visibility.csv, meta.json
//   talbot sweep        CONFIG   -> sweep.csv, sweep.journal, meta.json
//   talbot oracle-check CONFIG   -> oracle.csv, meta.json (exit 4 on mismatch)
//   talbot potential    CONFIG   -> potential.csv
//
// Exit codes: 0 ok, 2 configuration error, 3 numerical error, 4 oracle mismatch.

#include "talbot/config.hpp"
#include "talbot/cutoff.hpp"
#include "talbot/errors.hpp"
#include "talbot/output.hpp"
#include "talbot/units.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <thread>

using namespace talbot;

namespace {

struct OracleMismatch : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

int worker_count(int flag)
{
  if (flag > 0)
    return flag;
  if (const char* env = std::getenv("TALBOT_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0)
      return n;
    throw ConfigError("TALBOT_THREADS must be a positive integer");
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::string rule_name(const CutoffRule& r) { return std::holds_alternative<Deflection>(r) ? "deflection" : "fly_through"; }

void record_common(MetaRecord& meta, const RunConfig& cfg, const std::string& command)
{
  meta.set("tool", "talbot");
  meta.set("version", tool_version);
  meta.set("command", command);
  meta.set("scenario", cfg.scenario);
  meta.set("mass_da", cfg.params.mass_da);
  meta.set("R01_cgs_1e40", cfg.wall_handedness * cfg.params.R_cgs_1e40);
  meta.set("d_nm", cfg.params.d / nm);
  meta.set("L_mm", cfg.params.L / mm);
  meta.set("f", cfg.params.f);
  meta.set("truncation_tol", cfg.engine.truncation_tol);
  meta.set("l_max_limit", static_cast<long long>(cfg.engine.l_max_limit));
}

void record_signal(MetaRecord& meta, const std::string& tag, const SignalResult& r)
{
  const char* g[3] = {"g1", "g2", "g3"};
  for (int i = 0; i < 3; ++i) {
    meta.set("x_c_" + tag + "_" + g[i] + "_nm", r.cutoffs[i].x_c / nm);
    meta.set(std::string("cutoff_rule_") + g[i], rule_name(r.cutoffs[i].rule));
  }
  meta.set("L_over_L_lambda", r.talbot_ratio);
  meta.set("wavelength_pm", r.wavelength * 1e12);
  meta.set("l_max_" + tag, static_cast<long long>(r.series.l_max()));
  meta.set("visibility_" + tag, r.series.visibility());
  meta.set("mean_transmission_" + tag, r.series.dc_level());
}

double fringe_velocity(const RunConfig& cfg)
{
  if (!cfg.v_z)
    throw ConfigError("run.v_z_mps required for this command");
  return *cfg.v_z;
}

void cmd_fringe(const RunConfig& cfg, const std::filesystem::path& dir)
{
  const EnantiomerPair pair = cfg.pair(fringe_velocity(cfg));
  const SignalResult left = compute_signal(pair.left, cfg.engine);
  const SignalResult right = compute_signal(pair.right, cfg.engine);
  const FringeResult fl = sample_fringe(left.series, cfg.x3_samples);
  const FringeResult fr = sample_fringe(right.series, cfg.x3_samples);
  write_fringe_csv(dir / "fringe.csv", fl.x3, fl.S, fr.S);

  const double f = cfg.params.f, d = cfg.params.d;
  const double ds = delta_s(fringe_window(left.series, f), fringe_window(right.series, f), f, d);
  MetaRecord meta;
  record_common(meta, cfg, "fringe");
  meta.set("v_z_mps", *cfg.v_z);
  record_signal(meta, "left", left);
  record_signal(meta, "right", right);
  meta.set("x3_samples", static_cast<long long>(cfg.x3_samples));
  meta.set("delta_S", ds);
  meta.write(dir / "meta.json");
  std::printf("fringe: %d samples, visibility L %.6g R %.6g, mean L %.6g R %.6g, delta_S %.6g\n", cfg.x3_samples,
              left.series.visibility(), right.series.visibility(), left.series.dc_level(), right.series.dc_level(), ds);
}

void cmd_visibility(const RunConfig& cfg, const std::filesystem::path& dir)
{
  if (!cfg.v_range)
    throw ConfigError("run.v_range required for this command");
  const EnantiomerPair pair = cfg.pair(cfg.v_range->center(0));
  const auto bins = bin_metrics(pair, *cfg.v_range, cfg.velocity_nodes, cfg.engine);
  write_visibility_csv(dir / "visibility.csv", bins);

  MetaRecord meta;
  record_common(meta, cfg, "visibility");
  meta.set("v_min_mps", cfg.v_range->v_min);
  meta.set("v_max_mps", cfg.v_range->v_max);
  meta.set("v_bin_mps", cfg.v_range->bin);
  meta.set("velocity_nodes", static_cast<long long>(cfg.velocity_nodes));
  const SignalResult left = compute_signal(pair.left, cfg.engine);
  const SignalResult right = compute_signal(pair.right, cfg.engine);
  record_signal(meta, "left", left);
  record_signal(meta, "right", right);
  meta.set("delta_V_max", delta_v_max(bins));
  meta.set("delta_S_max", delta_s_max(bins));
  meta.write(dir / "meta.json");
  std::printf("visibility: %zu bins, delta_V_max %.6g, delta_S_max %.6g\n", bins.size(), delta_v_max(bins),
              delta_s_max(bins));
}

void cmd_sweep(const RunConfig& cfg, const std::filesystem::path& dir, int threads)
{
  SweepGrid grid = cfg.sweep ? *cfg.sweep : SweepGrid::make_default();
  if (!cfg.sweep && cfg.v_range)
    grid.velocities = *cfg.v_range;
  ScenarioParams base = cfg.params;
  base.v_z = grid.velocities.center(0);

  SweepOptions opt;
  opt.threads = threads;
  opt.engine = cfg.engine;
  std::filesystem::create_directories(dir);
  opt.journal = dir / "sweep.journal";
  const auto cells = run_sweep(grid, base, opt);
  write_sweep_csv(dir / "sweep.csv", cells);

  MetaRecord meta;
  record_common(meta, cfg, "sweep");
  meta.set("n_R", static_cast<long long>(grid.R_values.size()));
  meta.set("n_g_e", static_cast<long long>(grid.g_e_values.size()));
  meta.set("g_m", grid.g_m);
  meta.set("v_min_mps", grid.velocities.v_min);
  meta.set("v_max_mps", grid.velocities.v_max);
  meta.set("v_bin_mps", grid.velocities.bin);
  meta.set("velocity_nodes", static_cast<long long>(grid.nodes));
  long long failed = 0;
  for (const auto& c : cells)
    if (!c.ok) {
      ++failed;
      std::fprintf(stderr, "cell R=%g g_e=%g failed: %s\n", c.R_cgs_1e40, c.g_e, c.error.c_str());
    }
  meta.set("failed_cells", failed);
  meta.write(dir / "meta.json");
  std::printf("sweep: %zu cells, %lld failed\n", cells.size(), failed);
}

void cmd_oracle(const RunConfig& cfg, const std::filesystem::path& dir, const std::string& hand)
{
  EnantiomerPair pair = cfg.pair(fringe_velocity(cfg));
  InterferometerConfig ic = hand == "left" ? pair.left : pair.right;
  if (cfg.oracle_talbot_ratio) {
    const double lambda = de_broglie_wavelength(ic.molecule.mass, ic.v_z);
    ic.separation = *cfg.oracle_talbot_ratio * ic.g1.period * ic.g1.period / lambda;
  }
  const OracleComparison cmp = compare_with_engine(ic, cfg.oracle_grid, cfg.engine, cfg.oracle_tol);
  write_oracle_csv(dir / "oracle.csv", cmp);

  MetaRecord meta;
  record_common(meta, cfg, "oracle-check");
  meta.set("enantiomer", hand);
  meta.set("L_mm_used", ic.separation / mm);
  meta.set("samples_per_period", static_cast<long long>(cfg.oracle_grid.samples_per_period));
  meta.set("subsamples", static_cast<long long>(cfg.oracle_grid.subsamples));
  meta.set("visibility_engine", cmp.visibility_engine);
  meta.set("visibility_oracle", cmp.visibility_oracle);
  meta.set("rms_over_dc", cmp.rms_relative);
  meta.set("visibility_tol", cfg.oracle_tol.visibility);
  meta.set("rms_tol", cfg.oracle_tol.rms);
  meta.set("pass", cmp.pass);
  meta.write(dir / "meta.json");
  std::printf("oracle-check: %s\n", cmp.diagnostic.c_str());
  if (!cmp.pass)
    throw OracleMismatch(cmp.diagnostic);
}

void cmd_potential(const RunConfig& cfg, const std::filesystem::path& dir, const std::string& grating,
                   const std::string& hand, double from_nm, double to_nm, int points)
{
  const double v = cfg.v_z ? *cfg.v_z : cfg.v_range->center(0);
  const EnantiomerPair pair = cfg.pair(v);
  const InterferometerConfig& ic = hand == "left" ? pair.left : pair.right;
  const GratingSpec& g = grating == "g1" ? ic.g1 : grating == "g3" ? ic.g3 : ic.g2;
  if (!(from_nm > 0.0) || !(to_nm > from_nm) || points < 2)
    throw ConfigError("potential range");
  const WallPotential wall(g.wall, ic.molecule);
  auto out_path = dir / "potential.csv";
  std::filesystem::create_directories(dir);
  std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
  out << "x_nm,V_J,F_N\n";
  for (int i = 0; i < points; ++i) {
    // Log-spaced distances from the accessible surface.
    const double u = from_nm * std::pow(to_nm / from_nm, static_cast<double>(i) / (points - 1)) * nm;
    const double x = wall.surface() + u;
    out << format_double(x / nm) << ',' << format_double(wall.value(x)) << ',' << format_double(wall.force(x))
        << '\n';
  }
  std::printf("potential: %d points written to %s\n", points, out_path.string().c_str());
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Chiral Casimir-Polder effects in Talbot-Lau matter-wave interferometry"};
  app.require_subcommand(1);
  app.set_version_flag("--version", tool_version);

  std::string config_path, out_dir, hand = "right", grating = "g2";
  int threads = 0, points = 200;
  double from_nm = 0.5, to_nm = 50.0;

  auto add = [&](const std::string& name, const std::string& help) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("config", config_path, "JSON run configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("-o,--out", out_dir, "output directory (overrides output.directory)");
    return sub;
  };
  auto* fringe = add("fringe", "fringe S(x3) for both enantiomers");
  auto* vis = add("visibility", "bin-averaged visibility versus velocity");
  auto* sweep = add("sweep", "delta S and delta V over the (R01, g_e) grid");
  sweep->add_option("--threads", threads, "worker threads (default: TALBOT_THREADS or all cores)")
      ->check(CLI::PositiveNumber);
  auto* oracle = add("oracle-check", "compare the engine against the wave-propagation oracle");
  oracle->add_option("--enantiomer", hand, "left or right")->check(CLI::IsMember({"left", "right"}));
  auto* pot = add("potential", "wall potential and force versus distance");
  pot->add_option("--enantiomer", hand, "left or right")->check(CLI::IsMember({"left", "right"}));
  pot->add_option("--grating", grating, "g1, g2 or g3")->check(CLI::IsMember({"g1", "g2", "g3"}));
  pot->add_option("--from-nm", from_nm, "smallest distance from the surface");
  pot->add_option("--to-nm", to_nm, "largest distance from the surface");
  pot->add_option("--points", points, "number of log-spaced points");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "ERROR config: %s\n", e.what());
    return 2;
  }

  try {
    const RunConfig cfg = load_run_config(config_path);
    const std::filesystem::path dir = out_dir.empty() ? cfg.output_dir : std::filesystem::path(out_dir);
    if (*fringe)
      cmd_fringe(cfg, dir);
    else if (*vis)
      cmd_visibility(cfg, dir);
    else if (*sweep)
      cmd_sweep(cfg, dir, worker_count(threads));
    else if (*oracle)
      cmd_oracle(cfg, dir, hand);
    else if (*pot)
      cmd_potential(cfg, dir, grating, hand, from_nm, to_nm, points);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "ERROR config: %s\n", e.what());
    return 2;
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "ERROR config: %s\n", e.what());
    return 2;
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "ERROR numerical: %s\n", e.what());
    return 3;
  } catch (const OracleMismatch& e) {
    std::fprintf(stderr, "ERROR oracle: %s\n", e.what());
    return 4;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "ERROR numerical: %s\n", e.what());
    return 3;
  }
  return 0;
}
