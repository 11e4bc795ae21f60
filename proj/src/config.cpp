#include "talbot/config.hpp"

#include "talbot/errors.hpp"
#include "talbot/units.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace talbot {

namespace {

using json = nlohmann::json;

void require_object(const json& j, const std::string& where)
{
  if (!j.is_object())
    throw ConfigError(where + ": expected an object");
}

void reject_unknown(const json& j, const std::string& where, const std::set<std::string>& allowed)
{
  require_object(j, where);
  for (const auto& [key, _] : j.items())
    if (!allowed.count(key))
      throw ConfigError("unknown key " + (where.empty() ? key : where + "." + key));
}

double number(const json& j, const std::string& key, const std::string& where)
{
  const auto& v = j.at(key);
  if (!v.is_number())
    throw ConfigError(where + "." + key + ": expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x))
    throw ConfigError(where + "." + key);
  return x;
}

template <class T>
void read(const json& j, const std::string& key, const std::string& where, T& out)
{
  if (!j.contains(key))
    return;
  if constexpr (std::is_same_v<T, int>) {
    if (!j.at(key).is_number_integer())
      throw ConfigError(where + "." + key + ": expected an integer");
    out = j.at(key).get<int>();
  } else if constexpr (std::is_same_v<T, bool>) {
    if (!j.at(key).is_boolean())
      throw ConfigError(where + "." + key + ": expected true or false");
    out = j.at(key).get<bool>();
  } else if constexpr (std::is_same_v<T, std::string>) {
    if (!j.at(key).is_string())
      throw ConfigError(where + "." + key + ": expected a string");
    out = j.at(key).get<std::string>();
  } else {
    out = number(j, key, where);
  }
}

double required(const json& j, const std::string& key, const std::string& where)
{
  if (!j.contains(key))
    throw ConfigError("missing key " + where + "." + key);
  return number(j, key, where);
}

CustomGrating parse_grating(const json& j, const std::string& where, const ScenarioParams& p, const Molecule& coating)
{
  reject_unknown(j, where, {"wall", "handedness", "r", "r_c", "coating_chiral", "cutoff", "theta_mrad"});
  CustomGrating g;
  std::string wall = "ideal";
  read(j, "wall", where, wall);
  if (wall == "ideal") {
    g.wall = IdealWall{};
  } else if (wall == "bare_sin") {
    g.wall = BareSiN{};
  } else if (wall == "perfect_chiral") {
    int hand = 1;
    read(j, "handedness", where, hand);
    if (hand < -1 || hand > 1)
      throw ConfigError(where + ".handedness");
    g.wall = PerfectChiral{hand};
  } else if (wall == "chiral_mirror") {
    ChiralMirror m;
    m.r = required(j, "r", where);
    m.r_c = required(j, "r_c", where);
    g.wall = m;
  } else if (wall == "coated") {
    CoatedSiN c;
    c.coating = coating;
    c.a = p.a;
    c.n_B = p.n_B;
    read(j, "coating_chiral", where, c.chiral);
    g.wall = c;
  } else {
    throw ConfigError(where + ".wall");
  }
  std::string cutoff = "fly_through";
  read(j, "cutoff", where, cutoff);
  if (cutoff == "deflection") {
    g.cutoff = Deflection{required(j, "theta_mrad", where) * 1e-3};
  } else if (cutoff == "fly_through") {
    g.cutoff = FlyThrough{};
  } else {
    throw ConfigError(where + ".cutoff");
  }
  return g;
}

} // namespace

EnantiomerPair RunConfig::pair(double v) const
{
  ScenarioParams p = params;
  p.v_z = v;
  if (!custom) {
    p.scenario = scenario_from_string(scenario);
    EnantiomerPair out = make_pair(p);
    if (wall_handedness < 0)
      for (auto* cfg : {&out.left, &out.right})
        for (auto* g : {&cfg->g1, &cfg->g2, &cfg->g3})
          g->wall = mirrored(g->wall);
    return out;
  }
  // Custom gratings on the scenario geometry.
  p.scenario = Scenario::PerfectChiralG2;
  EnantiomerPair out = make_pair(p);
  for (auto* cfg : {&out.left, &out.right}) {
    GratingSpec* g[3] = {&cfg->g1, &cfg->g2, &cfg->g3};
    for (int i = 0; i < 3; ++i) {
      g[i]->wall = (*custom)[i].wall;
      g[i]->cutoff = (*custom)[i].cutoff;
    }
    cfg->validate();
  }
  return out;
}

RunConfig parse_run_config(const std::string& text)
{
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
  reject_unknown(root, "", {"scenario", "chiral_walls", "molecule", "geometry", "run", "sweep", "oracle", "gratings",
                            "output"});

  RunConfig cfg;
  read(root, "scenario", "", cfg.scenario);
  ScenarioParams& p = cfg.params;
  if (cfg.scenario != "custom")
    p.scenario = scenario_from_string(cfg.scenario);
  read(root, "chiral_walls", "", p.chiral_walls);

  if (!root.contains("molecule"))
    throw ConfigError("missing key molecule");
  const json& mol = root.at("molecule");
  reject_unknown(mol, "molecule", {"mass_da", "omega1_rad_s", "R01_cgs_1e40", "g_e", "g_m"});
  p.mass_da = required(mol, "mass_da", "molecule");
  p.omega1 = required(mol, "omega1_rad_s", "molecule");
  const double R = required(mol, "R01_cgs_1e40", "molecule");
  p.R_cgs_1e40 = std::abs(R);
  cfg.wall_handedness = R < 0.0 ? -1 : 1;
  if (mol.contains("g_e"))
    p.g_e = number(mol, "g_e", "molecule");
  if (mol.contains("g_m"))
    p.g_m = number(mol, "g_m", "molecule");

  if (!root.contains("geometry"))
    throw ConfigError("missing key geometry");
  const json& geo = root.at("geometry");
  reject_unknown(geo, "geometry",
                 {"d_nm", "b_nm", "L_mm", "f", "a_nm", "n_B_per_m3", "theta_g1_mrad", "theta_g2_mrad"});
  p.d = required(geo, "d_nm", "geometry") * nm;
  p.b = required(geo, "b_nm", "geometry") * nm;
  p.L = required(geo, "L_mm", "geometry") * mm;
  p.f = required(geo, "f", "geometry");
  double a_nm = 0.0, theta1 = 1.0, theta2 = 2.0;
  read(geo, "a_nm", "geometry", a_nm);
  read(geo, "n_B_per_m3", "geometry", p.n_B);
  read(geo, "theta_g1_mrad", "geometry", theta1);
  read(geo, "theta_g2_mrad", "geometry", theta2);
  p.a = a_nm * nm;
  p.theta_g1 = theta1 * 1e-3;
  p.theta_g2 = theta2 * 1e-3;

  if (!root.contains("run"))
    throw ConfigError("missing key run");
  const json& run = root.at("run");
  reject_unknown(run, "run", {"v_z_mps", "v_range", "x3_samples", "l_max", "velocity_nodes", "tolerances"});
  if (run.contains("v_z_mps"))
    cfg.v_z = number(run, "v_z_mps", "run");
  if (run.contains("v_range")) {
    const json& vr = run.at("v_range");
    reject_unknown(vr, "run.v_range", {"min", "max", "bin"});
    VelocityBins bins;
    bins.v_min = required(vr, "min", "run.v_range");
    bins.v_max = required(vr, "max", "run.v_range");
    bins.bin = required(vr, "bin", "run.v_range");
    bins.validate();
    cfg.v_range = bins;
  }
  if (!cfg.v_z && !cfg.v_range)
    throw ConfigError("run: one of v_z_mps or v_range is required");
  if (cfg.v_z && !(*cfg.v_z > 0.0))
    throw ConfigError("velocity");
  read(run, "x3_samples", "run", cfg.x3_samples);
  if (cfg.x3_samples < 2)
    throw ConfigError("run.x3_samples");
  read(run, "velocity_nodes", "run", cfg.velocity_nodes);
  if (cfg.velocity_nodes < 1)
    throw ConfigError("run.velocity_nodes");
  read(run, "l_max", "run", cfg.engine.l_max_limit);
  if (cfg.engine.l_max_limit < 2 * cfg.engine.l_max_initial)
    throw ConfigError("run.l_max");
  if (run.contains("tolerances")) {
    const json& tol = run.at("tolerances");
    reject_unknown(tol, "run.tolerances", {"truncation"});
    read(tol, "truncation", "run.tolerances", cfg.engine.truncation_tol);
    if (!(cfg.engine.truncation_tol > 0.0))
      throw ConfigError("run.tolerances.truncation");
  }
  cfg.engine.x3_samples = cfg.x3_samples;

  if (root.contains("sweep")) {
    const json& sw = root.at("sweep");
    reject_unknown(sw, "sweep", {"R_min_cgs_1e40", "R_max_cgs_1e40", "n_R", "g_e_min", "g_e_max", "n_g_e", "g_m"});
    double r_min = 100.0, r_max = 10000.0, g_min = 0.1, g_max = 0.5;
    int n_R = 21, n_g = 17;
    read(sw, "R_min_cgs_1e40", "sweep", r_min);
    read(sw, "R_max_cgs_1e40", "sweep", r_max);
    read(sw, "g_e_min", "sweep", g_min);
    read(sw, "g_e_max", "sweep", g_max);
    read(sw, "n_R", "sweep", n_R);
    read(sw, "n_g_e", "sweep", n_g);
    if (n_R < 1 || n_g < 1 || !(r_min > 0.0) || !(g_min > 0.0) || (n_R > 1 && !(r_max > r_min)) ||
        (n_g > 1 && !(g_max > g_min)))
      throw ConfigError("sweep_grid");
    SweepGrid grid;
    for (int i = 0; i < n_R; ++i)
      grid.R_values.push_back(n_R == 1 ? r_min : r_min * std::pow(r_max / r_min, static_cast<double>(i) / (n_R - 1)));
    for (int j = 0; j < n_g; ++j)
      grid.g_e_values.push_back(n_g == 1 ? g_min : g_min + (g_max - g_min) * j / (n_g - 1));
    read(sw, "g_m", "sweep", grid.g_m);
    if (cfg.v_range)
      grid.velocities = *cfg.v_range;
    grid.nodes = cfg.velocity_nodes;
    grid.validate();
    cfg.sweep = grid;
  }

  if (root.contains("oracle")) {
    const json& o = root.at("oracle");
    reject_unknown(o, "oracle", {"samples_per_period", "subsamples", "max_unresolved_fraction", "L_over_L_lambda",
                                 "visibility_tol", "rms_tol"});
    read(o, "samples_per_period", "oracle", cfg.oracle_grid.samples_per_period);
    read(o, "subsamples", "oracle", cfg.oracle_grid.subsamples);
    read(o, "max_unresolved_fraction", "oracle", cfg.oracle_grid.max_unresolved_fraction);
    if (o.contains("L_over_L_lambda")) {
      cfg.oracle_talbot_ratio = number(o, "L_over_L_lambda", "oracle");
      if (!(*cfg.oracle_talbot_ratio > 0.0))
        throw ConfigError("oracle.L_over_L_lambda");
    }
    read(o, "visibility_tol", "oracle", cfg.oracle_tol.visibility);
    read(o, "rms_tol", "oracle", cfg.oracle_tol.rms);
    cfg.oracle_grid.validate();
  }

  if (root.contains("gratings")) {
    if (cfg.scenario != "custom")
      throw ConfigError("gratings: only allowed with scenario custom");
    const json& gr = root.at("gratings");
    reject_unknown(gr, "gratings", {"g1", "g2", "g3"});
    Molecule coating;
    coating.mass = p.mass_da * si::dalton;
    coating.omega1 = p.omega1;
    coating.rotatory = cfg.wall_handedness * cgs_rotatory_to_si(p.R_cgs_1e40);
    coating.g_e = p.g_e;
    coating.g_m = p.g_m;
    std::array<CustomGrating, 3> g;
    const char* names[3] = {"g1", "g2", "g3"};
    for (int i = 0; i < 3; ++i)
      if (gr.contains(names[i]))
        g[i] = parse_grating(gr.at(names[i]), std::string("gratings.") + names[i], p, coating);
    cfg.custom = g;
  } else if (cfg.scenario == "custom") {
    throw ConfigError("missing key gratings");
  }

  if (root.contains("output")) {
    const json& out = root.at("output");
    reject_unknown(out, "output", {"directory"});
    std::string dir = ".";
    read(out, "directory", "output", dir);
    cfg.output_dir = dir;
  }

  // Re-check every physical invariant before any computation.
  cfg.pair(cfg.v_z ? *cfg.v_z : cfg.v_range->center(0));
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str());
}

} // namespace talbot
