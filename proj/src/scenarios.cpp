#include "talbot/scenarios.hpp"

#include "talbot/errors.hpp"
#include "talbot/quadrature.hpp"
#include "talbot/units.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

namespace talbot {

std::string to_string(Scenario s)
{
  switch (s) {
  case Scenario::PerfectChiralG2:
    return "perfect_chiral_g2";
  case Scenario::CoatedG2:
    return "coated_g2";
  case Scenario::AllCoated:
    return "all_coated";
  }
  return "unknown";
}

Scenario scenario_from_string(const std::string& name)
{
  if (name == "perfect_chiral_g2")
    return Scenario::PerfectChiralG2;
  if (name == "coated_g2")
    return Scenario::CoatedG2;
  if (name == "all_coated")
    return Scenario::AllCoated;
  throw ConfigError("scenario");
}

namespace {

ScenarioParams fig2_base()
{
  ScenarioParams p;
  p.scenario = Scenario::PerfectChiralG2;
  p.omega1 = 2.0 * std::numbers::pi * 1e15;
  p.d = 257 * nm;
  p.b = 160 * nm;
  p.L = 50 * mm;
  p.f = 0.45;
  return p;
}

ScenarioParams fig34_base(Scenario s)
{
  ScenarioParams p;
  p.scenario = s;
  p.mass_da = 1000;
  p.omega1 = 2.0 * std::numbers::pi * 1e15;
  p.d = 80 * nm;
  p.b = 160 * nm;
  p.L = 10 * mm;
  p.f = 0.45;
  p.a = 10 * nm;
  p.n_B = 5e28;
  p.v_z = 140;
  return p;
}

} // namespace

ScenarioParams preset(const std::string& name)
{
  if (name == "fig2i") {
    ScenarioParams p = fig2_base();
    p.mass_da = 328;
    p.R_cgs_1e40 = 700;
    p.v_z = 180;
    return p;
  }
  if (name == "fig2ii") {
    ScenarioParams p = fig2_base();
    p.mass_da = 1000;
    p.R_cgs_1e40 = 7000;
    p.v_z = 140;
    return p;
  }
  const bool fig3 = name == "fig3i" || name == "fig3ii";
  const bool fig4 = name == "fig4i" || name == "fig4ii";
  if (fig3 || fig4) {
    ScenarioParams p = fig34_base(fig3 ? Scenario::CoatedG2 : Scenario::AllCoated);
    if (name.back() == 'i' && name[name.size() - 2] != 'i') {
      p.R_cgs_1e40 = 1000;
      p.g_e = 0.2;
      p.g_m = 5.0;
    } else {
      p.R_cgs_1e40 = 5000;
      p.g_e = 0.3;
      p.g_m = 3.3;
    }
    return p;
  }
  if (name == "fig5") {
    ScenarioParams p = fig34_base(Scenario::AllCoated);
    p.R_cgs_1e40 = 1000;
    p.g_e = 0.1;
    p.g_m = 5.0;
    return p;
  }
  throw ConfigError("preset");
}

EnantiomerPair make_pair(const ScenarioParams& p)
{
  Molecule mol;
  mol.mass = p.mass_da * si::dalton;
  mol.omega1 = p.omega1;
  mol.rotatory = cgs_rotatory_to_si(std::abs(p.R_cgs_1e40));
  mol.g_e = p.g_e;
  mol.g_m = p.g_m;

  GratingSpec base;
  base.period = p.d;
  base.thickness = p.b;
  base.open_fraction = p.f;
  base.wall = BareSiN{};

  CoatedSiN coated;
  coated.coating = mol; // right-handed layer of the same species
  coated.n_B = p.n_B;
  coated.a = p.a;
  coated.chiral = p.chiral_walls;

  InterferometerConfig cfg;
  cfg.g1 = cfg.g2 = cfg.g3 = base;
  switch (p.scenario) {
  case Scenario::PerfectChiralG2:
    cfg.g2.wall = PerfectChiral{p.chiral_walls ? 1 : 0};
    break;
  case Scenario::CoatedG2:
    cfg.g2.wall = coated;
    break;
  case Scenario::AllCoated:
    cfg.g1.wall = cfg.g2.wall = cfg.g3.wall = coated;
    break;
  }
  cfg.g1.cutoff = Deflection{p.theta_g1};
  cfg.g2.cutoff = Deflection{p.theta_g2};
  cfg.g3.cutoff = FlyThrough{};
  cfg.separation = p.L;
  cfg.v_z = p.v_z;

  EnantiomerPair pair{cfg, cfg};
  pair.right.molecule = mol;
  pair.left.molecule = mol.mirrored();
  pair.left.validate();
  pair.right.validate();
  return pair;
}

FringeResult fringe_window(const TalbotSeries& series, double f, int n)
{
  FringeResult out;
  const double half = 2.0 * f * series.period;
  out.x3 = Eigen::VectorXd::LinSpaced(n, -half, half);
  out.S = series.sample(out.x3);
  out.dc_level = series.dc_level();
  out.visibility = series.visibility();
  return out;
}

double delta_s(const FringeResult& fringe_L, const FringeResult& fringe_R, double f, double d)
{
  const Eigen::Index n = fringe_L.x3.size();
  if (n < 2 || fringe_R.x3.size() != n || fringe_L.S.size() != n || fringe_R.S.size() != n)
    throw ConfigError("fringe_grid");
  const double half = 2.0 * f * d;
  const double tol = 1e-9 * half;
  if (std::abs(fringe_L.x3[0] + half) > tol || std::abs(fringe_L.x3[n - 1] - half) > tol ||
      (fringe_L.x3 - fringe_R.x3).cwiseAbs().maxCoeff() > tol)
    throw ConfigError("fringe_grid");
  if (!(fringe_L.S.minCoeff() > 0.0))
    throw NumericalError("truncation: non-positive left signal");
  const Eigen::ArrayXd r = (fringe_L.S - fringe_R.S).array() / fringe_L.S.array();
  double integral = 0.0;
  for (Eigen::Index i = 0; i + 1 < n; ++i)
    integral += 0.5 * (r[i] + r[i + 1]) * (fringe_L.x3[i + 1] - fringe_L.x3[i]);
  return integral / (4.0 * f * d);
}

int VelocityBins::count() const { return static_cast<int>(std::lround((v_max - v_min) / bin)); }

double VelocityBins::center(int i) const { return v_min + (i + 0.5) * bin; }

void VelocityBins::validate() const
{
  if (!(v_min > 0.0) || !(v_max > v_min) || !(bin > 0.0))
    throw ConfigError("v_range");
  const double n = (v_max - v_min) / bin;
  if (std::abs(n - std::round(n)) > 1e-9 * n)
    throw ConfigError("v_range: bins must tile the range");
}

std::vector<BinMetrics> bin_metrics(const EnantiomerPair& pair, const VelocityBins& bins, int nodes,
                                    const EngineOptions& opt)
{
  bins.validate();
  const double f = pair.right.g1.open_fraction, d = pair.right.g1.period;
  std::vector<BinMetrics> out;
  for (int i = 0; i < bins.count(); ++i) {
    const double lo = bins.v_min + i * bins.bin, hi = lo + bins.bin;
    const TalbotSeries sl = bin_averaged_series(pair.left, lo, hi, nodes, opt);
    const TalbotSeries sr = bin_averaged_series(pair.right, lo, hi, nodes, opt);
    BinMetrics m;
    m.v_center = bins.center(i);
    m.vis_left = sl.visibility();
    m.vis_right = sr.visibility();
    m.delta_s = delta_s(fringe_window(sl, f), fringe_window(sr, f), f, d);
    out.push_back(m);
  }
  return out;
}

double delta_v_max(const std::vector<BinMetrics>& bins)
{
  double m = 0.0;
  for (const auto& b : bins)
    m = std::max(m, std::abs(b.vis_left - b.vis_right));
  return m;
}

double delta_v_max(const EnantiomerPair& pair, const VelocityBins& bins, int nodes, const EngineOptions& opt)
{
  return delta_v_max(bin_metrics(pair, bins, nodes, opt));
}

double delta_s_max(const std::vector<BinMetrics>& bins)
{
  if (bins.empty())
    return 0.0;
  double m = bins.front().delta_s;
  for (const auto& b : bins)
    m = std::max(m, b.delta_s);
  return m;
}

SweepGrid SweepGrid::make_default(int n_R, int n_g)
{
  if (n_R < 1 || n_g < 1)
    throw ConfigError("sweep_grid");
  SweepGrid g;
  for (int i = 0; i < n_R; ++i)
    g.R_values.push_back(n_R == 1 ? 100.0 : 100.0 * std::pow(100.0, static_cast<double>(i) / (n_R - 1)));
  for (int j = 0; j < n_g; ++j)
    g.g_e_values.push_back(n_g == 1 ? 0.1 : 0.1 + 0.4 * j / (n_g - 1));
  return g;
}

void SweepGrid::validate() const
{
  auto increasing = [](const std::vector<double>& v) {
    return !v.empty() && std::adjacent_find(v.begin(), v.end(), std::greater_equal<>()) == v.end();
  };
  if (!increasing(R_values) || R_values.front() <= 0.0)
    throw ConfigError("sweep_grid: R_values");
  if (!increasing(g_e_values) || g_e_values.front() <= 0.0)
    throw ConfigError("sweep_grid: g_e_values");
  if (!(g_m > 0.0))
    throw ConfigError("g_m");
  if (nodes < 1)
    throw ConfigError("sweep_grid: nodes");
  velocities.validate();
}

namespace {

std::string fmt17(double v)
{
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::map<std::size_t, SweepCell> read_journal(const std::filesystem::path& path)
{
  std::map<std::size_t, SweepCell> done;
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ss(line);
    std::size_t idx;
    SweepCell c;
    if (ss >> idx >> c.R_cgs_1e40 >> c.g_e >> c.delta_s >> c.delta_v_max) {
      c.ok = true;
      done[idx] = c;
    }
  }
  return done;
}

} // namespace

std::vector<SweepCell> run_sweep(const SweepGrid& grid, const ScenarioParams& base, const SweepOptions& opt)
{
  grid.validate();
  const std::size_t n_g = grid.g_e_values.size();
  const std::size_t total = grid.R_values.size() * n_g;
  std::vector<SweepCell> cells(total);
  std::vector<char> pending(total, 1);

  if (opt.journal) {
    for (const auto& [idx, c] : read_journal(*opt.journal)) {
      if (idx < total && c.R_cgs_1e40 == grid.R_values[idx / n_g] && c.g_e == grid.g_e_values[idx % n_g]) {
        cells[idx] = c;
        pending[idx] = 0;
      }
    }
  }
  std::ofstream journal;
  if (opt.journal)
    journal.open(*opt.journal, std::ios::app);
  std::mutex journal_mutex;

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t idx = next++; idx < total; idx = next++) {
      if (!pending[idx])
        continue;
      SweepCell& c = cells[idx];
      c.R_cgs_1e40 = grid.R_values[idx / n_g];
      c.g_e = grid.g_e_values[idx % n_g];
      try {
        ScenarioParams p = base;
        p.scenario = Scenario::AllCoated;
        p.R_cgs_1e40 = c.R_cgs_1e40;
        p.g_e = c.g_e;
        p.g_m = grid.g_m;
        const auto bins = bin_metrics(make_pair(p), grid.velocities, grid.nodes, opt.engine);
        c.delta_s = delta_s_max(bins);
        c.delta_v_max = delta_v_max(bins);
        c.ok = true;
      } catch (const std::exception& e) {
        c.ok = false;
        c.error = e.what();
        continue;
      }
      if (opt.journal) {
        std::lock_guard lock(journal_mutex);
        journal << idx << ' ' << fmt17(c.R_cgs_1e40) << ' ' << fmt17(c.g_e) << ' ' << fmt17(c.delta_s) << ' '
                << fmt17(c.delta_v_max) << '\n'
                << std::flush;
      }
    }
  };

  const int n_threads = std::max(1, opt.threads);
  std::vector<std::thread> pool;
  for (int t = 1; t < n_threads; ++t)
    pool.emplace_back(worker);
  worker();
  for (auto& t : pool)
    t.join();
  return cells;
}

} // namespace talbot
