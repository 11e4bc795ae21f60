#include "talbot/output.hpp"

#include "talbot/errors.hpp"
#include "talbot/units.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace talbot {

namespace {

std::ofstream open_out(const std::filesystem::path& path)
{
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw ConfigError("cannot write " + path.string());
  return out;
}

} // namespace

std::string format_double(double v)
{
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_fringe_csv(const std::filesystem::path& path, const Eigen::VectorXd& x3, const Eigen::VectorXd& S_left,
                      const Eigen::VectorXd& S_right)
{
  auto out = open_out(path);
  out << "x3_nm,S_left,S_right\n";
  for (Eigen::Index i = 0; i < x3.size(); ++i)
    out << format_double(x3[i] / nm) << ',' << format_double(S_left[i]) << ',' << format_double(S_right[i]) << '\n';
}

void write_visibility_csv(const std::filesystem::path& path, const std::vector<BinMetrics>& bins)
{
  auto out = open_out(path);
  out << "v_mps,vis_left,vis_right\n";
  for (const auto& b : bins)
    out << format_double(b.v_center) << ',' << format_double(b.vis_left) << ',' << format_double(b.vis_right)
        << '\n';
}

void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepCell>& cells)
{
  auto out = open_out(path);
  out << "R_cgs_1e40,g_e,delta_S,delta_V_max\n";
  for (const auto& c : cells) {
    const double nan = std::nan("");
    out << format_double(c.R_cgs_1e40) << ',' << format_double(c.g_e) << ',' << format_double(c.ok ? c.delta_s : nan)
        << ',' << format_double(c.ok ? c.delta_v_max : nan) << '\n';
  }
}

void write_oracle_csv(const std::filesystem::path& path, const OracleComparison& cmp)
{
  auto out = open_out(path);
  out << "x3_nm,S_engine,S_oracle\n";
  for (Eigen::Index i = 0; i < cmp.x3.size(); ++i)
    out << format_double(cmp.x3[i] / nm) << ',' << format_double(cmp.S_engine[i]) << ','
        << format_double(cmp.S_oracle[i]) << '\n';
}

void MetaRecord::set(const std::string& key, Value v)
{
  for (auto& [k, old] : entries_)
    if (k == key) {
      old = std::move(v);
      return;
    }
  entries_.emplace_back(key, std::move(v));
}

std::string MetaRecord::str() const
{
  std::ostringstream out;
  out << "{\n";
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& [key, v] = entries_[i];
    out << "  " << nlohmann::json(key).dump() << ": ";
    if (const auto* d = std::get_if<double>(&v))
      out << (std::isfinite(*d) ? format_double(*d) : "null");
    else if (const auto* n = std::get_if<long long>(&v))
      out << *n;
    else if (const auto* b = std::get_if<bool>(&v))
      out << (*b ? "true" : "false");
    else
      out << nlohmann::json(std::get<std::string>(v)).dump();
    out << (i + 1 < entries_.size() ? ",\n" : "\n");
  }
  out << "}\n";
  return out.str();
}

void MetaRecord::write(const std::filesystem::path& path) const
{
  auto out = open_out(path);
  out << str();
}

} // namespace talbot
