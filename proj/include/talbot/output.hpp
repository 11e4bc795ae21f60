#ifndef TALBOT_OUTPUT_HPP
#define TALBOT_OUTPUT_HPP

#include "talbot/oracle.hpp"
#include "talbot/scenarios.hpp"

#include <Eigen/Dense>

#include <filesystem>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace talbot {

inline constexpr const char* tool_version = "1.0.0";

/// 17 significant digits, the round-trip precision of a double.
std::string format_double(double v);

/// x3 in metres; written in nm.
void write_fringe_csv(const std::filesystem::path& path, const Eigen::VectorXd& x3, const Eigen::VectorXd& S_left,
                      const Eigen::VectorXd& S_right);
void write_visibility_csv(const std::filesystem::path& path, const std::vector<BinMetrics>& bins);
void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepCell>& cells);
void write_oracle_csv(const std::filesystem::path& path, const OracleComparison& cmp);

/// Flat run record, written as a single JSON object in insertion order.
class MetaRecord
{
public:
  using Value = std::variant<double, long long, bool, std::string>;

  void set(const std::string& key, Value v);
  void write(const std::filesystem::path& path) const;
  std::string str() const;

private:
  std::vector<std::pair<std::string, Value>> entries_;
};

} // namespace talbot

#endif
