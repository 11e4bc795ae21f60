#include "talbot/config.hpp"
#include "talbot/errors.hpp"
#include "talbot/output.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace talbot;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p)
{
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

nlohmann::json preset_json(const std::string& name)
{
  return nlohmann::json::parse(slurp(fs::path(TALBOT_CONFIG_DIR) / (name + ".json")));
}

fs::path scratch(const std::string& name)
{
  const fs::path dir = fs::temp_directory_path() / ("talbot_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write_config(const fs::path& dir, const nlohmann::json& j)
{
  const fs::path p = dir / "config.json";
  std::ofstream(p) << j.dump(2);
  return p;
}

// Runs the CLI; returns its exit code and leaves stderr in dir/stderr.txt.
int run(const std::string& args, const fs::path& dir)
{
  const std::string cmd = std::string(TALBOT_CLI) + " " + args + " -o " + dir.string() + " > " +
                          (dir / "stdout.txt").string() + " 2> " + (dir / "stderr.txt").string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p)
{
  std::vector<std::vector<std::string>> rows;
  std::ifstream in(p);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ','))
      row.push_back(cell);
    rows.push_back(row);
  }
  return rows;
}

} // namespace

TEST_SUITE("cli_io")
{
  TEST_CASE("presets load")
  {
    for (const char* name : {"fig2i", "fig2ii", "fig3i", "fig3ii", "fig4i", "fig4ii", "fig5", "oracle_fig2i"})
      CHECK_NOTHROW(load_run_config(fs::path(TALBOT_CONFIG_DIR) / (std::string(name) + ".json")));
    const RunConfig c = load_run_config(fs::path(TALBOT_CONFIG_DIR) / "fig5.json");
    REQUIRE(c.sweep);
    CHECK(c.sweep->R_values.size() == 21);
    CHECK(c.sweep->g_e_values.size() == 17);
    CHECK(c.params.scenario == Scenario::AllCoated);
  }

  TEST_CASE("schema errors")
  {
    nlohmann::json j = preset_json("fig2i");
    j["geometry"]["f"] = 1.2;
    CHECK_THROWS_WITH_AS(parse_run_config(j.dump()), "open_fraction", ConfigError);

    j = preset_json("fig2i");
    j["geometry"]["colour"] = 3;
    CHECK_THROWS_WITH_AS(parse_run_config(j.dump()), doctest::Contains("unknown key geometry.colour"), ConfigError);

    j = preset_json("fig2i");
    j["run"].erase("v_z_mps");
    j["run"].erase("v_range");
    CHECK_THROWS_AS(parse_run_config(j.dump()), ConfigError);

    CHECK_THROWS_WITH_AS(parse_run_config("{ \"scenario\": "), doctest::Contains("malformed JSON"), ConfigError);

    j = preset_json("fig2i");
    j["gratings"] = nlohmann::json::object();
    CHECK_THROWS_AS(parse_run_config(j.dump()), ConfigError);
  }

  TEST_CASE("signed rotatory strength sets wall handedness")
  {
    nlohmann::json j = preset_json("fig3i");
    j["molecule"]["R01_cgs_1e40"] = -1000;
    const RunConfig c = parse_run_config(j.dump());
    CHECK(c.wall_handedness == -1);
    const EnantiomerPair p = c.pair(140);
    CHECK(std::get<CoatedSiN>(p.right.g2.wall).coating.rotatory < 0.0);
    CHECK(p.right.molecule.rotatory > 0.0);
  }

  TEST_CASE("custom gratings")
  {
    nlohmann::json j = preset_json("fig2i");
    j["scenario"] = "custom";
    j["gratings"] = {{"g1", {{"wall", "ideal"}}},
                     {"g2", {{"wall", "chiral_mirror"}, {"r", 0.1}, {"r_c", 1.0}, {"cutoff", "deflection"},
                             {"theta_mrad", 2.0}}},
                     {"g3", {{"wall", "ideal"}}}};
    const RunConfig c = parse_run_config(j.dump());
    const EnantiomerPair p = c.pair(180);
    CHECK(std::holds_alternative<IdealWall>(p.right.g1.wall));
    CHECK(std::get<ChiralMirror>(p.right.g2.wall).r == 0.1);
    CHECK(std::holds_alternative<Deflection>(p.right.g2.cutoff));
  }

  TEST_CASE("number formatting and meta record")
  {
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(format_double(-2.5) == "-2.5");
    MetaRecord m;
    m.set("a", 1.5);
    m.set("n", 3LL);
    m.set("ok", true);
    m.set("s", std::string("x\"y"));
    m.set("nan", std::nan(""));
    m.set("a", 2.0);
    const auto j = nlohmann::json::parse(m.str());
    CHECK(j["a"] == 2.0);
    CHECK(j["n"] == 3);
    CHECK(j["ok"] == true);
    CHECK(j["s"] == "x\"y");
    CHECK(j["nan"].is_null());
    CHECK(m.str().find("\"a\"") < m.str().find("\"n\""));
  }

  TEST_CASE("fringe command")
  {
    const fs::path dir = scratch("fringe");
    nlohmann::json j = preset_json("fig2i");
    j["run"]["x3_samples"] = 128;
    REQUIRE(run("fringe " + write_config(dir, j).string(), dir) == 0);
    const auto rows = read_csv(dir / "fringe.csv");
    REQUIRE(rows.size() == 129);
    CHECK(rows[0] == std::vector<std::string>{"x3_nm", "S_left", "S_right"});
    double left = 0, right = 0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
      left += std::stod(rows[i][1]);
      right += std::stod(rows[i][2]);
    }
    CHECK(right < left);
    const std::string text = slurp(dir / "fringe.csv");
    CHECK(text.back() == '\n');

    const auto meta = nlohmann::json::parse(slurp(dir / "meta.json"));
    CHECK(meta["x_c_left_g2_nm"] == 0.0);
    CHECK(meta["x_c_right_g2_nm"].get<double>() == doctest::Approx(2.40651758549));
    CHECK(meta["L_over_L_lambda"].get<double>() == doctest::Approx(5.11639824));
    CHECK(meta.contains("l_max_left"));
    CHECK(meta.contains("truncation_tol"));
    CHECK(meta["version"] == tool_version);

    // Reruns are byte-identical.
    const fs::path again = scratch("fringe_again");
    REQUIRE(run("fringe " + (dir / "config.json").string(), again) == 0);
    CHECK(slurp(again / "fringe.csv") == text);
  }

  TEST_CASE("zero chirality gives identical columns")
  {
    const fs::path dir = scratch("achiral");
    nlohmann::json j = preset_json("fig3i");
    j["molecule"]["R01_cgs_1e40"] = 0;
    j["molecule"].erase("g_e");
    j["molecule"].erase("g_m");
    j["run"]["x3_samples"] = 64;
    REQUIRE(run("fringe " + write_config(dir, j).string(), dir) == 0);
    const auto rows = read_csv(dir / "fringe.csv");
    REQUIRE(rows.size() == 65);
    for (std::size_t i = 1; i < rows.size(); ++i)
      CHECK(rows[i][1] == rows[i][2]);
  }

  TEST_CASE("malformed config exits with code 2")
  {
    const fs::path dir = scratch("bad");
    nlohmann::json j = preset_json("fig2i");
    j["geometry"]["f"] = 1.2;
    CHECK(run("fringe " + write_config(dir, j).string(), dir) == 2);
    CHECK(slurp(dir / "stderr.txt") == "ERROR config: open_fraction\n");
  }

  TEST_CASE("visibility command with chiral-off walls")
  {
    const fs::path dir = scratch("visibility");
    nlohmann::json j = preset_json("fig4i");
    j["chiral_walls"] = false;
    j["run"]["velocity_nodes"] = 2;
    REQUIRE(run("visibility " + write_config(dir, j).string(), dir) == 0);
    const auto rows = read_csv(dir / "visibility.csv");
    REQUIRE(rows.size() == 11);
    CHECK(rows[0] == std::vector<std::string>{"v_mps", "vis_left", "vis_right"});
    CHECK(rows[1][0] == "105");
    for (std::size_t i = 1; i < rows.size(); ++i)
      CHECK(rows[i][1] == rows[i][2]);
  }

  TEST_CASE("sweep command: single cell and resume")
  {
    const fs::path dir = scratch("sweep");
    nlohmann::json j = preset_json("fig5");
    j["sweep"]["n_R"] = 1;
    j["sweep"]["n_g_e"] = 1;
    j["run"]["v_range"] = {{"min", 130}, {"max", 150}, {"bin", 10}};
    j["run"]["velocity_nodes"] = 2;
    const fs::path cfg = write_config(dir, j);
    REQUIRE(run("sweep " + cfg.string(), dir) == 0);
    const auto rows = read_csv(dir / "sweep.csv");
    REQUIRE(rows.size() == 2);
    CHECK(rows[0] == std::vector<std::string>{"R_cgs_1e40", "g_e", "delta_S", "delta_V_max"});

    j["sweep"]["n_g_e"] = 2;
    write_config(dir, j);
    REQUIRE(run("sweep " + cfg.string() + " --threads 2", dir) == 0);
    const std::string full = slurp(dir / "sweep.csv");
    // Drop the last journal entry, as if interrupted, and resume.
    std::string journal = slurp(dir / "sweep.journal");
    journal.erase(journal.find('\n') + 1);
    std::ofstream(dir / "sweep.journal", std::ios::trunc) << journal;
    fs::remove(dir / "sweep.csv");
    REQUIRE(run("sweep " + cfg.string(), dir) == 0);
    CHECK(slurp(dir / "sweep.csv") == full);
  }

  TEST_CASE("oracle-check command")
  {
    const fs::path dir = scratch("oracle");
    nlohmann::json j = preset_json("oracle_fig2i");
    j["chiral_walls"] = false;
    j["oracle"]["samples_per_period"] = 2048;
    const fs::path cfg = write_config(dir, j);
    CHECK(run("oracle-check " + cfg.string(), dir) == 0);
    const auto rows = read_csv(dir / "oracle.csv");
    CHECK(rows[0] == std::vector<std::string>{"x3_nm", "S_engine", "S_oracle"});
    CHECK(rows.size() > 100);

    j["oracle"]["samples_per_period"] = 16;
    write_config(dir, j);
    CHECK(run("oracle-check " + cfg.string(), dir) == 2);
    CHECK(slurp(dir / "stderr.txt").rfind("ERROR config: Nyquist", 0) == 0);
  }

  TEST_CASE("potential command")
  {
    const fs::path dir = scratch("potential");
    REQUIRE(run("potential " + (fs::path(TALBOT_CONFIG_DIR) / "fig3i.json").string() + " --points 7", dir) == 0);
    const auto rows = read_csv(dir / "potential.csv");
    REQUIRE(rows.size() == 8);
    CHECK(rows[0] == std::vector<std::string>{"x_nm", "V_J", "F_N"});
  }
}
