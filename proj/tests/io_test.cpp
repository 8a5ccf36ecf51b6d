#include "doctest.h"

#include "config.hpp"
#include "io.hpp"
#include "plot.hpp"
#include "runner.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

using namespace pilot;

TEST_CASE("fmt17 round-trips doubles exactly") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 6.02214076e23, -0.0, 12.8,
                   0.1 + 0.2}) {
    CHECK(std::stod(io::fmt17(v)) == v);
  }
  CHECK(io::fmt17(1.0) == "1");
}

TEST_CASE("fnv1a64 matches reference values") {
  CHECK(io::fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(io::fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(io::fnv1a64_hex("a") == "af63dc4c8601ec8c");
}

TEST_CASE("csv builder emits header and fmt17 rows") {
  io::CsvBuilder csv({"t", "x"});
  csv.row({0.5, 1.0 / 3.0});
  CHECK(csv.str() == "t,x\n0.5,0.33333333333333331\n");
  CHECK_THROWS_AS(csv.row({1.0}), std::invalid_argument);
}

TEST_CASE("json dump prints doubles at 17 significant digits") {
  const nlohmann::json j{{"a", 1.0 / 3.0}, {"b", {1.5, 2}}, {"c", "s"}};
  const std::string s = io::dump_json(j);
  CHECK(s.find("0.33333333333333331") != std::string::npos);
  CHECK(s.find("\"c\": \"s\"") != std::string::npos);
  // deterministic: same input, same bytes
  CHECK(s == io::dump_json(j));
}

TEST_CASE("csv parse round-trips the builder output") {
  io::CsvBuilder csv({"t", "x"});
  csv.row({0.25, -3.5});
  csv.row({0.5, 7.0});
  const plot::CsvTable t = plot::parse_csv(csv.str());
  REQUIRE(t.header.size() == 2);
  CHECK(t.header[1] == "x");
  REQUIRE(t.columns[0].size() == 2);
  CHECK(t.columns[1][0] == -3.5);
  CHECK_THROWS_AS(plot::parse_csv("a,b\n1\n"), std::runtime_error);
}

TEST_CASE("config parser handles dotted keys, comments and defaults") {
  const RunConfig cfg = parse_run_config_text(
      "# a comment\n"
      "scenario.kind = gaussian_packet\n"
      "scenario.p = 0.4   # trailing comment\n"
      "grid.nx = 512\n"
      "solver.dt = 0.005\n");
  CHECK(cfg.scenario.kind == Scenario::GaussianPacket);
  CHECK(cfg.scenario.p == 0.4);
  CHECK(cfg.nx == 512);
  CHECK(cfg.solver.dt == 0.005);
  CHECK(cfg.mode == RunMode::Free); // default
  CHECK(cfg.ensemble_n == 0);
}

TEST_CASE("config parser rejects unknown keys with the line number") {
  try {
    parse_run_config_text("grid.nx = 256\nbogus.key = 1\n", "test.cfg");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("bogus.key") != std::string::npos);
    CHECK(msg.find("line 2") != std::string::npos);
  }
}

TEST_CASE("config value errors carry the key and line") {
  CHECK_THROWS_AS(parse_run_config_text("solver.dt = -1\n"), ConfigError);
  CHECK_THROWS_AS(parse_run_config_text("solver.dt = fast\n"), ConfigError);
  CHECK_THROWS_AS(parse_run_config_text("grid.nx = 100\n"), ConfigError);
  CHECK_THROWS_AS(parse_run_config_text("emit.plots = yes\n"), ConfigError);
  CHECK_THROWS_AS(parse_run_config_text("solver.mode = magic\n"), ConfigError);
  CHECK_THROWS_AS(parse_run_config_text("grid.nx = 256\ngrid.nx = 512\n"),
                  ConfigError);
  CHECK_THROWS_AS(parse_run_config_text("grid.nx\n"), ConfigError);
  // coupled mode needs a particle; ensembles only exist uncoupled
  CHECK_THROWS_AS(parse_run_config_text("solver.mode = coupled\n"), ConfigError);
  CHECK_THROWS_AS(parse_run_config_text("solver.mode = coupled\n"
                                        "particle.x = 1\nensemble.n = 10\n"),
                  ConfigError);
  // source.* is a phase_sourced concept
  CHECK_THROWS_AS(parse_run_config_text("source.dst = 0.5\n"), ConfigError);
}

TEST_CASE("output set records every file in the manifest") {
  const auto dir = std::filesystem::temp_directory_path() / "pilot_dirac_io_test";
  std::filesystem::remove_all(dir);
  io::OutputSet out(dir);
  out.write("a.csv", "x\n1\n");
  out.write("sub/b.json", "{}\n");
  out.write_manifest();

  const nlohmann::json m = nlohmann::json::parse(
      std::ifstream(dir / "manifest.json"));
  std::set<std::string> listed;
  for (const auto& e : m["files"]) listed.insert(e["path"].get<std::string>());
  CHECK(listed == std::set<std::string>{"a.csv", "sub/b.json"});
  for (const auto& e : m["files"]) {
    std::ifstream f(dir / e["path"].get<std::string>(), std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    CHECK(io::fnv1a64_hex(ss.str()) == e["fnv1a64"].get<std::string>());
    CHECK(ss.str().size() == e["bytes"].get<std::size_t>());
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("svg chart is deterministic and self-contained") {
  const std::vector<plot::Series> series{{"y", {0, 1, 2}, {1.0, -0.5, 2.5}}};
  const std::string a = plot::line_chart("t", "x", "y", series);
  const std::string b = plot::line_chart("t", "x", "y", series);
  CHECK(a == b);
  CHECK(a.rfind("<svg ", 0) == 0);
  CHECK(a.find("<polyline") != std::string::npos);
  CHECK(a.find("http") != std::string::npos); // xmlns only
  CHECK(a.find("href") == std::string::npos); // no external references
}

TEST_CASE("run output tree is complete: no orphan writes") {
  const auto dir = std::filesystem::temp_directory_path() / "pilot_dirac_run_test";
  std::filesystem::remove_all(dir);
  RunConfig cfg = parse_run_config_text(
      "scenario.kind = gaussian_packet\n"
      "scenario.p = 0.4\n"
      "scenario.x0 = 12.8\n"
      "scenario.width = 2.5\n"
      "grid.nx = 256\n"
      "solver.mode = coupled\n"
      "solver.dt = 0.01\n"
      "solver.steps = 20\n"
      "particle.x = 11.8\n"
      "emit.plots = true\n");
  cfg.output_dir = dir.string();
  io::OutputSet out(dir);
  run_scenario(cfg, out);

  const nlohmann::json m = nlohmann::json::parse(
      std::ifstream(dir / "manifest.json"));
  std::set<std::string> listed;
  for (const auto& e : m["files"]) listed.insert(e["path"].get<std::string>());
  std::set<std::string> on_disk;
  for (const auto& e : std::filesystem::recursive_directory_iterator(dir))
    if (e.is_regular_file())
      on_disk.insert(std::filesystem::relative(e.path(), dir).generic_string());
  on_disk.erase("manifest.json"); // the list itself
  CHECK(listed == on_disk);
  CHECK(listed.count("trajectory.csv") == 1);
  CHECK(listed.count("energy.csv") == 1);
  CHECK(listed.count("identity_check.json") == 1);
  CHECK(listed.count("plots/energy.svg") == 1);
  std::filesystem::remove_all(dir);
}
