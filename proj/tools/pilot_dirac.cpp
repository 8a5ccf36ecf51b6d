// pilot_dirac: scenario runner, verification battery and SVG plotter.
//
// Subcommands:
//   run <config>     execute a run described by a key = value config file
//   verify [--fast]  run the full invariant battery, PASS/FAIL per item
//   plot <dir>       render SVG plots from an existing run directory
//
// Exit codes: 0 ok, 2 config error, 3 model error (diagnostic JSON
// written to the output directory), 4 verification failure.
// PILOT_DIRAC_THREADS caps ensemble parallelism.

#include "CLI11.hpp"

#include "config.hpp"
#include "io.hpp"
#include "plot.hpp"
#include "runner.hpp"
#include "verify.hpp"

#include "pilot_dirac/errors.hpp"

#include <filesystem>
#include <iostream>

namespace {

int cmd_run(const std::string& config_path) {
  pilot::RunConfig cfg;
  try {
    cfg = pilot::parse_run_config(config_path);
  } catch (const pilot::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }
  pilot::io::OutputSet out(cfg.output_dir);
  try {
    pilot::run_scenario(cfg, out);
  } catch (const pilot::ModelError& e) {
    out.write_json("error.json", {{"error", "model"}, {"what", e.what()}});
    out.write_manifest();
    std::cerr << "model error: " << e.what() << "\n";
    return 3;
  }
  std::cout << "run complete: " << out.entries().size() << " files in "
            << cfg.output_dir << "\n";
  return 0;
}

int cmd_verify(bool fast) {
  const pilot::verify::VerifyReport report =
      pilot::verify::run_verification(fast);
  pilot::verify::print_report(report, std::cout);
  return report.all_pass() ? 0 : 4;
}

int cmd_plot(const std::string& dir) {
  const int n = pilot::plot::plot_directory(dir, std::cerr);
  std::cout << "wrote " << n << " plot(s) to "
            << (std::filesystem::path(dir) / "plots").string() << "\n";
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"action/reaction pilot-wave Dirac laboratory (1+1D)"};
  app.require_subcommand(1);

  std::string config_path;
  CLI::App* run = app.add_subcommand("run", "execute a config-driven run");
  run->add_option("config", config_path, "key = value config file")->required();

  bool fast = false;
  CLI::App* verify = app.add_subcommand("verify", "run the invariant battery");
  verify->add_flag("--fast", fast, "reduced resolution (nx=256), < 60 s");

  std::string plot_dir;
  CLI::App* plot = app.add_subcommand("plot", "render SVGs from a run directory");
  plot->add_option("dir", plot_dir, "run output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config_path);
    if (verify->parsed()) return cmd_verify(fast);
    return cmd_plot(plot_dir);
  } catch (const pilot::ModelError& e) {
    std::cerr << "model error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
