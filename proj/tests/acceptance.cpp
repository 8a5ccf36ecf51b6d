// Acceptance battery: ten end-to-end criteria, one PASS/FAIL line each,
// run at full scale with the stated tolerances. Exits nonzero on any FAIL.

#include "verify.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#ifndef PILOT_DIRAC_CLI
#define PILOT_DIRAC_CLI ""
#endif

namespace {

int failures = 0;

void report(int n, const std::string& title, const pilot::verify::Outcome& o) {
  std::printf("%s criterion %2d (%s): %s\n", o.pass ? "PASS" : "FAIL", n,
              title.c_str(), o.detail.c_str());
  if (!o.pass) ++failures;
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// two runs of `verify --fast` must be byte-identical and each < 60 s
pilot::verify::Outcome check_cli_determinism() {
  const std::string cli = PILOT_DIRAC_CLI;
  if (cli.empty()) return {false, "CLI path not configured"};
  double worst_seconds = 0.0;
  std::string first;
  for (int r = 0; r < 2; ++r) {
    const std::string out =
        (std::filesystem::temp_directory_path() /
         ("pilot_dirac_verify_fast_" + std::to_string(r) + ".txt"))
            .string();
    const auto t0 = std::chrono::steady_clock::now();
    const int rc = std::system((cli + " verify --fast > " + out + " 2>&1").c_str());
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
    worst_seconds = std::max(worst_seconds, dt.count());
    if (rc != 0) return {false, "verify --fast exited nonzero"};
    const std::string text = slurp(out);
    std::filesystem::remove(out);
    if (r == 0)
      first = text;
    else if (text != first)
      return {false, "reports differ between runs"};
  }
  const bool pass = worst_seconds < 60.0;
  return {pass, "byte-identical reports; slower run " +
                    pilot::verify::fmt(worst_seconds) + " s (< 60 s)"};
}

} // namespace

int main() {
  using namespace pilot::verify;

  {
    const Outcome cl = check_clifford();
    const Outcome bi = check_bilinears(1000);
    report(1, "clifford and bilinear suite",
           {cl.pass && bi.pass, cl.detail + "; " + bi.detail});
  }
  report(2, "momentum finite-difference oracle", check_momentum_oracle(100, 1e-6));
  report(3, "force finite-difference oracle", check_force_oracle(100, 1e-6));
  report(4, "continuity residual and decay", check_continuity(1024, 1e-6));
  report(5, "gauge equivalence, three S choices", check_gauge_equivalence(1024, 1e-6));
  report(6, "model-derived action on plane waves",
         check_model_action(1e-8, 1e-10, 1e-8));
  {
    const Outcome gk = check_guidance_kinematics(1e-8);
    const Outcome eq = check_equivariance(512, 10000, 500);
    report(7, "guidance kinematics and equivariance",
           {gk.pass && eq.pass, gk.detail + "; " + eq.detail});
  }
  report(8, "energy-momentum identities", check_coupled_identities(1600));
  report(9, "field-equation residual convergence", check_field_equation(256));
  report(10, "verify --fast determinism and timing", check_cli_determinism());

  std::printf("%d/10 criteria passed\n", 10 - failures);
  return failures == 0 ? 0 : 1;
}
