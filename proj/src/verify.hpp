#pragma once

// One-command verification battery: Clifford algebra, the Lagrangian
// finite-difference oracles, continuity, gauge equivalence, model-derived
// action, guidance kinematics, ensemble equivariance, the energy-momentum
// identities, field-equation residual convergence, end-to-end determinism
// and a mutation sanity check on the force oracle.
//
// Each check returns PASS/FAIL plus the measured values; the individual
// checks are exposed so the acceptance tests can run them at full scale
// with their own tolerances.

#include <ostream>
#include <string>
#include <vector>

namespace pilot::verify {

struct Outcome {
  bool pass = false;
  std::string detail; // measured values, deterministic formatting
};

// fixed-format scientific notation for deterministic reports
std::string fmt(double v);

Outcome check_clifford();
Outcome check_bilinears(int n_spinors);
Outcome check_momentum_oracle(int n_points, double tol);
// mutate flips the sign of the analytic force; the oracle must then FAIL
Outcome check_force_oracle(int n_points, double tol, bool mutate = false);
Outcome check_continuity(int nx, double tol);
Outcome check_gauge_equivalence(int nx, double tol);
Outcome check_model_action(double tol_S, double tol_curl, double tol_residual);
Outcome check_guidance_kinematics(double tol);
Outcome check_equivariance(int nx, int n_samples, int steps);
Outcome check_coupled_identities(int energy_steps);
Outcome check_field_equation(int nx);
Outcome check_run_determinism();

struct CheckItem {
  std::string name;
  Outcome outcome;
};

struct VerifyReport {
  std::vector<CheckItem> items;
  bool all_pass() const;
};

VerifyReport run_verification(bool fast);
void print_report(const VerifyReport& report, std::ostream& os);

} // namespace pilot::verify
