#include "verify.hpp"

#include "config.hpp"
#include "io.hpp"
#include "runner.hpp"

#include "pilot_dirac/coupled.hpp"
#include "pilot_dirac/ensemble.hpp"
#include "pilot_dirac/gauge.hpp"

#include <cstdio>
#include <filesystem>
#include <random>

namespace pilot::verify {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3e", v);
  return buf;
}

namespace {

const GammaSet& g2() {
  static const GammaSet g = make_gamma_set(2);
  return g;
}

SpinorField plane_wave_field(double p, double m, double t, const Grid& grid) {
  const double E = std::sqrt(p * p + m * m);
  const Eigen::Vector2cd u = positive_energy_spinor(p, m);
  const Complex I(0.0, 1.0);
  const ArrayXcd ph =
      (1.0 / std::sqrt(grid.length())) * ((I * (p * grid.sites() - E * t))).exp();
  SpinorField psi(grid.nx, 2);
  psi.col(0) = u[0] * ph;
  psi.col(1) = u[1] * ph;
  return psi;
}

} // namespace

Outcome check_clifford() {
  double worst = 0.0;
  for (int dim : {2, 4}) {
    const GammaSet g = make_gamma_set(dim);
    const int nc = g.spinor_size();
    for (int a = 0; a < dim; ++a)
      for (int b = 0; b < dim; ++b) {
        const MatrixXcd anti = g.gammas[a] * g.gammas[b] + g.gammas[b] * g.gammas[a];
        const MatrixXcd expect = (a == b ? 2.0 * g.metric[a] : 0.0) *
                                 MatrixXcd::Identity(nc, nc);
        worst = std::max(worst, (anti - expect).cwiseAbs().maxCoeff());
      }
  }
  return {worst == 0.0,
          "max anticommutator defect " + fmt(worst) + " (dim 2 and 4)"};
}

Outcome check_bilinears(int n_spinors) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> gauss;
  double worst_jj = 0.0; // most negative j.j relative to scale
  bool ok = true;
  for (int dim : {2, 4}) {
    const GammaSet g = make_gamma_set(dim);
    const int nc = g.spinor_size();
    for (int s = 0; s < n_spinors; ++s) {
      VectorXcd psi(nc);
      for (int c = 0; c < nc; ++c) psi[c] = Complex(gauss(rng), gauss(rng));
      psi.normalize();
      try {
        const VectorXd j = bilinear_current(psi, g, 1e-12); // throws if complex
        const double jj = minkowski_dot(j, j);
        worst_jj = std::min(worst_jj, jj);
        if (jj < -1e-12) ok = false;
      } catch (const std::exception&) {
        ok = false;
      }
    }
  }
  return {ok, "min j.j " + fmt(worst_jj) + " over " +
                  std::to_string(2 * n_spinors) + " random unit spinors"};
}

Outcome check_momentum_oracle(int n_points, double tol) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  std::uniform_real_distribution<double> mag(0.5, 2.0);
  const double h = 1e-6;
  double worst = 0.0;
  for (int s = 0; s < n_points; ++s) {
    const double chi = uni(rng), eta = uni(rng);
    const Vector2d u(std::cosh(chi), std::sinh(chi));
    const double rho0 = mag(rng), k = mag(rng);
    const Vector2d j = rho0 * Vector2d(std::cosh(eta), std::sinh(eta));
    Vector2d fd; // p_a = -dL/du^a
    for (int a = 0; a < 2; ++a) {
      Vector2d up = u, um = u;
      up[a] += h;
      um[a] -= h;
      fd[a] = -(lagrangian_L(up, j, rho0, k) - lagrangian_L(um, j, rho0, k)) /
              (2.0 * h);
    }
    const Vector2d p = lower(generalized_momentum(u, j, rho0, k));
    worst = std::max(worst, (fd - p).norm() / p.norm());
  }
  return {worst < tol, "max relative error " + fmt(worst) + " over " +
                           std::to_string(n_points) + " points (tol " +
                           fmt(tol) + ")"};
}

Outcome check_force_oracle(int n_points, double tol, bool mutate) {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  std::uniform_real_distribution<double> mag(0.5, 2.0);
  const double h = 1e-6;
  double worst = 0.0;
  for (int s = 0; s < n_points; ++s) {
    const double chi = uni(rng), eta = uni(rng);
    const Vector2d u(std::cosh(chi), std::sinh(chi));
    const double k = mag(rng);
    const Vector2d j = mag(rng) * Vector2d(std::cosh(eta), std::sinh(eta));
    // dL/dj^a with rho0 = sqrt(j.j) varying along the perturbation
    Vector2d fd;
    for (int a = 0; a < 2; ++a) {
      Vector2d jp = j, jm = j;
      jp[a] += h;
      jm[a] -= h;
      fd[a] = (lagrangian_L(u, jp, std::sqrt(mdot(jp, jp)), k) -
               lagrangian_L(u, jm, std::sqrt(mdot(jm, jm)), k)) /
              (2.0 * h);
    }
    Vector2d f = dL_dj(u, j, std::sqrt(mdot(j, j)), k);
    if (mutate) f = -f; // injected sign flip: the oracle must catch this
    worst = std::max(worst, (fd - f).norm() / fd.norm());
  }
  return {worst < tol, "max relative error " + fmt(worst) + " over " +
                           std::to_string(n_points) + " points (tol " +
                           fmt(tol) + ")"};
}

namespace {
double continuity_for(int nx, double dt, bool sourced) {
  const Grid grid(nx, 0.1);
  SolverConfig cfg;
  cfg.dt = dt;
  SpinorField psi = init_scenario({.kind = Scenario::GaussianPacket,
                                   .p = 0.5,
                                   .x0 = 0.5 * grid.length(),
                                   .width = 2.0},
                                  grid, cfg.m);
  VectorField dS = VectorField::Zero(grid.nx, 2);
  if (sourced) {
    const ArrayXd xs = grid.sites();
    dS.col(0) = 0.3 * (2.0 * M_PI / grid.length() * xs).cos();
    dS.col(1) = 0.5 * (2.0 * M_PI / grid.length() * xs).sin();
  }
  const FreeStepper stepper(grid, cfg.dt, cfg.m);
  std::vector<CurrentSnapshot> snaps;
  snaps.push_back(current_field(psi, g2(), grid, 0.0));
  for (int n = 1; n <= 4; ++n) {
    if (sourced)
      psi = step_phase_sourced(psi, dS, grid, cfg);
    else
      stepper.step(psi);
    snaps.push_back(current_field(psi, g2(), grid, n * dt));
  }
  return continuity_residual(snaps, grid);
}
} // namespace

Outcome check_continuity(int nx, double tol) {
  const double dt = 1e-3;
  const double rf = continuity_for(nx, dt, false);
  const double rs = continuity_for(nx, dt, true);
  const double rf2 = continuity_for(nx, dt / 2, false);
  const double rs2 = continuity_for(nx, dt / 2, true);
  const bool pass = rf < tol && rs < tol && rf2 < 0.35 * rf && rs2 < 0.35 * rs;
  return {pass, "free " + fmt(rf) + ", sourced " + fmt(rs) + " (tol " +
                    fmt(tol) + "); dt/2 ratios " + fmt(rf2 / rf) + ", " +
                    fmt(rs2 / rs)};
}

namespace {
double gauge_error(int nx, double dt, int steps) {
  const Grid grid(nx, 0.1);
  SolverConfig cfg;
  cfg.dt = dt;
  cfg.steps = steps;
  const SpinorField Psi0 = init_scenario({.kind = Scenario::GaussianPacket,
                                          .p = 0.5,
                                          .x0 = 0.5 * grid.length(),
                                          .width = 2.0},
                                         grid, cfg.m);
  const double L = grid.length();
  const double a = 0.4, w = 1.3;
  const ArrayXd xs = grid.sites();
  auto S = [&](double t) { return ScalarField(a * (2.0 * M_PI / L * xs).sin() *
                                              std::cos(w * t)); };
  auto dS = [&](double t) {
    VectorField d(xs.size(), 2);
    d.col(0) = -a * w * (2.0 * M_PI / L * xs).sin() * std::sin(w * t);
    d.col(1) = a * (2.0 * M_PI / L) * (2.0 * M_PI / L * xs).cos() * std::cos(w * t);
    return d;
  };
  return equivalence_check(Psi0, grid, cfg, S, dS).max_error;
}
} // namespace

Outcome check_gauge_equivalence(int nx, double tol) {
  const Grid grid(nx, 0.1);
  SolverConfig cfg;
  cfg.dt = 0.005;
  cfg.steps = 100;
  const SpinorField Psi0 = init_scenario({.kind = Scenario::GaussianPacket,
                                          .p = 0.5,
                                          .x0 = 0.5 * grid.length(),
                                          .width = 2.0},
                                         grid, cfg.m);
  // S = 0: the two steppers must agree to round-off
  const double e_zero =
      equivalence_check(Psi0, grid, cfg,
                        [&](double) { return ScalarField::Zero(grid.nx); },
                        [&](double) { return VectorField::Zero(grid.nx, 2); })
          .max_error;
  // S = ct
  const double c = 0.7;
  const double e_lin =
      equivalence_check(
          Psi0, grid, cfg,
          [&](double t) { return ScalarField(ScalarField::Constant(grid.nx, c * t)); },
          [&](double) {
            VectorField d = VectorField::Zero(grid.nx, 2);
            d.col(0) = c;
            return d;
          })
          .max_error;
  // space-time oscillatory S, plus one dt halving at fixed horizon
  const double e_osc = gauge_error(nx, cfg.dt, cfg.steps);
  const double e_half = gauge_error(nx, cfg.dt / 2, 2 * cfg.steps);
  const bool pass = e_zero < 1e-12 && e_lin < tol && e_osc < tol &&
                    e_half < 0.35 * e_osc;
  return {pass, "zero " + fmt(e_zero) + ", linear " + fmt(e_lin) +
                    ", oscillatory " + fmt(e_osc) + " (tol " + fmt(tol) +
                    "); dt/2 ratio " + fmt(e_half / e_osc)};
}

Outcome check_model_action(double tol_S, double tol_curl, double tol_residual) {
  const Grid grid(256, 0.1);
  const double m = 1.0, k = 0.8, dt = 0.01;
  const double p = lattice_momentum(0.6, grid);
  const double E = std::sqrt(p * p + m * m);

  // boosted plane wave: constant j, S = -2k (j_0 t + j_1 x)
  SpinorField psi = plane_wave_field(p, m, 0.0, grid);
  const FreeStepper stepper(grid, dt, m);
  std::vector<CurrentSnapshot> snaps;
  snaps.push_back(current_field(psi, g2(), grid, 0.0));
  for (int n = 1; n <= 4; ++n) {
    stepper.step(psi);
    snaps.push_back(current_field(psi, g2(), grid, n * dt));
  }
  const ActionField af = build_action_field(snaps, grid, k);
  const double j0 = 1.0 / grid.length();          // box-normalized P
  const double j1 = (p / E) / grid.length();
  const ArrayXd xs = grid.sites();
  double worst_S = 0.0;
  for (std::size_t i = 0; i < af.S.size(); ++i) {
    const ArrayXd expect = -2.0 * k * (j0 * af.times[i] - j1 * xs);
    worst_S = std::max(worst_S, (af.S[i] - expect).abs().maxCoeff());
  }

  // rest-frame closed form psi = (1,0) e^{-i(m+2k)t} under dS = (-2k, 0)
  const double dtr = 2e-5;
  std::vector<FieldSnapshot> rest;
  for (int n = 0; n < 5; ++n) {
    const Complex ph = std::exp(Complex(0.0, -(m + 2.0 * k) * n * dtr));
    SpinorField f = SpinorField::Zero(grid.nx, 2);
    f.col(0) = ph / std::sqrt(grid.length());
    rest.push_back({n * dtr, std::move(f)});
  }
  VectorField dS = VectorField::Zero(grid.nx, 2);
  dS.col(0) = -2.0 * k;
  const double res = dirac_residual(rest, grid, g2(), m,
                                    [&](std::size_t) { return dS; });

  const bool pass =
      worst_S < tol_S && af.curl_norm < tol_curl && res < tol_residual;
  return {pass, "S error " + fmt(worst_S) + " (tol " + fmt(tol_S) +
                    "), curl " + fmt(af.curl_norm) + " (tol " + fmt(tol_curl) +
                    "), rest residual " + fmt(res) + " (tol " +
                    fmt(tol_residual) + ")"};
}

Outcome check_guidance_kinematics(double tol) {
  const Grid grid(256, 0.1);
  const double m = 1.0;
  const double p = lattice_momentum(0.9, grid);
  const double E = std::sqrt(p * p + m * m);
  const SpinorField psi = plane_wave_field(p, m, 0.0, grid);
  const CurrentSnapshot snap = current_field(psi, g2(), grid, 0.0);
  double worst = 0.0;
  for (double x : {1.3, 7.7, 19.4}) {
    const Vector2d u = guidance_velocity(snap, x, grid);
    worst = std::max(worst, (u - Vector2d(E / m, p / m)).norm());
  }
  return {worst < tol, "max |u - (E/m, p/m)| " + fmt(worst) + " (tol " +
                           fmt(tol) + ")"};
}

Outcome check_equivariance(int nx, int n_samples, int steps) {
  const Grid grid(nx, 0.1);
  SolverConfig cfg;
  cfg.dt = 0.01;
  const double p = 0.4;
  auto currents_for = [&](double carrier) {
    SpinorField psi = init_scenario({.kind = Scenario::GaussianPacket,
                                     .p = carrier,
                                     .x0 = 0.5 * grid.length(),
                                     .width = 1.5},
                                    grid, cfg.m);
    const FreeStepper stepper(grid, cfg.dt, cfg.m);
    std::vector<CurrentSnapshot> snaps;
    snaps.push_back(current_field(psi, g2(), grid, 0.0));
    for (int n = 1; n <= steps; ++n) {
      stepper.step(psi);
      snaps.push_back(current_field(psi, g2(), grid, n * cfg.dt));
    }
    return snaps;
  };
  const auto snaps = currents_for(p);

  Ensemble ens = sample_positions(snaps.front().P, grid, n_samples, 4242);
  evolve_ensemble(ens, snaps, grid, cfg.k);
  const KsResult ks = equivariance_test(ens, snaps.back().P, grid);

  // negative control: same samples guided by a mismatched field
  const auto wrong = currents_for(1.3);
  Ensemble bad = sample_positions(snaps.front().P, grid, n_samples, 4242);
  evolve_ensemble(bad, wrong, grid, cfg.k);
  const KsResult ks_bad = equivariance_test(bad, snaps.back().P, grid);

  const bool pass = ks.pass && !ks_bad.pass;
  return {pass, "KS " + fmt(ks.statistic) + " (crit " + fmt(ks.critical) +
                    ", n=" + std::to_string(n_samples) +
                    "); wrong-field control KS " + fmt(ks_bad.statistic) +
                    (ks_bad.pass ? " unexpectedly passed" : " fails as required")};
}

namespace {
CoupledRun coupled_run_for(const Grid& grid, double dt, int steps, double k) {
  SolverConfig cfg;
  cfg.dt = dt;
  cfg.k = k;
  cfg.eps = 0.4;
  cfg.steps = steps;
  const SpinorField phi0 = init_scenario(
      {.kind = Scenario::GaussianPacket, .p = 0.4, .x0 = 12.8, .width = 2.5},
      grid, cfg.m);
  const CurrentSnapshot snap = current_field(phi0, g2(), grid, 0.0);
  ParticleState st;
  st.x = 11.8;
  st.u = Vector2d(1.0, 0.0);
  st.p = generalized_momentum(st.u, GuidanceField(snap, grid).sample(st.x).j,
                              GuidanceField(snap, grid).sample(st.x).rho0, cfg.k);
  return run_coupled(phi0, st, grid, g2(), cfg);
}
} // namespace

Outcome check_coupled_identities(int energy_steps) {
  const Grid grid(256, 0.1);
  const CoupledRun run = coupled_run_for(grid, 0.005, 200, 1.0);
  const DivergenceIdentityReport rep = divergence_identity_check(run, g2());

  const CoupledRun coarse = coupled_run_for(grid, 0.005, 100, 1.0);
  const CoupledRun fine = coupled_run_for(grid, 0.0025, 200, 1.0);
  const double rc = divergence_identity_check(coarse, g2()).field_residual;
  const double rfh = divergence_identity_check(fine, g2()).field_residual;

  const CoupledRun weak = coupled_run_for(grid, 0.005, energy_steps, 0.2);
  const EnergyReport energy = total_conservation_check(weak, g2());

  const bool pass = rep.field_residual < 0.10 && rep.particle_residual < 0.10 &&
                    rfh < 0.5 * rc && energy.exchange > 0.0 &&
                    energy.total_drift < 0.1 * energy.exchange;
  return {pass, "field " + fmt(rep.field_residual) + ", particle " +
                    fmt(rep.particle_residual) + " (tol 1.0e-01); dt/2 ratio " +
                    fmt(rfh / rc) + "; energy drift/exchange " +
                    fmt(energy.total_drift / energy.exchange) + " (tol 1.0e-01)"};
}

namespace {
double coupled_pde_residual(const CoupledRun& run, const Grid& grid,
                            double noise_amp = 0.0) {
  std::vector<FieldSnapshot> snaps = run.fields;
  if (noise_amp > 0.0) {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> gauss;
    for (auto& s : snaps)
      for (int i = 0; i < grid.nx; ++i)
        for (int c = 0; c < 2; ++c)
          s.psi(i, c) += noise_amp * Complex(gauss(rng), gauss(rng));
  }
  return dirac_residual(snaps, grid, g2(), run.cfg.m, [&](std::size_t i) {
    return coupled_source(run.currents[i], run.particle[i], grid, run.cfg.k,
                          run.cfg.eps);
  });
}
} // namespace

Outcome check_field_equation(int nx) {
  const Grid grid(nx, 0.1);
  const CoupledRun coarse = coupled_run_for(grid, 0.005, 100, 1.0);
  const CoupledRun fine = coupled_run_for(grid, 0.0025, 200, 1.0);
  const double rc = coupled_pde_residual(coarse, grid);
  const double rf = coupled_pde_residual(fine, grid);
  const double rn = coupled_pde_residual(coarse, grid, 1e-3);
  const bool pass = rf < 0.35 * rc && rn > 10.0 * rc;
  return {pass, "residual " + fmt(rc) + ", dt/2 ratio " + fmt(rf / rc) +
                    " (< 0.35); noise control x" + fmt(rn / rc) + " (> 10)"};
}

Outcome check_run_determinism() {
  const std::string config_text =
      "scenario.kind = gaussian_packet\n"
      "scenario.p = 0.4\n"
      "scenario.x0 = 12.8\n"
      "scenario.width = 2.5\n"
      "grid.nx = 256\n"
      "solver.mode = coupled\n"
      "solver.dt = 0.01\n"
      "solver.steps = 40\n"
      "particle.x = 11.8\n";
  const auto base = std::filesystem::temp_directory_path() /
                    "pilot_dirac_verify_determinism";
  std::vector<std::vector<io::ManifestEntry>> runs;
  for (int r = 0; r < 2; ++r) {
    RunConfig cfg = parse_run_config_text(config_text);
    const auto dir = base / std::to_string(r);
    std::filesystem::remove_all(dir);
    io::OutputSet out(dir);
    run_scenario(cfg, out);
    runs.push_back(out.entries());
  }
  bool same = runs[0].size() == runs[1].size();
  if (same)
    for (std::size_t i = 0; i < runs[0].size(); ++i)
      same = same && runs[0][i].path == runs[1][i].path &&
             runs[0][i].fnv1a64 == runs[1][i].fnv1a64;
  std::filesystem::remove_all(base);
  return {same, same ? "two identical runs, " +
                           std::to_string(runs[0].size()) +
                           " files with matching checksums"
                     : "checksum mismatch between identical runs"};
}

bool VerifyReport::all_pass() const {
  for (const auto& item : items)
    if (!item.outcome.pass) return false;
  return true;
}

VerifyReport run_verification(bool fast) {
  const int nx = fast ? 256 : 1024;
  VerifyReport report;
  auto add = [&](const std::string& name, Outcome o) {
    report.items.push_back({name, std::move(o)});
  };
  add("clifford_algebra", check_clifford());
  add("bilinear_currents", check_bilinears(fast ? 200 : 1000));
  add("momentum_oracle", check_momentum_oracle(100, 1e-6));
  add("force_oracle", check_force_oracle(100, 1e-6));
  {
    // mutation sanity: a sign-flipped force must make the oracle FAIL
    const Outcome mutated = check_force_oracle(100, 1e-6, true);
    add("mutation_sanity",
        {!mutated.pass, mutated.pass
                            ? "sign-flipped force slipped past the oracle"
                            : "sign-flipped force rejected (" + mutated.detail +
                                  ")"});
  }
  add("continuity", check_continuity(nx, 1e-6));
  add("gauge_equivalence", check_gauge_equivalence(nx, 1e-6));
  add("model_action", check_model_action(1e-8, 1e-10, 1e-8));
  add("guidance_kinematics", check_guidance_kinematics(1e-8));
  add("equivariance",
      fast ? check_equivariance(256, 2000, 300)
           : check_equivariance(512, 10000, 500));
  add("coupled_identities", check_coupled_identities(1600));
  add("field_equation", check_field_equation(256));
  add("run_determinism", check_run_determinism());
  return report;
}

void print_report(const VerifyReport& report, std::ostream& os) {
  for (const auto& item : report.items)
    os << (item.outcome.pass ? "PASS " : "FAIL ") << item.name << ": "
       << item.outcome.detail << "\n";
  os << (report.all_pass() ? "verification passed" : "verification FAILED")
     << " (" << report.items.size() << " checks)\n";
}

} // namespace pilot::verify
