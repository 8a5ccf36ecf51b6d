#include "runner.hpp"

#include "plot.hpp"

#include "pilot_dirac/coupled.hpp"
#include "pilot_dirac/ensemble.hpp"
#include "pilot_dirac/gauge.hpp"

#include <cstdio>

namespace pilot {

namespace {

std::string field_csv(const Grid& grid, const SpinorField& psi) {
  io::CsvBuilder csv({"x", "re0", "im0", "re1", "im1"});
  const ArrayXd xs = grid.sites();
  for (int i = 0; i < grid.nx; ++i)
    csv.row({xs[i], psi(i, 0).real(), psi(i, 0).imag(), psi(i, 1).real(),
             psi(i, 1).imag()});
  return csv.str();
}

std::string trajectory_csv(const Trajectory& traj) {
  io::CsvBuilder csv({"t", "x", "u0", "u1", "tau", "S", "p0", "p1"});
  for (const ParticleState& s : traj)
    csv.row({s.t, s.x, s.u[0], s.u[1], s.tau, s.S, s.p[0], s.p[1]});
  return csv.str();
}

std::string field_name(int step) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "fields/field_%06d.csv", step);
  return buf;
}

// snapshot cadence: initial and final always; every `every` steps between
bool keep_field(int step, int steps, int every) {
  if (step == 0 || step == steps) return true;
  return every > 0 && step % every == 0;
}

nlohmann::json config_echo(const RunConfig& cfg) {
  const char* kinds[] = {"plane_wave", "gaussian_packet", "superposition"};
  const char* modes[] = {"free", "phase_sourced", "coupled"};
  nlohmann::json j{{"scenario.kind", kinds[cfg.scenario.kind]},
                   {"grid.nx", cfg.nx},
                   {"grid.dx", cfg.dx},
                   {"solver.mode", modes[static_cast<int>(cfg.mode)]},
                   {"solver.dt", cfg.solver.dt},
                   {"solver.steps", cfg.solver.steps},
                   {"solver.m", cfg.solver.m},
                   {"solver.k", cfg.solver.k},
                   {"solver.eps", cfg.solver.eps}};
  if (cfg.scenario.kind != Scenario::PlaneWave ||
      cfg.scenario.p != 0.0)
    j["scenario.p"] = cfg.scenario.p;
  if (cfg.scenario.kind == Scenario::GaussianPacket) {
    j["scenario.x0"] = cfg.scenario.x0;
    j["scenario.width"] = cfg.scenario.width;
  }
  if (cfg.scenario.kind == Scenario::Superposition) {
    j["scenario.p2"] = cfg.scenario.p2;
    j["scenario.w1"] = cfg.scenario.w1;
    j["scenario.w2"] = cfg.scenario.w2;
  }
  if (cfg.mode == RunMode::PhaseSourced) {
    j["source.dst"] = cfg.source_dst;
    j["source.dsx"] = cfg.source_dsx;
  }
  if (cfg.particle_given) {
    j["particle.x"] = cfg.particle_x;
    j["particle.u1"] = cfg.particle_u1;
  }
  if (cfg.ensemble_n > 0) {
    j["ensemble.n"] = cfg.ensemble_n;
    j["ensemble.seed"] = cfg.ensemble_seed;
  }
  return j;
}

void emit_ensemble(const RunConfig& cfg,
                   const std::vector<CurrentSnapshot>& currents,
                   const Grid& grid, io::OutputSet& out, nlohmann::json& summary) {
  Ensemble ens = sample_positions(currents.front().P, grid, cfg.ensemble_n,
                                  cfg.ensemble_seed);
  evolve_ensemble(ens, currents, grid, cfg.solver.k);
  io::CsvBuilder csv({"x"});
  for (std::size_t s = 0; s < ens.states.size(); ++s)
    if (!ens.excluded[s]) csv.row({ens.states[s].x});
  out.write("ensemble_positions.csv", csv.str());

  const KsResult ks = equivariance_test(ens, currents.back().P, grid);
  out.write_json("ensemble_report.json",
                 {{"n", cfg.ensemble_n},
                  {"seed", cfg.ensemble_seed},
                  {"excluded", ens.excluded_count},
                  {"ks_statistic", ks.statistic},
                  {"ks_critical", ks.critical},
                  {"verdict", ks.pass ? "PASS" : "FAIL"}});
  summary["ensemble_ks"] = ks.statistic;
}

void emit_action(const std::vector<CurrentSnapshot>& currents, const Grid& grid,
                 double k, io::OutputSet& out, nlohmann::json& summary) {
  const ActionField af = build_action_field(currents, grid, k);
  io::CsvBuilder csv({"x", "S"});
  const ArrayXd xs = grid.sites();
  for (int i = 0; i < grid.nx; ++i) csv.row({xs[i], af.S.back()[i]});
  out.write("action_field.csv", csv.str());
  summary["curl_norm"] = af.curl_norm;
  summary["path_dependent"] = af.path_dependent;
}

void run_uncoupled(const RunConfig& cfg, const Grid& grid, const GammaSet& g,
                   io::OutputSet& out, nlohmann::json& summary) {
  SpinorField psi = init_scenario(cfg.scenario, grid, cfg.solver.m);
  const FreeStepper stepper(grid, cfg.solver.dt, cfg.solver.m);
  VectorField dS;
  if (cfg.mode == RunMode::PhaseSourced) {
    dS = VectorField::Zero(grid.nx, 2);
    dS.col(0) = cfg.source_dst;
    dS.col(1) = cfg.source_dsx;
  }

  std::vector<CurrentSnapshot> currents;
  currents.reserve(cfg.solver.steps + 1);
  currents.push_back(current_field(psi, g, grid, 0.0));
  if (cfg.emit_fields) out.write(field_name(0), field_csv(grid, psi));
  for (int n = 1; n <= cfg.solver.steps; ++n) {
    if (cfg.mode == RunMode::PhaseSourced)
      psi = step_phase_sourced(psi, dS, grid, cfg.solver);
    else
      stepper.step(psi);
    currents.push_back(current_field(psi, g, grid, n * cfg.solver.dt));
    if (cfg.emit_fields && keep_field(n, cfg.solver.steps, cfg.fields_every))
      out.write(field_name(n), field_csv(grid, psi));
  }

  if (currents.size() >= 3)
    summary["continuity_residual"] = continuity_residual(currents, grid);
  const auto [ptotal, pmin] = born_weight_check(currents.back(), grid);
  summary["born_integral_final"] = ptotal;
  summary["born_min_final"] = pmin;

  if (cfg.particle_given && cfg.emit_trajectory) {
    ParticleState st;
    st.x = cfg.particle_x;
    Trajectory traj{st};
    for (std::size_t i = 0; i + 1 < currents.size(); ++i)
      traj.push_back(advance_trajectory(traj.back(), currents[i],
                                        currents[i + 1], grid, cfg.solver.k));
    out.write("trajectory.csv", trajectory_csv(traj));
  }
  if (cfg.ensemble_n > 0) emit_ensemble(cfg, currents, grid, out, summary);
  if (cfg.emit_action) emit_action(currents, grid, cfg.solver.k, out, summary);
}

void run_coupled_mode(const RunConfig& cfg, const Grid& grid, const GammaSet& g,
                      io::OutputSet& out, nlohmann::json& summary) {
  const SpinorField phi0 = init_scenario(cfg.scenario, grid, cfg.solver.m);
  ParticleState st;
  st.x = cfg.particle_x;
  st.u = Vector2d(std::sqrt(1.0 + cfg.particle_u1 * cfg.particle_u1),
                  cfg.particle_u1);
  const CurrentSnapshot snap0 = current_field(phi0, g, grid, 0.0);
  const FieldSample s0 = GuidanceField(snap0, grid).sample(st.x);
  st.p = generalized_momentum(st.u, s0.j, s0.rho0, cfg.solver.k);

  const CoupledRun run = run_coupled(phi0, st, grid, g, cfg.solver);

  if (cfg.emit_fields)
    for (int n = 0; n <= cfg.solver.steps; ++n)
      if (keep_field(n, cfg.solver.steps, cfg.fields_every))
        out.write(field_name(n), field_csv(grid, run.fields[n].psi));
  if (cfg.emit_trajectory)
    out.write("trajectory.csv", trajectory_csv(run.particle));

  double worst_shell = 0.0;
  for (const ParticleState& p : run.particle)
    worst_shell = std::max(worst_shell, p.mass_shell_residual);
  summary["max_mass_shell_residual"] = worst_shell;
  if (run.currents.size() >= 3)
    summary["continuity_residual"] = continuity_residual(run.currents, grid);

  if (cfg.emit_energy && run.fields.size() >= 5) {
    const EnergyReport energy = total_conservation_check(run, g);
    io::CsvBuilder csv({"t", "E_field", "E_particle", "E_total"});
    for (std::size_t i = 0; i < energy.t.size(); ++i)
      csv.row({energy.t[i], energy.e_field[i], energy.e_particle[i],
               energy.e_total[i]});
    out.write("energy.csv", csv.str());

    const DivergenceIdentityReport rep = divergence_identity_check(run, g);
    out.write_json("identity_check.json",
                   {{"field_residual", rep.field_residual},
                    {"particle_residual", rep.particle_residual},
                    {"rhs_norm", rep.rhs_norm},
                    {"energy_exchange", energy.exchange},
                    {"energy_total_drift", energy.total_drift}});
    summary["energy_exchange"] = energy.exchange;
    summary["energy_total_drift"] = energy.total_drift;
  }
  if (cfg.emit_action)
    emit_action(run.currents, grid, cfg.solver.k, out, summary);
}

} // namespace

void run_scenario(const RunConfig& cfg, io::OutputSet& out) {
  const Grid grid(cfg.nx, cfg.dx);
  const GammaSet g = make_gamma_set(2);
  nlohmann::json summary{{"config", config_echo(cfg)}};

  if (cfg.mode == RunMode::Coupled)
    run_coupled_mode(cfg, grid, g, out, summary);
  else
    run_uncoupled(cfg, grid, g, out, summary);

  out.write_json("summary.json", summary);
  if (cfg.emit_plots) {
    // render from what was just written, then fold the SVGs back into the
    // manifest written below
    out.write_manifest();
    std::ostringstream warnings;
    plot::plot_directory(out.dir(), warnings);
  } else {
    out.write_manifest();
  }
}

} // namespace pilot
